#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "govgame/dynamics.hpp"
#include "govgame/params.hpp"

namespace govgame {

enum class Stability : std::uint8_t {
  Stable = 0,      // all eigenvalues strictly negative
  Unstable = 1,    // all eigenvalues strictly positive
  Saddle = 2,      // mixed signs, none within the zero tolerance
  Degenerate = 3,  // at least one eigenvalue within the zero tolerance
};

std::string to_string(Stability s);

// Eigenvalues within 1e-12 * max(1, largest magnitude) count as zero.
Stability classify_eigenvalues(const std::array<double, 4>& eigenvalues);

// Degenerate with no strictly positive eigenvalue; such vertices can still
// attract trajectories along their center directions.
bool is_attracting_or_degenerate_attracting(
    const std::array<double, 4>& eigenvalues);

struct VertexReport {
  PopulationState vertex;
  // Jacobian of the replicator field is diagonal at vertices; entries are
  // (1 - 2 coord_i) * fitness_difference_i, in (x, y, z, w) order.
  std::array<double, 4> eigenvalues{};
  Stability classification = Stability::Degenerate;
};

// Reports for all 16 corners of [0,1]^4, in profile-index order of the
// cooperating-bit pattern (x,y,z,w) = vertex 0..15 with x the high bit and
// 1 meaning coordinate 1.
std::vector<VertexReport> vertex_reports(Model model,
                                         const GovernanceParams& params);

struct InteriorEquilibrium {
  PopulationState point;
  double residual = 0.0;  // max-norm of the closed-form differences
};

struct SearchConfig {
  int n_starts = 64;       // quasi-random Newton starts; must be >= 1
  int max_iterations = 200;
  double residual_tol = 1e-9;
  double interior_margin = 1e-6;  // distance from the boundary required
  double dedup_tol = 1e-6;        // max-norm below which two roots merge
  std::uint64_t scramble_seed = 0;
  bool use_analytic_candidates = true;
};

// Damped-Newton multistart on the closed-form differences. Results are
// deduplicated, strictly interior, and sorted lexicographically; at most two
// points are ever returned.
std::vector<InteriorEquilibrium> find_interior_equilibria(
    Model model, const GovernanceParams& params, const SearchConfig& config = {});

// Analytic interior candidates (up to two). Points are returned only when the
// construction yields finite coordinates strictly inside (0,1)^4; they are
// exact roots of the closed forms when they exist.
std::vector<PopulationState> interior_candidates(Model model,
                                                 const GovernanceParams& params);

// True when either published no-interior condition holds: v - b_fo > 0, or
// 0 < epsilon < 1. The epsilon condition rules out interior equilibria in
// both models; the v - b_fo one is a Model I guarantee only (Model II admits
// interior points in that regime once epsilon < 0 — see the regression test
// with the frozen counterexample).
bool no_interior_guaranteed(const GovernanceParams& params);

struct GridScanResult {
  int nodes_per_axis = 0;
  // Cells of a uniform interior grid whose corners show a strict sign change
  // in every component; each entry is the cell's lower-corner node index per
  // axis.
  std::vector<std::array<int, 4>> flagged_cells;
  // Set when some component kept one sign over its whole dependency subgrid,
  // which rules out flagged cells without full enumeration.
  std::optional<Role> single_signed_component;

  // True when the cell containing p (nodes at (k+0.5)/nodes_per_axis) was
  // flagged.
  bool contains_point(const PopulationState& p) const;
};

// Sign-change scan over a nodes_per_axis^4 grid of strictly interior points
// (nodes at (k + 0.5) / nodes_per_axis). Independent of the Newton search.
GridScanResult grid_scan(Model model, const GovernanceParams& params,
                         int nodes_per_axis = 50);

struct ParameterRanges {
  // Inclusive [lo, hi] per field, sampled uniformly.
  std::array<double, 2> b_i{0.0, 4.0};
  std::array<double, 2> b_u{0.0, 4.0};
  std::array<double, 2> b_p{0.0, 4.0};
  std::array<double, 2> b_r{0.0, 4.0};
  std::array<double, 2> b_fo{0.0, 5.0};
  std::array<double, 2> c_i{0.0, 1.0};
  std::array<double, 2> c_w{0.0, 1.0};
  std::array<double, 2> epsilon{-2.0, 1.0};
  std::array<double, 2> c_p{0.0, 1.0};
  std::array<double, 2> u{0.0, 5.0};  // ignored while u_upper_is_5v
  std::array<double, 2> v{0.0, 1.0};
  std::array<double, 2> c_r{0.0, 1.0};
  std::array<double, 2> p_w{0.0, 1.0};
  // Draw u uniformly from [0, 5 v] using the v drawn for the same sample.
  bool u_upper_is_5v = true;
};

ParameterRanges default_census_ranges();

// Deterministic sample of the parameter box: the sample at a given index is a
// pure function of (seed, index), so results do not depend on thread count.
GovernanceParams sample_params(const ParameterRanges& ranges,
                               std::uint64_t seed, std::uint64_t index);

struct EquilibriumCensus {
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::map<int, std::uint64_t> histogram;  // interior count -> samples
  ParameterRanges ranges;
};

EquilibriumCensus census_interior_equilibria(Model model,
                                             const ParameterRanges& ranges,
                                             std::uint64_t n_samples,
                                             std::uint64_t seed,
                                             int threads = 0);

// Boundary line segments that are equilibria for every parameter choice:
// one coordinate varies freely over [0,1], the others are pinned at 0/1.
struct EdgeFamily {
  Role free_role = Role::User;
  // Pinned coordinates; the free role's entry is ignored.
  PopulationState pinned;
};

std::vector<EdgeFamily> edge_equilibrium_families(Model model);

struct BoundaryEquilibrium {
  PopulationState point;
  Role boundary_role = Role::Commentariat;  // the coordinate sitting at 0/1
  double residual = 0.0;  // max-norm over the three free components
};

// Isolated equilibria with exactly one coordinate on the boundary and the
// rest strictly interior, found by per-face Newton multistart. Reported for
// inspection; counts are parameter dependent.
std::vector<BoundaryEquilibrium> boundary_equilibria(
    Model model, const GovernanceParams& params, const SearchConfig& config = {});

}  // namespace govgame
