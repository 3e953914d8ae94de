#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "govgame/equilibria.hpp"
#include "govgame/rng.hpp"

using namespace govgame;

namespace {

GovernanceParams fig3_params() {
  GovernanceParams g;
  g.b_i = 1.0;
  g.b_u = 4.0;
  g.b_p = 4.0;
  g.b_r = 4.0;
  g.b_fo = 1.0;
  g.c_i = 0.5;
  g.c_w = 1.0;
  g.epsilon = 0.2;
  g.c_p = 0.5;
  g.u = 1.5;
  g.v = 0.5;
  g.c_r = 0.5;
  g.p_w = 0.5;
  return g;
}

// Parameter set with a single known interior equilibrium (negative epsilon,
// v < b_fo, so the no-interior guarantee does not apply).
GovernanceParams one_interior_params() {
  GovernanceParams g;
  g.b_i = 0.5;
  g.b_u = 1.0;
  g.b_p = 1.0;
  g.b_r = 1.0;
  g.b_fo = 1.0;
  g.c_i = 0.3;
  g.c_w = 0.5;
  g.epsilon = -0.5;
  g.c_p = 0.4;
  g.u = 1.0;
  g.v = 0.2;
  g.c_r = 0.1;
  g.p_w = 0.5;
  return g;
}

double linf(const PopulationState& a, const PopulationState& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y),
                   std::abs(a.z - b.z), std::abs(a.w - b.w)});
}

constexpr Model kBoth[] = {Model::InvestigateDevelopers,
                           Model::InvestigateRegulators};

}  // namespace

TEST_CASE("eigenvalue classification covers all shapes") {
  CHECK(classify_eigenvalues({-1.0, -0.1, -3.0, -0.5}) == Stability::Stable);
  CHECK(classify_eigenvalues({1.0, 0.1, 3.0, 0.5}) == Stability::Unstable);
  CHECK(classify_eigenvalues({1.0, -0.1, 3.0, 0.5}) == Stability::Saddle);
  CHECK(classify_eigenvalues({0.0, -0.1, -3.0, -0.5}) ==
        Stability::Degenerate);
  // The zero tolerance is relative to the largest magnitude.
  CHECK(classify_eigenvalues({1e-13, -0.1, -3.0, -0.5}) ==
        Stability::Degenerate);
  CHECK(classify_eigenvalues({-1e-7, -0.1, -3.0, -0.5}) == Stability::Stable);

  CHECK(is_attracting_or_degenerate_attracting({-1.0, -0.1, -3.0, -0.5}));
  CHECK(is_attracting_or_degenerate_attracting({0.0, -0.1, -3.0, -0.5}));
  CHECK_FALSE(is_attracting_or_degenerate_attracting({0.0, 0.1, -3.0, -0.5}));
  CHECK_FALSE(
      is_attracting_or_degenerate_attracting({1.0, 0.1, 3.0, 0.5}));

  CHECK(to_string(Stability::Stable) == "Stable");
  CHECK(to_string(Stability::Degenerate) == "Degenerate");
}

TEST_CASE("vertex reports carry the documented spot values") {
  const GovernanceParams g = fig3_params();
  const auto reports = vertex_reports(Model::InvestigateDevelopers, g);
  REQUIRE(reports.size() == 16);

  // Vertex order: index bit pattern xyzw, x the high bit.
  const VertexReport& origin = reports[0];
  CHECK(origin.vertex == PopulationState{0.0, 0.0, 0.0, 0.0});
  CHECK(origin.eigenvalues[0] == doctest::Approx(-g.c_i).epsilon(1e-14));
  CHECK(origin.eigenvalues[1] ==
        doctest::Approx(g.epsilon * g.b_u * g.p_w).epsilon(1e-14));
  CHECK(origin.eigenvalues[2] == doctest::Approx(-g.c_p).epsilon(1e-14));
  CHECK(origin.eigenvalues[3] == doctest::Approx(-g.c_r).epsilon(1e-14));
  CHECK(origin.classification == Stability::Saddle);  // epsilon > 0

  // (1,0,0,0): user eigenvalue is exactly zero.
  const VertexReport& x_only = reports[8];
  CHECK(x_only.vertex == PopulationState{1.0, 0.0, 0.0, 0.0});
  CHECK(x_only.eigenvalues[1] == 0.0);
  CHECK(x_only.classification == Stability::Degenerate);
}

TEST_CASE("the origin is stable exactly when epsilon is negative") {
  for (Model model : kBoth) {
    GovernanceParams g = fig3_params();
    g.epsilon = -0.1;
    CHECK(vertex_reports(model, g)[0].classification == Stability::Stable);
    g.epsilon = 0.1;
    CHECK(vertex_reports(model, g)[0].classification == Stability::Saddle);
  }
}

TEST_CASE("Model II all-cooperate vertex has the documented eigenvalue set") {
  const GovernanceParams g = fig3_params();
  const auto reports = vertex_reports(Model::InvestigateRegulators, g);
  const VertexReport& ones = reports[15];
  CHECK(ones.vertex == PopulationState{1.0, 1.0, 1.0, 1.0});
  std::array<double, 4> got = ones.eigenvalues;
  std::array<double, 4> want = {-g.b_u, -g.b_r + g.c_r, g.c_p - g.u,
                                g.c_i - g.p_w * (g.b_i + g.c_w)};
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) {
    CHECK(got[static_cast<std::size_t>(i)] ==
          doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("vertex eigenvalues are finite-difference derivatives of the rhs") {
  const GovernanceParams g = fig3_params();
  const double h = 1e-6;
  for (Model model : kBoth) {
    const auto reports = vertex_reports(model, g);
    for (const VertexReport& report : reports) {
      for (int i = 0; i < 4; ++i) {
        const Role role = kAllRoles[static_cast<std::size_t>(i)];
        PopulationState plus = report.vertex;
        PopulationState minus = report.vertex;
        plus.set(role, report.vertex.get(role) + h);
        minus.set(role, report.vertex.get(role) - h);
        const double fd =
            (rhs(model, plus, g).get(role) - rhs(model, minus, g).get(role)) /
            (2.0 * h);
        CHECK(std::abs(fd - report.eigenvalues[static_cast<std::size_t>(i)]) <=
              1e-6 *
                  std::max(1.0, std::abs(
                                    report.eigenvalues[static_cast<std::size_t>(
                                        i)])));
      }
    }
  }
}

TEST_CASE("no_interior_guaranteed matches its two conditions") {
  GovernanceParams g = one_interior_params();
  CHECK_FALSE(no_interior_guaranteed(g));
  g.v = 1.5;
  g.b_fo = 0.5;  // v - b_fo > 0
  CHECK(no_interior_guaranteed(g));
  g = one_interior_params();
  g.epsilon = 0.5;  // 0 < epsilon < 1
  CHECK(no_interior_guaranteed(g));
  g.epsilon = 0.0;
  CHECK_FALSE(no_interior_guaranteed(g));
  g.epsilon = 1.0;
  CHECK_FALSE(no_interior_guaranteed(g));
}

TEST_CASE("the frozen one-interior example is found exactly once") {
  const GovernanceParams g = one_interior_params();
  const auto found = find_interior_equilibria(Model::InvestigateDevelopers, g);
  REQUIRE(found.size() == 1);
  const PopulationState& p = found[0].point;
  CHECK(found[0].residual <= 1e-9);
  CHECK(p.y == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(p.x == doctest::Approx(0.51702).epsilon(1e-3));
  CHECK(p.z == doctest::Approx(0.13733).epsilon(1e-3));
  CHECK(p.w == doctest::Approx(0.61983).epsilon(1e-3));

  // The closed forms genuinely vanish there.
  const auto F = closed_form_differences(Model::InvestigateDevelopers, p, g);
  for (double f : F) {
    CHECK(std::abs(f) <= 1e-9);
  }

  // The analytic candidates include it.
  const auto candidates =
      interior_candidates(Model::InvestigateDevelopers, g);
  bool candidate_matches = false;
  for (const PopulationState& c : candidates) {
    if (linf(c, p) < 1e-6) candidate_matches = true;
  }
  CHECK(candidate_matches);

  // The independent grid oracle flags the cell containing it.
  const GridScanResult grid = grid_scan(Model::InvestigateDevelopers, g, 50);
  CHECK(grid.contains_point(p));
  CHECK_FALSE(grid.flagged_cells.empty());
}

TEST_CASE("interior search is deterministic") {
  const GovernanceParams g = one_interior_params();
  const auto a = find_interior_equilibria(Model::InvestigateDevelopers, g);
  const auto b = find_interior_equilibria(Model::InvestigateDevelopers, g);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].residual == b[i].residual);
  }
}

TEST_CASE("guaranteed-empty parameter draws yield no interior points") {
  for (std::uint64_t k = 0; k < 60; ++k) {
    SplitMix64 rng = make_stream(904, k);
    GovernanceParams g;
    g.b_i = 4.0 * rng.uniform01();
    g.b_u = 0.1 + 3.9 * rng.uniform01();
    g.b_p = 4.0 * rng.uniform01();
    g.b_r = 4.0 * rng.uniform01();
    g.c_i = rng.uniform01();
    g.c_w = rng.uniform01();
    g.c_p = rng.uniform01();
    g.u = rng.uniform01();
    g.c_r = rng.uniform01();
    g.p_w = rng.uniform01();
    // The v - b_fo > 0 guarantee only covers the developer-investigation
    // variant; the epsilon one covers both.
    std::vector<Model> models;
    if (k % 2 == 0) {
      // Branch 1: v - b_fo > 0.
      g.b_fo = rng.uniform01();
      g.v = g.b_fo + 0.01 + rng.uniform01();
      g.epsilon = -2.0 + 2.0 * rng.uniform01();  // <= 0
      models = {Model::InvestigateDevelopers};
    } else {
      // Branch 2: 0 < epsilon < 1.
      g.b_fo = 5.0 * rng.uniform01();
      g.v = rng.uniform01();
      g.epsilon = 0.01 + 0.98 * rng.uniform01();
      models = {Model::InvestigateDevelopers, Model::InvestigateRegulators};
    }
    for (Model model : models) {
      CAPTURE(k);
      CHECK(no_interior_guaranteed(g));
      CHECK(find_interior_equilibria(model, g).empty());
      const GridScanResult grid = grid_scan(model, g, 50);
      CHECK(grid.flagged_cells.empty());
    }
  }
}

TEST_CASE("v > b_fo does not preclude interior points in Model II") {
  // With epsilon < 0 the user factor z + (1-z) eps vanishes at an interior
  // z, so the guarantee that holds for Model I fails here. Frozen example.
  GovernanceParams g;
  g.b_i = 1.575680;
  g.b_u = 1.884741;
  g.b_p = 0.427903;
  g.b_r = 3.169008;
  g.c_i = 0.835758;
  g.c_w = 0.422783;
  g.c_p = 0.555940;
  g.u = 1.419408;
  g.c_r = 0.825554;
  g.p_w = 0.825895;
  g.b_fo = 0.694296;
  g.v = 1.583093;
  g.epsilon = -1.807389;
  REQUIRE(g.v - g.b_fo > 0.0);
  CHECK(no_interior_guaranteed(g));  // the predicate only mirrors the text

  CHECK(find_interior_equilibria(Model::InvestigateDevelopers, g).empty());

  const auto found = find_interior_equilibria(Model::InvestigateRegulators, g);
  REQUIRE(found.size() == 1);
  const PopulationState& p = found[0].point;
  for (Role role : kAllRoles) {
    CHECK(p.get(role) > 0.0);
    CHECK(p.get(role) < 1.0);
    CHECK(std::abs(closed_form_difference(Model::InvestigateRegulators, role,
                                          p, g)) <= 1e-8);
  }
  CHECK_FALSE(
      grid_scan(Model::InvestigateRegulators, g, 50).flagged_cells.empty());
}

TEST_CASE("census is deterministic and thread-count independent") {
  const auto ranges = default_census_ranges();
  const EquilibriumCensus one =
      census_interior_equilibria(Model::InvestigateDevelopers, ranges, 200, 5,
                                 1);
  const EquilibriumCensus four =
      census_interior_equilibria(Model::InvestigateDevelopers, ranges, 200, 5,
                                 4);
  CHECK(one.histogram == four.histogram);
  CHECK(one.n_samples == 200);

  std::uint64_t total = 0;
  for (const auto& [count, n] : one.histogram) {
    CHECK(count >= 0);
    CHECK(count <= 2);
    total += n;
  }
  CHECK(total == 200);
  // Zero interior equilibria dominates the box.
  CHECK(one.histogram.at(0) > 100);
}

TEST_CASE("census samples respect the ranges") {
  const auto ranges = default_census_ranges();
  for (std::uint64_t i = 0; i < 500; ++i) {
    const GovernanceParams g = sample_params(ranges, 11, i);
    CHECK(g.b_i >= 0.0);
    CHECK(g.b_i <= 4.0);
    CHECK(g.b_fo <= 5.0);
    CHECK(g.epsilon >= -2.0);
    CHECK(g.epsilon <= 1.0);
    CHECK(g.p_w >= 0.0);
    CHECK(g.p_w <= 1.0);
    CHECK(g.u >= 0.0);
    CHECK(g.u <= 5.0 * g.v);
    CHECK(validation_errors(g).empty());
  }
  // Pure function of (seed, index).
  CHECK(sample_params(ranges, 11, 42) == sample_params(ranges, 11, 42));
  CHECK_FALSE(sample_params(ranges, 11, 42) == sample_params(ranges, 12, 42));
}

TEST_CASE("edge families are exact equilibrium lines") {
  for (Model model : kBoth) {
    const auto families = edge_equilibrium_families(model);
    REQUIRE(families.size() == 2);
    const GovernanceParams g = fig3_params();
    for (const EdgeFamily& family : families) {
      CHECK(family.free_role == Role::User);
      for (double y : {0.2, 0.7}) {
        PopulationState s = family.pinned;
        s.set(family.free_role, y);
        const StateDerivative d = rhs(model, s, g);
        CHECK(d.dx == 0.0);
        CHECK(d.dy == 0.0);
        CHECK(d.dz == 0.0);
        CHECK(d.dw == 0.0);
      }
    }
    // Both families sit on the x = 1 face with z pinned appropriately.
    CHECK(families[0].pinned.x == 1.0);
    CHECK(families[1].pinned.x == 1.0);
  }
}

TEST_CASE("boundary search results lie on a face and solve the free system") {
  const GovernanceParams g = one_interior_params();
  const auto results =
      boundary_equilibria(Model::InvestigateDevelopers, g);
  for (const BoundaryEquilibrium& b : results) {
    const double coord = b.point.get(b.boundary_role);
    CHECK((coord == 0.0 || coord == 1.0));
    CHECK(b.residual <= 1e-9);
    const auto F =
        closed_form_differences(Model::InvestigateDevelopers, b.point, g);
    for (Role role : kAllRoles) {
      if (role == b.boundary_role) continue;
      CHECK(std::abs(F[static_cast<std::size_t>(role)]) <= 1e-8);
    }
  }
}
