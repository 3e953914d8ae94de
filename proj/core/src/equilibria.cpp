#include "govgame/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include <Eigen/Dense>

#include "govgame/rng.hpp"

namespace govgame {

namespace {

constexpr double kZeroTol = 1e-12;

double max_abs4(const std::array<double, 4>& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])),
                  std::max(std::abs(v[2]), std::abs(v[3])));
}

// Van der Corput radical inverse; bases 2,3,5,7 cover four dimensions.
double radical_inverse(std::uint64_t n, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double value = 0.0;
  while (n > 0) {
    value += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return value;
}

constexpr std::uint64_t kHaltonBases[4] = {2, 3, 5, 7};

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Saddle: return "Saddle";
    case Stability::Degenerate: return "Degenerate";
  }
  throw std::logic_error("bad Stability");
}

Stability classify_eigenvalues(const std::array<double, 4>& eigenvalues) {
  const double scale = std::max(1.0, max_abs4(eigenvalues));
  const double tol = kZeroTol * scale;
  bool any_zero = false, all_neg = true, all_pos = true;
  for (double ev : eigenvalues) {
    if (std::abs(ev) <= tol) {
      any_zero = true;
    } else if (ev < 0.0) {
      all_pos = false;
    } else {
      all_neg = false;
    }
  }
  if (any_zero) return Stability::Degenerate;
  if (all_neg) return Stability::Stable;
  if (all_pos) return Stability::Unstable;
  return Stability::Saddle;
}

bool is_attracting_or_degenerate_attracting(
    const std::array<double, 4>& eigenvalues) {
  const Stability cls = classify_eigenvalues(eigenvalues);
  if (cls == Stability::Stable) return true;
  if (cls != Stability::Degenerate) return false;
  const double tol = kZeroTol * std::max(1.0, max_abs4(eigenvalues));
  for (double ev : eigenvalues) {
    if (ev > tol) return false;
  }
  return true;
}

std::vector<VertexReport> vertex_reports(Model model,
                                         const GovernanceParams& params) {
  validate_params(params);
  std::vector<VertexReport> reports;
  reports.reserve(16);
  for (int v = 0; v < 16; ++v) {
    PopulationState s;
    s.x = (v >> 3) & 1 ? 1.0 : 0.0;
    s.y = (v >> 2) & 1 ? 1.0 : 0.0;
    s.z = (v >> 1) & 1 ? 1.0 : 0.0;
    s.w = v & 1 ? 1.0 : 0.0;

    VertexReport report;
    report.vertex = s;
    // The linearization at a corner is diagonal: moving coordinate i off its
    // bound scales like (1 - 2 coord_i) * F_i. The 8-term expectation is
    // exact here (all weights are 0 or 1).
    const double coords[4] = {s.x, s.y, s.z, s.w};
    for (int i = 0; i < 4; ++i) {
      const double f = fitness_difference(model, kAllRoles[i], s, params);
      report.eigenvalues[i] = (1.0 - 2.0 * coords[i]) * f;
    }
    report.classification = classify_eigenvalues(report.eigenvalues);
    reports.push_back(report);
  }
  return reports;
}

bool no_interior_guaranteed(const GovernanceParams& params) {
  if (params.v - params.b_fo > 0.0) return true;
  return params.epsilon > 0.0 && params.epsilon < 1.0;
}

std::vector<PopulationState> interior_candidates(Model model,
                                                 const GovernanceParams& p) {
  std::vector<PopulationState> out;
  auto strictly_inside = [](double c) {
    return std::isfinite(c) && c > 0.0 && c < 1.0;
  };

  if (p.p_w <= 0.0 || p.b_i + p.c_w <= 0.0 || p.c_i <= 0.0) return out;
  const double y = p.c_i / (p.p_w * (p.b_i + p.c_w));
  if (!strictly_inside(y)) return out;

  if (model == Model::InvestigateDevelopers) {
    const double d = p.v - p.b_fo;
    if (d == 0.0 || p.u <= 0.0) return out;
    const double s2 = -2.0 * (p.epsilon - 1.0) * p.c_i * p.c_r * p.p_w * d *
                          (p.b_i + p.c_w) +
                      p.c_i * p.c_i * d * d +
                      (p.epsilon + 1.0) * (p.epsilon + 1.0) * p.c_r * p.c_r *
                          p.p_w * p.p_w * (p.b_i + p.c_w) * (p.b_i + p.c_w);
    if (s2 < 0.0) return out;
    const double s = std::sqrt(s2);
    for (double sign : {1.0, -1.0}) {
      const double z = (sign * s + p.c_i * d +
                        (p.epsilon + 1.0) * p.c_r * p.p_w * (p.b_i + p.c_w)) /
                       (2.0 * p.c_i * d);
      if (!strictly_inside(z)) continue;
      // x from the user equation, w from the developer equation; both are
      // exact given (y, z).
      const double denom_x = p.p_w * (z - (1.0 - z) * p.epsilon);
      if (denom_x == 0.0) continue;
      const double x = 1.0 - z / denom_x;
      if (!strictly_inside(x)) continue;
      const double denom_w = (x - 1.0) * y * p.p_w * p.u;
      if (denom_w == 0.0) continue;
      const double w =
          (2.0 * p.b_p * (x - 1.0) * y * p.p_w + y * p.b_p - p.c_p) / denom_w;
      if (!strictly_inside(w)) continue;
      out.push_back({x, y, z, w});
    }
  } else {
    if (p.epsilon >= 0.0 || p.u <= 0.0) return out;
    const double z = p.epsilon / (p.epsilon - 1.0);
    if (!strictly_inside(z)) return out;
    const double a = p.b_r + (1.0 - z) * (p.b_fo - p.v);
    const double denom_q = y * (a + p.b_r);
    if (denom_q == 0.0) return out;
    const double q = (p.c_r + y * p.b_r) / denom_q;
    if (!(std::isfinite(q)) || q <= 0.0) return out;
    const double x = 1.0 - (1.0 - q) / p.p_w;
    if (!strictly_inside(x)) return out;
    const double w = p.c_p / (p.u * y * q);
    if (!strictly_inside(w)) return out;
    out.push_back({x, y, z, w});
  }

  // Distinct-root guard when the discriminant vanishes.
  if (out.size() == 2) {
    const double dx = std::abs(out[0].x - out[1].x);
    const double dz = std::abs(out[0].z - out[1].z);
    const double dw = std::abs(out[0].w - out[1].w);
    if (std::max(dx, std::max(dz, dw)) < 1e-12) {
      out.pop_back();
    }
  }
  return out;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  PopulationState point;
  double residual = 0.0;
};

NewtonOutcome newton_solve(Model model, const GovernanceParams& params,
                           PopulationState start, const SearchConfig& config) {
  NewtonOutcome result;
  Eigen::Vector4d p(start.x, start.y, start.z, start.w);

  auto eval = [&](const Eigen::Vector4d& v, Eigen::Vector4d& f) {
    PopulationState s{v[0], v[1], v[2], v[3]};
    const auto d = closed_form_differences(model, s, params);
    f = Eigen::Vector4d(d[0], d[1], d[2], d[3]);
  };

  Eigen::Vector4d f;
  eval(p, f);
  double fnorm = f.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (fnorm < 0.1 * config.residual_tol) break;
    if (p.lpNorm<Eigen::Infinity>() > 4.0) return result;  // wandered off

    PopulationState s{p[0], p[1], p[2], p[3]};
    const auto jac = closed_form_jacobian(model, s, params);
    Eigen::Matrix4d J;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) J(r, c) = jac[r][c];

    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible()) return result;
    Eigen::Vector4d step = lu.solve(-f);

    // Damp until the residual stops increasing.
    double scale = 1.0;
    Eigen::Vector4d pn, fn;
    double fnn = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      pn = p + scale * step;
      eval(pn, fn);
      fnn = fn.lpNorm<Eigen::Infinity>();
      if (fnn < fnorm) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) return result;
    p = pn;
    f = fn;
    fnorm = fnn;
  }

  if (fnorm >= config.residual_tol) return result;
  for (int i = 0; i < 4; ++i) {
    if (!(p[i] >= config.interior_margin &&
          p[i] <= 1.0 - config.interior_margin)) {
      return result;
    }
  }
  result.converged = true;
  result.point = {p[0], p[1], p[2], p[3]};
  result.residual = fnorm;
  return result;
}

double linf_distance(const PopulationState& a, const PopulationState& b) {
  return std::max(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)),
                  std::max(std::abs(a.z - b.z), std::abs(a.w - b.w)));
}

}  // namespace

std::vector<InteriorEquilibrium> find_interior_equilibria(
    Model model, const GovernanceParams& params, const SearchConfig& config) {
  validate_params(params);
  if (config.n_starts < 1) {
    throw std::invalid_argument("n_starts must be >= 1");
  }

  std::vector<PopulationState> starts;
  starts.reserve(static_cast<std::size_t>(config.n_starts) + 2);
  if (config.use_analytic_candidates) {
    for (const auto& c : interior_candidates(model, params)) {
      starts.push_back(c);
    }
  }
  SplitMix64 shift_rng = make_stream(config.scramble_seed, 0x48414c54ULL);
  double shift[4];
  for (double& s : shift) s = shift_rng.uniform01();
  for (int k = 0; k < config.n_starts; ++k) {
    PopulationState s;
    double coords[4];
    for (int d = 0; d < 4; ++d) {
      double v = radical_inverse(static_cast<std::uint64_t>(k) + 1,
                                 kHaltonBases[d]) +
                 shift[d];
      v -= std::floor(v);
      coords[d] = 0.001 + 0.998 * v;
    }
    s.x = coords[0];
    s.y = coords[1];
    s.z = coords[2];
    s.w = coords[3];
    starts.push_back(s);
  }

  std::vector<InteriorEquilibrium> found;
  for (const auto& start : starts) {
    const NewtonOutcome outcome = newton_solve(model, params, start, config);
    if (!outcome.converged) continue;
    bool merged = false;
    for (auto& existing : found) {
      if (linf_distance(existing.point, outcome.point) <= config.dedup_tol) {
        if (outcome.residual < existing.residual) {
          existing = {outcome.point, outcome.residual};
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      found.push_back({outcome.point, outcome.residual});
    }
  }

  // At most two interior equilibria exist; anything beyond that is numerical
  // debris, so keep the best-converged pair.
  if (found.size() > 2) {
    std::sort(found.begin(), found.end(),
              [](const InteriorEquilibrium& a, const InteriorEquilibrium& b) {
                return a.residual < b.residual;
              });
    found.resize(2);
  }
  std::sort(found.begin(), found.end(),
            [](const InteriorEquilibrium& a, const InteriorEquilibrium& b) {
              if (a.point.x != b.point.x) return a.point.x < b.point.x;
              if (a.point.y != b.point.y) return a.point.y < b.point.y;
              if (a.point.z != b.point.z) return a.point.z < b.point.z;
              return a.point.w < b.point.w;
            });
  return found;
}

bool GridScanResult::contains_point(const PopulationState& p) const {
  if (nodes_per_axis < 2) return false;
  const double n = static_cast<double>(nodes_per_axis);
  auto cell_of = [&](double coord) {
    int k = static_cast<int>(std::floor(coord * n - 0.5));
    return std::min(nodes_per_axis - 2, std::max(0, k));
  };
  const std::array<int, 4> cell = {cell_of(p.x), cell_of(p.y), cell_of(p.z),
                                   cell_of(p.w)};
  return std::find(flagged_cells.begin(), flagged_cells.end(), cell) !=
         flagged_cells.end();
}

GridScanResult grid_scan(Model model, const GovernanceParams& params,
                         int nodes_per_axis) {
  validate_params(params);
  const int n = nodes_per_axis;
  if (n < 2) {
    throw std::invalid_argument("nodes_per_axis must be >= 2");
  }

  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    g[static_cast<std::size_t>(k)] = (k + 0.5) / static_cast<double>(n);
  }

  GridScanResult result;
  result.nodes_per_axis = n;

  // Each component depends on at most three coordinates, so single-sign
  // checks run on small subgrids. A flagged cell needs both signs in every
  // component, hence one single-signed component proves emptiness.
  struct Deps {
    bool x, y, z, w;
  };
  const bool is_one = model == Model::InvestigateDevelopers;
  const Deps deps[4] = {
      {false, true, false, false},
      is_one ? Deps{true, false, true, false} : Deps{true, false, true, true},
      is_one ? Deps{true, true, false, true} : Deps{true, true, false, true},
      {true, true, true, false},
  };

  auto component_value = [&](int role, double x, double y, double z,
                             double w) {
    return closed_form_difference(model, kAllRoles[role], {x, y, z, w},
                                  params);
  };

  for (int role = 0; role < 4; ++role) {
    bool has_pos = false, has_neg = false;
    const Deps& d = deps[role];
    const int nx = d.x ? n : 1, ny = d.y ? n : 1, nz = d.z ? n : 1,
              nw = d.w ? n : 1;
    for (int ix = 0; ix < nx && !(has_pos && has_neg); ++ix)
      for (int iy = 0; iy < ny && !(has_pos && has_neg); ++iy)
        for (int iz = 0; iz < nz && !(has_pos && has_neg); ++iz)
          for (int iw = 0; iw < nw; ++iw) {
            const double v = component_value(
                role, g[static_cast<std::size_t>(d.x ? ix : 0)],
                g[static_cast<std::size_t>(d.y ? iy : 0)],
                g[static_cast<std::size_t>(d.z ? iz : 0)],
                g[static_cast<std::size_t>(d.w ? iw : 0)]);
            if (v > 0.0) has_pos = true;
            if (v < 0.0) has_neg = true;
            if (has_pos && has_neg) break;
          }
    if (!(has_pos && has_neg)) {
      result.single_signed_component = kAllRoles[role];
      return result;
    }
  }

  // Full enumeration with rolling x-slices; components are precomputed on
  // their dependency subgrids.
  std::vector<double> f1(static_cast<std::size_t>(n));
  for (int iy = 0; iy < n; ++iy) {
    f1[static_cast<std::size_t>(iy)] =
        component_value(0, g[0], g[static_cast<std::size_t>(iy)], g[0], g[0]);
  }

  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  auto slice_index = [n](int a, int b) {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(b);
  };

  // Per-x slices: f2 over z (Model II also w), f3 over (y,w), f4 over (y,z).
  auto fill_slices = [&](int ix, std::vector<double>& s2,
                         std::vector<double>& s3, std::vector<double>& s4) {
    const double x = g[static_cast<std::size_t>(ix)];
    if (is_one) {
      for (int iz = 0; iz < n; ++iz) {
        s2[static_cast<std::size_t>(iz)] =
            component_value(1, x, g[0], g[static_cast<std::size_t>(iz)], g[0]);
      }
    } else {
      for (int iz = 0; iz < n; ++iz)
        for (int iw = 0; iw < n; ++iw)
          s2[slice_index(iz, iw)] = component_value(
              1, x, g[0], g[static_cast<std::size_t>(iz)],
              g[static_cast<std::size_t>(iw)]);
    }
    for (int iy = 0; iy < n; ++iy)
      for (int iw = 0; iw < n; ++iw)
        s3[slice_index(iy, iw)] =
            component_value(2, x, g[static_cast<std::size_t>(iy)], g[0],
                            g[static_cast<std::size_t>(iw)]);
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz)
        s4[slice_index(iy, iz)] =
            component_value(3, x, g[static_cast<std::size_t>(iy)],
                            g[static_cast<std::size_t>(iz)], g[0]);
  };

  const std::size_t s2_size = is_one ? static_cast<std::size_t>(n) : nn;
  std::vector<double> s2_lo(s2_size), s2_hi(s2_size);
  std::vector<double> s3_lo(nn), s3_hi(nn), s4_lo(nn), s4_hi(nn);
  fill_slices(0, s2_lo, s3_lo, s4_lo);

  for (int ix = 0; ix + 1 < n; ++ix) {
    fill_slices(ix + 1, s2_hi, s3_hi, s4_hi);
    for (int iy = 0; iy + 1 < n; ++iy) {
      const double f1_lo = f1[static_cast<std::size_t>(iy)];
      const double f1_hi = f1[static_cast<std::size_t>(iy) + 1];
      const bool c1 = (f1_lo > 0.0 || f1_hi > 0.0) &&
                      (f1_lo < 0.0 || f1_hi < 0.0);
      if (!c1) continue;
      for (int iz = 0; iz + 1 < n; ++iz) {
        bool c4_pos = false, c4_neg = false;
        for (const auto* s4 : {&s4_lo, &s4_hi})
          for (int dy = 0; dy < 2; ++dy)
            for (int dz = 0; dz < 2; ++dz) {
              const double v = (*s4)[slice_index(iy + dy, iz + dz)];
              c4_pos = c4_pos || v > 0.0;
              c4_neg = c4_neg || v < 0.0;
            }
        if (!(c4_pos && c4_neg)) continue;

        bool c2_pos = false, c2_neg = false;
        if (is_one) {
          for (const auto* s2 : {&s2_lo, &s2_hi})
            for (int dz = 0; dz < 2; ++dz) {
              const double v = (*s2)[static_cast<std::size_t>(iz + dz)];
              c2_pos = c2_pos || v > 0.0;
              c2_neg = c2_neg || v < 0.0;
            }
        }

        for (int iw = 0; iw + 1 < n; ++iw) {
          if (!is_one) {
            c2_pos = c2_neg = false;
            for (const auto* s2 : {&s2_lo, &s2_hi})
              for (int dz = 0; dz < 2; ++dz)
                for (int dw = 0; dw < 2; ++dw) {
                  const double v = (*s2)[slice_index(iz + dz, iw + dw)];
                  c2_pos = c2_pos || v > 0.0;
                  c2_neg = c2_neg || v < 0.0;
                }
          }
          if (!(c2_pos && c2_neg)) continue;

          bool c3_pos = false, c3_neg = false;
          for (const auto* s3 : {&s3_lo, &s3_hi})
            for (int dy = 0; dy < 2; ++dy)
              for (int dw = 0; dw < 2; ++dw) {
                const double v = (*s3)[slice_index(iy + dy, iw + dw)];
                c3_pos = c3_pos || v > 0.0;
                c3_neg = c3_neg || v < 0.0;
              }
          if (!(c3_pos && c3_neg)) continue;

          result.flagged_cells.push_back({ix, iy, iz, iw});
        }
      }
    }
    std::swap(s2_lo, s2_hi);
    std::swap(s3_lo, s3_hi);
    std::swap(s4_lo, s4_hi);
  }
  return result;
}

ParameterRanges default_census_ranges() { return ParameterRanges{}; }

GovernanceParams sample_params(const ParameterRanges& ranges,
                               std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng = make_stream(seed, index);
  auto draw = [&](const std::array<double, 2>& r) {
    return r[0] + (r[1] - r[0]) * rng.uniform01();
  };
  GovernanceParams p;
  p.b_i = draw(ranges.b_i);
  p.b_u = draw(ranges.b_u);
  p.b_p = draw(ranges.b_p);
  p.b_r = draw(ranges.b_r);
  p.c_i = draw(ranges.c_i);
  p.c_p = draw(ranges.c_p);
  p.c_r = draw(ranges.c_r);
  p.c_w = draw(ranges.c_w);
  p.v = draw(ranges.v);
  if (ranges.u_upper_is_5v) {
    p.u = 5.0 * p.v * rng.uniform01();
  } else {
    p.u = draw(ranges.u);
  }
  p.b_fo = draw(ranges.b_fo);
  p.epsilon = draw(ranges.epsilon);
  p.p_w = draw(ranges.p_w);
  return p;
}

EquilibriumCensus census_interior_equilibria(Model model,
                                             const ParameterRanges& ranges,
                                             std::uint64_t n_samples,
                                             std::uint64_t seed, int threads) {
  EquilibriumCensus census;
  census.n_samples = n_samples;
  census.seed = seed;
  census.ranges = ranges;

  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(n_threads),
                              std::max<std::uint64_t>(1, n_samples)));

  std::mutex merge_mutex;
  std::vector<std::thread> workers;
  std::uint64_t chunk = n_samples / static_cast<std::uint64_t>(n_threads);
  std::uint64_t rem = n_samples % static_cast<std::uint64_t>(n_threads);
  std::uint64_t begin = 0;
  for (int t = 0; t < n_threads; ++t) {
    const std::uint64_t count = chunk + (static_cast<std::uint64_t>(t) < rem);
    const std::uint64_t lo = begin;
    begin += count;
    workers.emplace_back([&, lo, count]() {
      std::map<int, std::uint64_t> local;
      for (std::uint64_t i = lo; i < lo + count; ++i) {
        const GovernanceParams p = sample_params(ranges, seed, i);
        const auto interior = find_interior_equilibria(model, p);
        local[static_cast<int>(interior.size())]++;
      }
      std::lock_guard<std::mutex> lock(merge_mutex);
      for (const auto& [k, v] : local) {
        census.histogram[k] += v;
      }
    });
  }
  for (auto& w : workers) w.join();
  return census;
}

std::vector<EdgeFamily> edge_equilibrium_families(Model model) {
  std::vector<EdgeFamily> families;
  if (model == Model::InvestigateDevelopers) {
    families.push_back({Role::User, {1.0, 0.0, 0.0, 0.0}});
    families.push_back({Role::User, {1.0, 0.0, 0.0, 1.0}});
  } else {
    families.push_back({Role::User, {1.0, 0.0, 0.0, 0.0}});
    families.push_back({Role::User, {1.0, 0.0, 1.0, 0.0}});
  }
  return families;
}

std::vector<BoundaryEquilibrium> boundary_equilibria(
    Model model, const GovernanceParams& params, const SearchConfig& config) {
  validate_params(params);
  std::vector<BoundaryEquilibrium> found;

  constexpr std::uint64_t kFaceBases[3] = {2, 3, 5};
  const int starts_per_face = std::max(8, config.n_starts / 2);

  for (int pinned_axis = 0; pinned_axis < 4; ++pinned_axis) {
    for (double bound : {0.0, 1.0}) {
      int free_axes[3];
      int nf = 0;
      for (int a = 0; a < 4; ++a) {
        if (a != pinned_axis) free_axes[nf++] = a;
      }

      auto eval3 = [&](const Eigen::Vector3d& q, Eigen::Vector3d& f) {
        PopulationState s;
        double coords[4];
        coords[pinned_axis] = bound;
        for (int k = 0; k < 3; ++k) coords[free_axes[k]] = q[k];
        s = {coords[0], coords[1], coords[2], coords[3]};
        const auto d = closed_form_differences(model, s, params);
        for (int k = 0; k < 3; ++k) f[k] = d[free_axes[k]];
      };

      for (int st = 0; st < starts_per_face; ++st) {
        Eigen::Vector3d q;
        for (int k = 0; k < 3; ++k) {
          q[k] = 0.02 + 0.96 * radical_inverse(
                                   static_cast<std::uint64_t>(st) + 1,
                                   kFaceBases[k]);
        }
        Eigen::Vector3d f;
        eval3(q, f);
        double fnorm = f.lpNorm<Eigen::Infinity>();
        bool failed = false;
        for (int iter = 0; iter < config.max_iterations; ++iter) {
          if (fnorm < 0.1 * config.residual_tol) break;
          if (q.lpNorm<Eigen::Infinity>() > 4.0) {
            failed = true;
            break;
          }
          PopulationState s;
          double coords[4];
          coords[pinned_axis] = bound;
          for (int k = 0; k < 3; ++k) coords[free_axes[k]] = q[k];
          s = {coords[0], coords[1], coords[2], coords[3]};
          const auto jac = closed_form_jacobian(model, s, params);
          Eigen::Matrix3d J;
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
              J(r, c) = jac[free_axes[r]][free_axes[c]];
          Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
          if (!lu.isInvertible()) {
            failed = true;
            break;
          }
          Eigen::Vector3d step = lu.solve(-f);
          double scale = 1.0;
          bool accepted = false;
          for (int halving = 0; halving < 30; ++halving) {
            Eigen::Vector3d qn = q + scale * step;
            Eigen::Vector3d fn;
            eval3(qn, fn);
            const double fnn = fn.lpNorm<Eigen::Infinity>();
            if (fnn < fnorm) {
              q = qn;
              f = fn;
              fnorm = fnn;
              accepted = true;
              break;
            }
            scale *= 0.5;
          }
          if (!accepted) {
            failed = true;
            break;
          }
        }
        if (failed || fnorm >= config.residual_tol) continue;
        bool interior = true;
        for (int k = 0; k < 3; ++k) {
          if (!(q[k] >= config.interior_margin &&
                q[k] <= 1.0 - config.interior_margin)) {
            interior = false;
            break;
          }
        }
        if (!interior) continue;

        PopulationState point;
        double coords[4];
        coords[pinned_axis] = bound;
        for (int k = 0; k < 3; ++k) coords[free_axes[k]] = q[k];
        point = {coords[0], coords[1], coords[2], coords[3]};

        bool merged = false;
        for (auto& existing : found) {
          if (linf_distance(existing.point, point) <= config.dedup_tol) {
            if (fnorm < existing.residual) {
              existing.point = point;
              existing.residual = fnorm;
            }
            merged = true;
            break;
          }
        }
        if (!merged) {
          found.push_back(
              {point, kAllRoles[pinned_axis], fnorm});
        }
      }
    }
  }
  return found;
}

}  // namespace govgame
