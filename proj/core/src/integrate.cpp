#include "govgame/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace govgame {

namespace {

using Vec4 = std::array<double, 4>;

Vec4 to_vec(const PopulationState& s) { return {s.x, s.y, s.z, s.w}; }
PopulationState to_state(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

Vec4 eval_rhs(Model model, const Vec4& v, const GovernanceParams& params) {
  const StateDerivative d = rhs(model, to_state(v), params);
  return {d.dx, d.dy, d.dz, d.dw};
}

double max_abs(const Vec4& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])),
                  std::max(std::abs(v[2]), std::abs(v[3])));
}

void clamp_unit(Vec4& v) {
  for (double& c : v) {
    c = std::min(1.0, std::max(0.0, c));
  }
}

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                 kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  Vec4 r1{}, r2{}, r3{}, r4{}, r5{};

  Vec4 eval(double t) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    Vec4 out;
    for (int i = 0; i < 4; ++i) {
      out[i] = r1[i] +
               theta * (r2[i] +
                        theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
    }
    return out;
  }
};

}  // namespace

Trajectory integrate(Model model, PopulationState initial,
                     const GovernanceParams& params,
                     const IntegratorConfig& config) {
  validate_params(params);
  if (!(config.t_end > 0.0)) {
    throw IntegrationError("t_end must be positive");
  }

  const double sample_dt =
      config.sample_dt > 0.0 ? config.sample_dt : config.t_end / 500.0;

  Vec4 y = to_vec(initial);
  clamp_unit(y);
  double t = 0.0;
  double h = std::min(config.initial_step, config.t_end);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(to_state(y));
  double next_sample = sample_dt;

  Vec4 k1 = eval_rhs(model, y, params);
  long steps = 0;

  auto emit_until = [&](double limit, const DenseSegment* seg,
                        const Vec4& fallback) {
    while (next_sample <= limit + 1e-12 * std::max(1.0, limit)) {
      const double ts = std::min(next_sample, config.t_end);
      Vec4 sample = seg ? seg->eval(ts) : fallback;
      clamp_unit(sample);
      traj.times.push_back(ts);
      traj.states.push_back(to_state(sample));
      next_sample += sample_dt;
      if (ts >= config.t_end) {
        break;
      }
    }
  };

  auto finish = [&](bool converged) {
    // Constant extension so the trajectory always reaches t_end.
    while (next_sample <= config.t_end + 1e-9 * config.t_end) {
      traj.times.push_back(std::min(next_sample, config.t_end));
      traj.states.push_back(to_state(y));
      next_sample += sample_dt;
    }
    if (traj.times.back() < config.t_end) {
      traj.times.push_back(config.t_end);
      traj.states.push_back(to_state(y));
    }
    traj.converged = converged;
    traj.final_residual = max_abs(eval_rhs(model, y, params));
  };

  if (max_abs(k1) < config.equilibrium_tol) {
    finish(true);
    return traj;
  }

  while (t < config.t_end) {
    if (++steps > config.max_steps) {
      throw IntegrationError("step limit exceeded at t=" + std::to_string(t));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow at t=" + std::to_string(t));
    }
    if (t + h > config.t_end) {
      h = config.t_end - t;
    }

    Vec4 k2, k3, k4, k5, k6, k7, yt, ynew;
    for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * kA21 * k1[i];
    k2 = eval_rhs(model, yt, params);
    for (int i = 0; i < 4; ++i)
      yt[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    k3 = eval_rhs(model, yt, params);
    for (int i = 0; i < 4; ++i)
      yt[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    k4 = eval_rhs(model, yt, params);
    for (int i = 0; i < 4; ++i)
      yt[i] = y[i] +
              h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
    k5 = eval_rhs(model, yt, params);
    for (int i = 0; i < 4; ++i)
      yt[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                          kA64 * k4[i] + kA65 * k5[i]);
    k6 = eval_rhs(model, yt, params);
    for (int i = 0; i < 4; ++i)
      ynew[i] = y[i] + h * (kA71 * k1[i] + kA73 * k3[i] + kA74 * k4[i] +
                            kA75 * k5[i] + kA76 * k6[i]);
    k7 = eval_rhs(model, ynew, params);

    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double sc =
          config.atol +
          config.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                            kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / 4.0);

    if (err <= 1.0) {
      DenseSegment seg;
      seg.t0 = t;
      seg.h = h;
      for (int i = 0; i < 4; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.r1[i] = y[i];
        seg.r2[i] = ydiff;
        seg.r3[i] = bspl;
        seg.r4[i] = ydiff - h * k7[i] - bspl;
        seg.r5[i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] +
                         kD5 * k5[i] + kD6 * k6[i] + kD7 * k7[i]);
      }
      emit_until(t + h, &seg, ynew);

      t += h;
      y = ynew;
      clamp_unit(y);
      k1 = eval_rhs(model, y, params);  // FSAL, recomputed after clamping

      if (max_abs(k1) < config.equilibrium_tol) {
        finish(true);
        return traj;
      }

      const double fac =
          err == 0.0 ? 10.0
                     : std::min(10.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h *= fac;
    } else {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= std::min(1.0, fac);
    }
  }

  finish(max_abs(k1) < config.equilibrium_tol);
  return traj;
}

}  // namespace govgame
