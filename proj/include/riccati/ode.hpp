#ifndef RICCATI_ODE_HPP
#define RICCATI_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riccati/matrix.hpp"

namespace riccati {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_init = 0.0;  ///< 0 selects the starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  /// Steps below h_min * (1 + |t|) give up.
  double h_min = 1e-15;
  double blowup_threshold = 1e8;
  /// Blowup also requires the accepted step to fall below collapse * (1 + t).
  double step_collapse = 1e-10;
  std::size_t max_steps = 5'000'000;
  /// Overrides the problem horizon when positive.
  double t_end = 0.0;
};

enum class Termination { Completed, Blowup, PhiSingular, StepUnderflow };

inline const char* to_string(Termination k) {
  switch (k) {
    case Termination::Completed: return "COMPLETED";
    case Termination::Blowup: return "BLOWUP";
    case Termination::PhiSingular: return "PHI_SINGULAR";
    case Termination::StepUnderflow: return "STEP_UNDERFLOW";
  }
  return "?";
}

struct TrajectoryStatus {
  Termination kind = Termination::Completed;
  double time = 0.0;  ///< horizon, escape time, or the time integration stopped
  std::string message;
};

/// Accepted nodes of an integration with Hermite dense output. Each node
/// keeps two derivatives so that breakpoints (where the right-hand side jumps)
/// interpolate with the correct one-sided slope.
struct DenseSolution {
  std::size_t dim = 0;
  std::vector<double> t;
  std::vector<std::vector<cplx>> y;
  std::vector<std::vector<cplx>> dy_end;    ///< slope at node, from the interval ending here
  std::vector<std::vector<cplx>> dy_start;  ///< slope at node, for the interval starting here
  std::vector<double> step;                 ///< step that produced the node (0 at start)
  /// Per interval: the quartic term of the Dormand-Prince continuous
  /// extension. Empty for solutions assembled from samples, which fall back
  /// to cubic Hermite.
  std::vector<std::vector<cplx>> quartic;

  bool empty() const noexcept { return t.empty(); }
  double front_time() const { return t.front(); }
  double back_time() const { return t.back(); }

  std::size_t interval(double tq) const {
    if (t.size() < 2 || tq <= t.front()) return 0;
    if (tq >= t.back()) return t.size() - 2;
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    return static_cast<std::size_t>(it - t.begin()) - 1;
  }

  /// Fourth-order continuous extension when available, else cubic Hermite;
  /// clamps outside the covered range.
  std::vector<cplx> interpolate(double tq) const {
    if (t.size() == 1 || tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    const std::size_t i = interval(tq);
    const double h = t[i + 1] - t[i];
    const double s = (tq - t[i]) / h;
    if (quartic.size() + 1 == t.size()) {
      // y0 + s (r2 + (1-s) (r3 + s (r4 + (1-s) r5)))
      std::vector<cplx> out(dim);
      const double s1 = 1.0 - s;
      for (std::size_t k = 0; k < dim; ++k) {
        const cplx r2 = y[i + 1][k] - y[i][k];
        const cplx r3 = h * dy_start[i][k] - r2;
        const cplx r4 = r2 - h * dy_end[i + 1][k] - r3;
        out[k] = y[i][k] + s * (r2 + s1 * (r3 + s * (r4 + s1 * quartic[i][k])));
      }
      return out;
    }
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    std::vector<cplx> out(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      out[k] = h00 * y[i][k] + h10 * h * dy_start[i][k] + h01 * y[i + 1][k] +
               h11 * h * dy_end[i + 1][k];
    }
    return out;
  }
};

struct OdeResult {
  DenseSolution solution;
  TrajectoryStatus status;
};

namespace dopri {

// Dormand-Prince 5(4)
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b5 - b4
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension (Hairer, Norsett & Wanner)
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct StepResult {
  std::vector<cplx> y;    ///< fifth-order solution
  std::vector<cplx> k7;   ///< slope at the end of the step (FSAL)
  std::vector<cplx> err;  ///< y5 - y4
  std::vector<cplx> quartic;  ///< dense-output coefficient h * sum d_i k_i
};

/// One step from (t, y) with slope k1. `f(t, anchor, y, dy)` evaluates the
/// right-hand side; every stage uses anchor = t.
template <class F>
StepResult step(F& f, double t, std::span<const cplx> y, std::span<const cplx> k1, double h) {
  const std::size_t m = y.size();
  std::vector<cplx> k2(m), k3(m), k4(m), k5(m), k6(m), tmp(m);
  StepResult r{std::vector<cplx>(m), std::vector<cplx>(m), std::vector<cplx>(m), std::vector<cplx>(m)};

  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
  f(t + c2 * h, t, std::span<const cplx>(tmp), std::span<cplx>(k2));
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(t + c3 * h, t, std::span<const cplx>(tmp), std::span<cplx>(k3));
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * h, t, std::span<const cplx>(tmp), std::span<cplx>(k4));
  for (std::size_t i = 0; i < m; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * h, t, std::span<const cplx>(tmp), std::span<cplx>(k5));
  for (std::size_t i = 0; i < m; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(t + h, t, std::span<const cplx>(tmp), std::span<cplx>(k6));
  for (std::size_t i = 0; i < m; ++i)
    r.y[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
  f(t + h, t, std::span<const cplx>(r.y), std::span<cplx>(r.k7));
  for (std::size_t i = 0; i < m; ++i)
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
  for (std::size_t i = 0; i < m; ++i)
    r.quartic[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * r.k7[i]);
  return r;
}

inline bool finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

inline double l2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

/// RMS of err_i / (atol + rtol max(|y_i|, |ynew_i|)).
inline double scaled_error(std::span<const cplx> err, std::span<const cplx> y,
                           std::span<const cplx> ynew, const IntegratorOptions& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    const double q = std::abs(err[i]) / sc;
    s += q * q;
  }
  return err.empty() ? 0.0 : std::sqrt(s / static_cast<double>(err.size()));
}

template <class F>
double initial_step(F& f, double t0, std::span<const cplx> y0, std::span<const cplx> f0,
                    const IntegratorOptions& o) {
  const std::size_t m = y0.size();
  auto rms = [&](std::span<const cplx> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double sc = o.atol + o.rtol * std::abs(y0[i]);
      s += std::norm(v[i]) / (sc * sc);
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(m, 1)));
  };
  const double d0 = rms(y0), d1 = rms(f0);
  const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  std::vector<cplx> y1(m), f1(m), diff(m);
  for (std::size_t i = 0; i < m; ++i) y1[i] = y0[i] + h0 * f0[i];
  f(t0 + h0, t0, std::span<const cplx>(y1), std::span<cplx>(f1));
  for (std::size_t i = 0; i < m; ++i) diff[i] = f1[i] - f0[i];
  const double d2 = rms(diff) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min(100.0 * h0, h1);
}

}  // namespace dopri

/// Adaptive Dormand-Prince integration of y' = f(t, y) on [t0, t1].
/// Breakpoints are forced step endpoints; after one the slope is re-evaluated
/// with the right-hand definition. With `detect_blowup`, integration stops
/// with BLOWUP when ||y|| exceeds the threshold while the accepted step has
/// collapsed; an underflowing step without norm growth is STEP_UNDERFLOW.
template <class F>
OdeResult integrate_adaptive(F&& f, double t0, double t1, std::vector<cplx> y0,
                             std::vector<double> breakpoints, const IntegratorOptions& opts,
                             bool detect_blowup) {
  const std::size_t m = y0.size();
  OdeResult res;
  DenseSolution& sol = res.solution;
  sol.dim = m;

  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> stops;
  for (double b : breakpoints)
    if (b > t0 && b < t1) stops.push_back(b);
  stops.push_back(t1);
  std::size_t next = 0;

  double t = t0;
  std::vector<cplx> y = std::move(y0);
  std::vector<cplx> k1(m);
  f(t, t, std::span<const cplx>(y), std::span<cplx>(k1));
  sol.t.push_back(t);
  sol.y.push_back(y);
  sol.dy_end.push_back(k1);
  sol.dy_start.push_back(k1);
  sol.step.push_back(0.0);

  double h = opts.h_init > 0.0 ? opts.h_init : dopri::initial_step(f, t, y, k1, opts);
  h = std::min({h, opts.h_max, t1 - t0});
  bool last_rejected = false;
  std::size_t steps = 0;

  auto finish = [&](Termination kind, double when, std::string msg) {
    res.status = {kind, when, std::move(msg)};
    return res;
  };

  while (t < t1) {
    if (++steps > opts.max_steps) {
      return finish(Termination::StepUnderflow, t, "maximum step count exceeded");
    }
    const double stop = stops[next];
    bool land = false;
    if (t + h >= stop - 1e-14 * (1.0 + std::abs(stop))) {
      h = stop - t;
      land = true;
    }
    const double h_floor = opts.h_min * (1.0 + std::abs(t));

    dopri::StepResult sr = dopri::step(f, t, y, k1, h);
    const bool ok = dopri::finite(sr.y) && dopri::finite(sr.k7) && dopri::finite(sr.err);
    const double err = ok ? dopri::scaled_error(sr.err, y, sr.y, opts)
                          : std::numeric_limits<double>::infinity();

    if (ok && err <= 1.0) {
      const double tn = land ? stop : t + h;
      std::vector<cplx> k_start = sr.k7;
      if (land && stop < t1) {
        f(tn, tn, std::span<const cplx>(sr.y), std::span<cplx>(k_start));
        ++next;
      }
      sol.t.push_back(tn);
      sol.y.push_back(sr.y);
      sol.dy_end.push_back(sr.k7);
      sol.dy_start.push_back(k_start);
      sol.step.push_back(h);
      sol.quartic.push_back(std::move(sr.quartic));
      t = tn;
      y = std::move(sr.y);
      k1 = std::move(k_start);

      if (detect_blowup) {
        const double norm = dopri::l2(y);
        if ((norm > opts.blowup_threshold && h < opts.step_collapse * (1.0 + std::abs(t))) ||
            norm > 1e150) {
          return finish(Termination::Blowup, t, "norm " + std::to_string(norm));
        }
      }
      double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, opts.h_max);
      last_rejected = false;
    } else {
      const double fac = ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h *= fac;
      last_rejected = true;
      if (h < h_floor) {
        const double norm = dopri::l2(y);
        if (detect_blowup && norm > opts.blowup_threshold) {
          return finish(Termination::Blowup, t, "step underflow at norm " + std::to_string(norm));
        }
        return finish(Termination::StepUnderflow, t, "step size underflow");
      }
    }
  }
  return finish(Termination::Completed, t, "");
}

}  // namespace riccati

#endif  // RICCATI_ODE_HPP
