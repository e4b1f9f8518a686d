#ifndef RICCATI_INTEGRATE_HPP
#define RICCATI_INTEGRATE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riccati/error.hpp"
#include "riccati/matrix.hpp"
#include "riccati/ode.hpp"
#include "riccati/problem.hpp"

namespace riccati {

namespace detail {

inline CMatrix unpack(std::span<const cplx> flat, std::size_t n, std::size_t offset = 0) {
  return CMatrix(n, std::vector<cplx>(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                                      flat.begin() + static_cast<std::ptrdiff_t>(offset + n * n)));
}

inline void pack(const CMatrix& m, std::span<cplx> out, std::size_t offset = 0) {
  std::copy(m.data().begin(), m.data().end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
}

inline std::vector<cplx> flatten(const CMatrix& m) {
  return std::vector<cplx>(m.data().begin(), m.data().end());
}

inline double end_time(const RiccatiProblem& prob, const IntegratorOptions& opts) {
  return opts.t_end > 0.0 ? opts.t_end : prob.horizon;
}

}  // namespace detail

struct SampleDiagnostics {
  double norm = 0.0;          ///< ||Z||_F
  double min_eig_herm = 0.0;  ///< smallest eigenvalue of Z + Z*
  double step = 0.0;
};

/// Solution samples of a matrix ODE together with its termination status.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t n, DenseSolution dense, TrajectoryStatus status)
      : n_(n), dense_(std::move(dense)), status_(std::move(status)) {
    samples_.reserve(dense_.t.size());
    diagnostics_.reserve(dense_.t.size());
    for (std::size_t k = 0; k < dense_.t.size(); ++k) {
      CMatrix z(n_, dense_.y[k]);
      const std::vector<double> ev = hermitian_part_eigenvalues(z);
      diagnostics_.push_back({frobenius_norm(z), 2.0 * ev.front(), dense_.step[k]});
      samples_.push_back(std::move(z));
    }
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<double>& times() const noexcept { return dense_.t; }
  const std::vector<CMatrix>& samples() const noexcept { return samples_; }
  const std::vector<SampleDiagnostics>& diagnostics() const noexcept { return diagnostics_; }
  const TrajectoryStatus& status() const noexcept { return status_; }
  const DenseSolution& dense() const noexcept { return dense_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double start_time() const { return dense_.t.front(); }
  double end_time() const { return dense_.t.back(); }

  /// Dense output (cubic Hermite).
  CMatrix at(double t) const { return CMatrix(n_, dense_.interpolate(t)); }

  std::vector<CMatrix> resample(const std::vector<double>& grid) const {
    std::vector<CMatrix> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(at(t));
    return out;
  }

 private:
  std::size_t n_ = 0;
  DenseSolution dense_;
  TrajectoryStatus status_;
  std::vector<CMatrix> samples_;
  std::vector<SampleDiagnostics> diagnostics_;
};

// ---------------------------------------------------------------------------

struct StepOutcome {
  CMatrix z_next;
  double error_estimate = 0.0;  ///< ||Z5 - Z4||_F
};

/// One embedded Dormand-Prince 5(4) step of Z' = rhs(prob, t, Z).
inline StepOutcome step_rk(const RiccatiProblem& prob, double t, const CMatrix& z, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  if (!all_finite(z)) throw Error(ErrorCode::Overflow, "non-finite input state", t);
  const std::size_t n = prob.n;
  auto f = [&](double tt, double anchor, std::span<const cplx> y, std::span<cplx> dy) {
    detail::pack(rhs(prob, tt, detail::unpack(y, n), anchor), dy);
  };
  const std::vector<cplx> y = detail::flatten(z);
  std::vector<cplx> k1(y.size());
  f(t, t, y, k1);
  dopri::StepResult sr = dopri::step(f, t, y, k1, h);
  if (!dopri::finite(sr.y) || !dopri::finite(sr.err)) {
    throw Error(ErrorCode::Overflow, "non-finite entry after step", t);
  }
  return {CMatrix(n, std::move(sr.y)), dopri::l2(sr.err)};
}

/// Integrates the Riccati equation from Z(t0) = Z0 to the horizon (or
/// opts.t_end), stopping early on BLOWUP or STEP_UNDERFLOW.
inline Trajectory integrate_riccati(const RiccatiProblem& prob, const CMatrix& z0,
                                    const IntegratorOptions& opts = {}) {
  prob.validate();
  if (z0.n() != prob.n) throw Error(ErrorCode::DimMismatch, "Z0 dimension does not match problem");
  if (!all_finite(z0)) throw Error(ErrorCode::InvalidArgument, "Z0 must be finite");
  const std::size_t n = prob.n;
  const double t1 = detail::end_time(prob, opts);
  auto f = [&](double t, double anchor, std::span<const cplx> y, std::span<cplx> dy) {
    detail::pack(rhs(prob, t, detail::unpack(y, n), anchor), dy);
  };
  OdeResult r = integrate_adaptive(f, prob.t0, t1, detail::flatten(z0), prob.breakpoints(), opts, true);
  return Trajectory(n, std::move(r.solution), std::move(r.status));
}

// ---------------------------------------------------------------------------
// Linear system  Phi' = R Phi + P Psi,  Psi' = -S Phi - Q Psi

class LinearFlow {
 public:
  LinearFlow() = default;
  LinearFlow(std::size_t n, DenseSolution dense, TrajectoryStatus status)
      : n_(n), dense_(std::move(dense)), status_(std::move(status)) {
    for (const auto& y : dense_.y) {
      phi_.push_back(detail::unpack(y, n_, 0));
      psi_.push_back(detail::unpack(y, n_, n_ * n_));
      det_phi_.push_back(determinant(phi_.back()));
    }
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<double>& times() const noexcept { return dense_.t; }
  const std::vector<CMatrix>& phi_samples() const noexcept { return phi_; }
  const std::vector<CMatrix>& psi_samples() const noexcept { return psi_; }
  const std::vector<cplx>& det_phi() const noexcept { return det_phi_; }
  const TrajectoryStatus& status() const noexcept { return status_; }
  double start_time() const { return dense_.t.front(); }
  double end_time() const { return dense_.t.back(); }

  std::pair<CMatrix, CMatrix> at(double t) const {
    const std::vector<cplx> y = dense_.interpolate(t);
    return {detail::unpack(y, n_, 0), detail::unpack(y, n_, n_ * n_)};
  }

  cplx det_phi_at(double t) const { return determinant(at(t).first); }

 private:
  std::size_t n_ = 0;
  DenseSolution dense_;
  TrajectoryStatus status_;
  std::vector<CMatrix> phi_, psi_;
  std::vector<cplx> det_phi_;
};

/// Phi(t0) = I, Psi(t0) = Z0. Linear, so no blowup detection.
inline LinearFlow integrate_linear_system(const RiccatiProblem& prob, const CMatrix& z0,
                                          const IntegratorOptions& opts = {}) {
  prob.validate();
  if (z0.n() != prob.n) throw Error(ErrorCode::DimMismatch, "Z0 dimension does not match problem");
  const std::size_t n = prob.n;
  const std::size_t nn = n * n;
  const double t1 = detail::end_time(prob, opts);
  auto f = [&](double t, double anchor, std::span<const cplx> y, std::span<cplx> dy) {
    const CMatrix phi = detail::unpack(y, n, 0);
    const CMatrix psi = detail::unpack(y, n, nn);
    const CMatrix p = prob.P.eval(t, anchor), q = prob.Q.eval(t, anchor);
    const CMatrix r = prob.R.eval(t, anchor), s = prob.S.eval(t, anchor);
    detail::pack(r * phi + p * psi, dy, 0);
    detail::pack(-(s * phi) - q * psi, dy, nn);
  };
  std::vector<cplx> y0 = detail::flatten(CMatrix::identity(n));
  y0.insert(y0.end(), z0.data().begin(), z0.data().end());
  OdeResult r = integrate_adaptive(f, prob.t0, t1, std::move(y0), prob.breakpoints(), opts, false);
  return LinearFlow(n, std::move(r.solution), std::move(r.status));
}

inline constexpr double kPhiSingularRcond = 1e-10;

struct RadonResult {
  bool phi_singular = false;
  CMatrix z;           ///< Psi Phi^-1 when Phi is invertible
  double rcond = 0.0;  ///< 1 / (||Phi^-1||_1 max(||Phi||_1, ||Psi||_1))
};

/// Conditioning of Phi measured against the scale of the whole frame
/// [Phi; Psi]. For n = 1 the plain reciprocal condition number is always 1,
/// so the frame scale is what exposes a vanishing Phi.
inline RadonResult radon_frame(const CMatrix& phi, const CMatrix& psi,
                               double threshold = kPhiSingularRcond) {
  RadonResult r;
  InverseResult inv = invert(phi);
  const double frame = std::max(one_norm(phi), one_norm(psi));
  if (inv.rcond == 0.0 || frame == 0.0) {
    r.phi_singular = true;
    return r;
  }
  r.rcond = 1.0 / (one_norm(inv.inverse) * frame);
  r.phi_singular = r.rcond < threshold;
  if (!r.phi_singular) r.z = psi * inv.inverse;
  return r;
}

/// Z(t) = Psi(t) Phi(t)^-1, or PHI_SINGULAR.
inline RadonResult radon_continue(const LinearFlow& flow, double t,
                                  double threshold = kPhiSingularRcond) {
  const auto [phi, psi] = flow.at(t);
  return radon_frame(phi, psi, threshold);
}

/// First time at which Phi becomes singular relative to the frame, or nullopt.
/// Each node interval is sampled and the frame condition is minimized by
/// golden-section search around the sampled minimum; the crossing of the
/// threshold is then located by bisection.
inline std::optional<double> first_phi_singularity(const LinearFlow& flow,
                                                   double threshold = kPhiSingularRcond) {
  auto rho = [&](double t) { return radon_continue(flow, t, threshold).rcond; };
  const auto& ts = flow.times();
  if (ts.empty()) return std::nullopt;
  if (rho(ts.front()) < threshold) return ts.front();
  constexpr int kSamples = 16;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = ts[i], b = ts[i + 1];
    int best = 0;
    double best_val = rho(a);
    for (int k = 1; k <= kSamples; ++k) {
      const double v = rho(a + (b - a) * k / kSamples);
      if (v < best_val) {
        best_val = v;
        best = k;
      }
    }
    double lo = a + (b - a) * std::max(best - 1, 0) / kSamples;
    double hi = a + (b - a) * std::min(best + 1, kSamples) / kSamples;
    double t_min = a + (b - a) * best / kSamples;
    if (best_val >= threshold) {
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = rho(x1), f2 = rho(x2);
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = rho(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = rho(x2);
        }
        if (std::min(f1, f2) < threshold) break;
      }
      t_min = f1 < f2 ? x1 : x2;
      best_val = std::min(f1, f2);
    }
    if (best_val < threshold) {
      double left = a, right = t_min;
      for (int it = 0; it < 200 && right - left > 1e-15 * (1.0 + std::abs(right)); ++it) {
        const double mid = 0.5 * (left + right);
        (rho(mid) < threshold ? right : left) = mid;
      }
      return right;
    }
  }
  return std::nullopt;
}

/// Riccati trajectory reconstructed from the linear flow on `grid`; stops
/// with PHI_SINGULAR at the first singularity of Phi.
inline Trajectory radon_trajectory(const RiccatiProblem& prob, const LinearFlow& flow,
                                   const std::vector<double>& grid) {
  const std::optional<double> singular = first_phi_singularity(flow);
  DenseSolution d;
  d.dim = prob.n * prob.n;
  double prev = std::nan("");
  for (double t : grid) {
    if (singular && t >= *singular) break;
    const RadonResult r = radon_continue(flow, t);
    if (r.phi_singular) break;
    std::vector<cplx> dz = detail::flatten(rhs(prob, t, r.z));
    d.t.push_back(t);
    d.y.push_back(detail::flatten(r.z));
    d.dy_end.push_back(dz);
    d.dy_start.push_back(std::move(dz));
    d.step.push_back(std::isnan(prev) ? 0.0 : t - prev);
    prev = t;
  }
  if (d.t.empty()) throw Error(ErrorCode::Singular, "Phi singular on the whole grid");
  TrajectoryStatus st;
  if (singular && *singular <= grid.back()) {
    st = {Termination::PhiSingular, *singular, "Phi singular"};
  } else {
    st = {Termination::Completed, d.t.back(), ""};
  }
  return Trajectory(prob.n, std::move(d), std::move(st));
}

// ---------------------------------------------------------------------------
// Liouville formula check

namespace detail {

template <class F>
cplx adaptive_simpson(const F& f, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole,
                      double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const cplx flm = f(lm), frm = f(rm);
  const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
template <class F>
cplx integrate_simpson(const F& f, double a, double b, double tol) {
  if (b <= a) return {};
  const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

inline constexpr double kLiouvilleQuadTol = 1e-9;

/// integral of tr[R + P Z] over [t0, t], Z from the trajectory's dense output.
/// Quadrature runs node interval by node interval so breakpoints are never
/// straddled.
inline cplx liouville_exponent(const RiccatiProblem& prob, const Trajectory& traj, double t) {
  const auto& ts = traj.times();
  const double t0 = ts.front();
  const double span = std::max(t - t0, 1e-300);
  cplx total{};
  for (std::size_t i = 0; i + 1 < ts.size() && ts[i] < t; ++i) {
    const double a = ts[i], b = std::min(ts[i + 1], t);
    const double anchor = 0.5 * (a + b);
    auto integrand = [&](double tau) {
      return trace(prob.R.eval(tau, anchor) + prob.P.eval(tau, anchor) * traj.at(tau));
    };
    total += detail::integrate_simpson(integrand, a, b, kLiouvilleQuadTol * (b - a) / span);
  }
  return total;
}

/// |det Phi(t) - det Phi(t0) exp(int tr[R + P Z])| / max(|lhs|, |rhs|)
inline double liouville_residual(const RiccatiProblem& prob, const LinearFlow& flow,
                                 const Trajectory& traj, double t) {
  const cplx lhs = flow.det_phi_at(t);
  const cplx rhs_val = flow.det_phi_at(flow.start_time()) * std::exp(liouville_exponent(prob, traj, t));
  const double scale = std::max({std::abs(lhs), std::abs(rhs_val), 1e-300});
  return std::abs(lhs - rhs_val) / scale;
}

// ---------------------------------------------------------------------------

/// Z' + A* Z + Z A + S = 0, the linear comparison equation.
inline Trajectory integrate_lyapunov(const MatrixTimeFn& a, const MatrixTimeFn& s, const CMatrix& z0,
                                     double t0, double t1, const IntegratorOptions& opts = {}) {
  const std::size_t n = a.n();
  if (s.n() != n || z0.n() != n) throw Error(ErrorCode::DimMismatch, "Lyapunov data dimensions differ");
  if (hermiticity_defect(z0) > kDefaultDefinitenessTol) {
    throw Error(ErrorCode::InvalidArgument, "Lyapunov initial value must be Hermitian");
  }
  if (!(t1 > t0)) throw Error(ErrorCode::InvalidArgument, "t1 must exceed t0");
  auto f = [&](double t, double anchor, std::span<const cplx> y, std::span<cplx> dy) {
    const CMatrix z = detail::unpack(y, n);
    const CMatrix at = a.eval(t, anchor);
    detail::pack(-(adjoint(at) * z + z * at + s.eval(t, anchor)), dy);
  };
  std::vector<double> bps = a.breakpoints();
  for (double b : s.breakpoints()) bps.push_back(b);
  OdeResult r = integrate_adaptive(f, t0, t1, detail::flatten(z0), std::move(bps), opts, false);
  return Trajectory(n, std::move(r.solution), std::move(r.status));
}

}  // namespace riccati

#endif  // RICCATI_INTEGRATE_HPP
