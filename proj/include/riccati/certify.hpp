#ifndef RICCATI_CERTIFY_HPP
#define RICCATI_CERTIFY_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "riccati/error.hpp"
#include "riccati/integrate.hpp"
#include "riccati/matrix.hpp"
#include "riccati/problem.hpp"
#include "riccati/timefn.hpp"

namespace riccati {

/// Check grid of a certificate: uniform at `grid_density` on [t0, horizon]
/// plus every coefficient and certificate breakpoint.
inline std::vector<double> certificate_grid(const Certificate& cert, const RiccatiProblem& prob) {
  std::vector<double> extra = prob.breakpoints();
  for (double b : cert.breakpoints()) extra.push_back(b);
  return check_grid(prob.t0, prob.horizon, cert.grid_density, extra);
}

struct ConditionI {
  bool pass = true;
  double worst_defect = 0.0;   ///< hermiticity defect of P U
  double worst_min_eig = std::numeric_limits<double>::infinity();
  double worst_time = std::nan("");
};

struct ConditionII {
  bool pass = true;
  bool mu_extracted = false;
  double worst_residual = 0.0;  ///< ||D(t) - mu(t) I||_F
  double worst_offdiag = 0.0;
  double worst_spread = 0.0;
  double worst_imag = 0.0;
  double worst_time = std::nan("");
  std::vector<double> mu_times;
  std::vector<double> mu_values;  ///< supplied or extracted mu (real part)
};

struct ConditionIII {
  bool pass = true;
  double worst_max_eig = -std::numeric_limits<double>::infinity();  ///< of S_UL + S_UL*
  double worst_time = std::nan("");
};

enum class InitialClass { Strict, NonStrict, Fail };

inline const char* to_string(InitialClass c) {
  switch (c) {
    case InitialClass::Strict: return "STRICT";
    case InitialClass::NonStrict: return "NONSTRICT";
    case InitialClass::Fail: return "FAIL";
  }
  return "?";
}

struct InitialCheck {
  InitialClass classification = InitialClass::Fail;
  double gap_min_eig = 0.0;        ///< of U^-1 Z0 + Z0* U^-* - Lambda - Lambda* at t0
  double uinv_sum_min_eig = 0.0;   ///< of U^-1(t0) + U^-*(t0)
};

enum class Verdict { CertifiedStrict, CertifiedNonStrict, HypothesisFailed, InitialValueOutside };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedStrict: return "CERTIFIED_STRICT";
    case Verdict::CertifiedNonStrict: return "CERTIFIED_NONSTRICT";
    case Verdict::HypothesisFailed: return "HYPOTHESIS_FAILED";
    case Verdict::InitialValueOutside: return "INITIAL_VALUE_OUTSIDE_CONE";
  }
  return "?";
}

// D(t) = R - (U^-1 Q U)* - P U (Lambda* - Lambda) - (U^-1 U')*
inline CMatrix condition_ii_defect(const CertificateFrame& f) {
  return f.R - adjoint(f.U_inv * f.Q * f.U) - f.P * f.U * (adjoint(f.Lambda) - f.Lambda) -
         adjoint(f.U_inv * f.dU);
}

/// P(t) U(t) Hermitian and PSD on the check grid.
inline ConditionI check_condition_I(const Certificate& cert, const RiccatiProblem& prob) {
  ConditionI out;
  double worst_score = -std::numeric_limits<double>::infinity();
  for (double t : certificate_grid(cert, prob)) {
    const CMatrix u = cert.U.eval(t);
    if (invert(u).rcond < kCertificateRcond) {
      throw Error(ErrorCode::SingularU, "U(t) is singular at t=" + std::to_string(t), t);
    }
    const DefinitenessReport d = classify_definiteness(prob.P.eval(t) * u, cert.tol);
    const bool ok = d.classification != Definiteness::NotHermitian && d.is_psd();
    out.worst_defect = std::max(out.worst_defect, d.hermiticity_defect);
    out.worst_min_eig = std::min(out.worst_min_eig, d.min_eigenvalue);
    const double score = std::max(d.hermiticity_defect - cert.tol, -d.min_eigenvalue / d.scale() - cert.tol);
    if (score > worst_score) {
      worst_score = score;
      out.worst_time = t;
    }
    out.pass = out.pass && ok;
  }
  return out;
}

/// R = (U^-1 Q U)* + P U [Lambda* - Lambda] + (U^-1 U')* + mu I with real mu.
/// Without a supplied mu, mu-hat(t) = mean(diag D(t)) must leave no
/// off-diagonal mass, no diagonal spread and no imaginary part.
inline ConditionII check_condition_II(const Certificate& cert, const RiccatiProblem& prob) {
  ConditionII out;
  out.mu_extracted = !cert.mu.has_value();
  if (cert.mu && !cert.mu->is_real_valued()) {
    throw Error(ErrorCode::InvalidArgument, "mu must be real-valued");
  }
  const std::size_t n = prob.n;
  double worst_score = -std::numeric_limits<double>::infinity();
  for (double t : certificate_grid(cert, prob)) {
    const CMatrix d = condition_ii_defect(evaluate_frame(cert, prob, t));
    cplx mean{};
    for (std::size_t i = 0; i < n; ++i) mean += d(i, i);
    mean /= static_cast<double>(n);
    double offdiag = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      spread = std::max(spread, std::abs(d(i, i) - mean));
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) offdiag += std::norm(d(i, j));
    }
    offdiag = std::sqrt(offdiag);

    double mu = mean.real();
    bool ok = true;
    if (cert.mu) {
      mu = cert.mu->eval(t)(0, 0).real();
      ok = frobenius_norm(d - CMatrix::identity(n) * mu) <= cert.tol;
    } else {
      ok = offdiag <= cert.tol && spread <= cert.tol && std::abs(mean.imag()) <= cert.tol;
    }
    const double residual = frobenius_norm(d - CMatrix::identity(n) * (cert.mu ? cplx{mu, 0.0} : mean));
    out.mu_times.push_back(t);
    out.mu_values.push_back(mu);
    out.worst_offdiag = std::max(out.worst_offdiag, offdiag);
    out.worst_spread = std::max(out.worst_spread, spread);
    out.worst_imag = std::max(out.worst_imag, std::abs(mean.imag()));
    const double score = cert.mu ? residual : std::max({offdiag, spread, std::abs(mean.imag())});
    if (score > worst_score) {
      worst_score = score;
      out.worst_time = t;
    }
    out.worst_residual = std::max(out.worst_residual, residual);
    out.pass = out.pass && ok;
  }
  return out;
}

/// S_UL + S_UL* <= 0 on the check grid.
inline ConditionIII check_condition_III(const Certificate& cert, const RiccatiProblem& prob) {
  ConditionIII out;
  double worst_score = -std::numeric_limits<double>::infinity();
  for (double t : certificate_grid(cert, prob)) {
    const DefinitenessReport d = classify_definiteness(hermitian_sum(s_ul(cert, prob, t)), cert.tol);
    const double score = d.max_eigenvalue / d.scale();
    if (score > worst_score) {
      worst_score = score;
      out.worst_time = t;
    }
    out.worst_max_eig = std::max(out.worst_max_eig, d.max_eigenvalue);
    out.pass = out.pass && d.is_nsd();
  }
  return out;
}

/// G0 = U^-1(t0) Z0 + Z0* U^-*(t0) - Lambda(t0) - Lambda*(t0):
/// PD -> STRICT; PSD with U^-1(t0) + U^-*(t0) PD -> NONSTRICT; else FAIL.
inline InitialCheck check_initial_condition(const Certificate& cert, const RiccatiProblem& prob,
                                            const CMatrix& z0) {
  if (z0.n() != prob.n) throw Error(ErrorCode::DimMismatch, "Z0 dimension does not match problem");
  const double t0 = prob.t0;
  InverseResult inv = invert(cert.U.eval(t0));
  if (inv.rcond < kCertificateRcond) {
    throw Error(ErrorCode::SingularU, "U(t0) is singular", t0);
  }
  const CMatrix lam = cert.Lambda.eval(t0);
  const CMatrix gap = hermitian_sum(inv.inverse * z0) - hermitian_sum(lam);
  const DefinitenessReport g = classify_definiteness(gap, cert.tol);
  const DefinitenessReport u = classify_definiteness(hermitian_sum(inv.inverse), cert.tol);
  InitialCheck out;
  out.gap_min_eig = g.min_eigenvalue;
  out.uinv_sum_min_eig = u.min_eigenvalue;
  if (g.is_pd()) {
    out.classification = InitialClass::Strict;
  } else if (g.is_psd() && u.is_pd()) {
    out.classification = InitialClass::NonStrict;
  } else {
    out.classification = InitialClass::Fail;
  }
  return out;
}

struct CertReport {
  ConditionI condition_I;
  ConditionII condition_II;
  ConditionIII condition_III;
  std::optional<InitialCheck> initial;
  std::optional<double> singular_u_time;
  std::string failure;  ///< first error message, if a check aborted
  std::vector<double> grid;
  double grid_density = 0.0;
  double tol = 0.0;

  bool conditions_hold() const {
    return !singular_u_time && failure.empty() && condition_I.pass && condition_II.pass &&
           condition_III.pass;
  }

  Verdict verdict() const {
    if (!conditions_hold()) return Verdict::HypothesisFailed;
    if (!initial) return Verdict::InitialValueOutside;
    switch (initial->classification) {
      case InitialClass::Strict: return Verdict::CertifiedStrict;
      case InitialClass::NonStrict: return Verdict::CertifiedNonStrict;
      case InitialClass::Fail: return Verdict::InitialValueOutside;
    }
    return Verdict::HypothesisFailed;
  }

  bool certified() const {
    const Verdict v = verdict();
    return v == Verdict::CertifiedStrict || v == Verdict::CertifiedNonStrict;
  }

  /// Names of the failed hypotheses, e.g. "II,III".
  std::string failed_conditions() const {
    std::string s;
    auto add = [&](const char* name) { s += s.empty() ? name : std::string(",") + name; };
    if (singular_u_time) add("SINGULAR_U");
    if (!condition_I.pass) add("I");
    if (!condition_II.pass) add("II");
    if (!condition_III.pass) add("III");
    if (initial && initial->classification == InitialClass::Fail) add("INITIAL");
    return s;
  }
};

/// Runs conditions I-III and the initial-value cone test. A singular U(t) at
/// a grid point fails every condition that needs it and is recorded.
inline CertReport certify(const Certificate& cert, const RiccatiProblem& prob,
                          const std::optional<CMatrix>& z0) {
  prob.validate();
  cert.validate(prob.n);
  CertReport rep;
  rep.grid = certificate_grid(cert, prob);
  rep.grid_density = cert.grid_density;
  rep.tol = cert.tol;
  auto guarded = [&](auto&& fn, auto& slot) {
    try {
      slot = fn();
    } catch (const Error& e) {
      slot.pass = false;
      if (e.code() == ErrorCode::SingularU) {
        if (!rep.singular_u_time) rep.singular_u_time = e.time();
      } else if (rep.failure.empty()) {
        rep.failure = e.what();
      }
    }
  };
  guarded([&] { return check_condition_I(cert, prob); }, rep.condition_I);
  guarded([&] { return check_condition_II(cert, prob); }, rep.condition_II);
  guarded([&] { return check_condition_III(cert, prob); }, rep.condition_III);
  if (z0) {
    try {
      rep.initial = check_initial_condition(cert, prob, *z0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularU) throw;
      if (!rep.singular_u_time) rep.singular_u_time = e.time();
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct MonitorRecord {
  double t = 0.0;
  double g_min = 0.0;            ///< min eig of U^-1 Z + Z* U^-* - Lambda(t) - Lambda*(t)
  double g_min_t0_variant = 0.0; ///< same with Lambda*(t0) in place of Lambda*(t)
  double l_hermitian_min = 0.0;  ///< min eig of L + L*, L = U^-1 Z - Lambda
  double scale = 1.0;
  bool violation = false;
  bool skipped = false;          ///< U(t) singular at this sample
};

enum class MonitorVerdict { Holds, Violated, NotCertified };

inline const char* to_string(MonitorVerdict v) {
  switch (v) {
    case MonitorVerdict::Holds: return "HOLDS";
    case MonitorVerdict::Violated: return "VIOLATED";
    case MonitorVerdict::NotCertified: return "NOT_CERTIFIED";
  }
  return "?";
}

struct MonitorResult {
  MonitorVerdict verdict = MonitorVerdict::NotCertified;
  std::vector<MonitorRecord> records;
  double worst_relative_margin = std::numeric_limits<double>::infinity();  ///< min g_min/scale
};

inline constexpr double kMonitorTol = 1e-7;

/// Tracks the guaranteed invariant along a trajectory. Only meaningful for a
/// certified report; otherwise returns NOT_CERTIFIED without records.
inline MonitorResult monitor_invariant(const Certificate& cert, const RiccatiProblem& prob,
                                       const Trajectory& traj, const CertReport& report,
                                       double tol = kMonitorTol) {
  MonitorResult out;
  if (!report.certified()) return out;
  out.verdict = MonitorVerdict::Holds;
  const CMatrix lambda0_adj = adjoint(cert.Lambda.eval(prob.t0));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times()[k];
    const CMatrix& z = traj.samples()[k];
    MonitorRecord rec;
    rec.t = t;
    InverseResult inv = invert(cert.U.eval(t));
    if (inv.rcond < kCertificateRcond) {
      rec.skipped = true;
      out.records.push_back(rec);
      continue;
    }
    const CMatrix lam = cert.Lambda.eval(t);
    const CMatrix uz = hermitian_sum(inv.inverse * z);
    const std::vector<double> g = hermitian_part_eigenvalues(uz - hermitian_sum(lam));
    const std::vector<double> g0 = hermitian_part_eigenvalues(uz - lam - lambda0_adj);
    const CMatrix l = transform_solution(cert, prob, t, z);
    rec.g_min = g.front();
    rec.g_min_t0_variant = g0.front();
    rec.l_hermitian_min = hermitian_part_eigenvalues(hermitian_sum(l)).front();
    rec.scale = 1.0 + std::max(std::abs(g.front()), std::abs(g.back()));
    rec.violation = rec.g_min < -tol * rec.scale;
    out.worst_relative_margin = std::min(out.worst_relative_margin, rec.g_min / rec.scale);
    if (rec.violation) out.verdict = MonitorVerdict::Violated;
    out.records.push_back(rec);
  }
  return out;
}

/// Residual of the transformed equation along a computed solution,
/// ||L' + L(PU)L + Q_UL L + L R_UL + S_UL||_F / (1 + ||L||_F^2), with L' a
/// central difference of the dense output. `t` must lie at least `h` inside
/// the trajectory and away from coefficient breakpoints.
inline double transform_residual(const Certificate& cert, const RiccatiProblem& prob,
                                 const Trajectory& traj, double t, double h = 1e-4) {
  const CMatrix l = transform_solution(cert, prob, t, traj.at(t));
  const CMatrix lp = transform_solution(cert, prob, t + h, traj.at(t + h));
  const CMatrix lm = transform_solution(cert, prob, t - h, traj.at(t - h));
  const CMatrix dl = (lp - lm) * (0.5 / h);
  const double nl = frobenius_norm(l);
  return frobenius_norm(TransformedProblem(cert, prob).residual(t, l, dl)) / (1.0 + nl * nl);
}

/// U = P*; requires det P(t) != 0 on the check grid.
inline Certificate corollary_certificate(const RiccatiProblem& prob,
                                         std::optional<MatrixTimeFn> lambda = std::nullopt,
                                         std::optional<MatrixTimeFn> mu = std::nullopt,
                                         double grid_density = 64.0,
                                         double tol = kDefaultDefinitenessTol) {
  prob.validate();
  for (double t : check_grid(prob.t0, prob.horizon, grid_density, prob.breakpoints())) {
    if (invert(prob.P.eval(t)).rcond < kCertificateRcond) {
      throw Error(ErrorCode::SingularP, "P(t) is singular at t=" + std::to_string(t), t);
    }
  }
  Certificate c;
  c.U = prob.P.adjoint();
  c.Lambda = lambda ? std::move(*lambda) : MatrixTimeFn::zero(prob.n);
  c.mu = mu ? std::move(mu) : std::optional<MatrixTimeFn>(MatrixTimeFn::zero(1));
  c.grid_density = grid_density;
  c.tol = tol;
  return c;
}

// ---------------------------------------------------------------------------
// Comparison with the linear equation Z' + A* Z + Z A + S = 0, A = Q*

struct CompareRecord {
  double t = 0.0;
  double z_min_eig = 0.0;      ///< min eig of Z(t)
  double gap_min_eig = 0.0;    ///< min eig of Ztilde(t) - Z(t)
  double z_scale = 1.0;
  double gap_scale = 1.0;
};

struct CompareResult {
  bool holds = true;
  TrajectoryStatus riccati_status;
  std::vector<CompareRecord> records;
  double worst_z_margin = std::numeric_limits<double>::infinity();    ///< min z_min_eig / scale
  double worst_gap_margin = std::numeric_limits<double>::infinity();  ///< min gap_min_eig / scale
};

/// Verifies the hypotheses (P >= 0, S <= 0 Hermitian, R = Q*, Z0 >= 0) on
/// the grid, then checks 0 <= Z(t) <= Ztilde(t) there.
inline CompareResult compare_with_linear(const RiccatiProblem& prob, const CMatrix& z0,
                                         const IntegratorOptions& opts = {},
                                         double grid_density = 64.0,
                                         double tol = kDefaultDefinitenessTol) {
  prob.validate();
  if (z0.n() != prob.n) throw Error(ErrorCode::DimMismatch, "Z0 dimension does not match problem");
  const double t1 = opts.t_end > 0.0 ? opts.t_end : prob.horizon;
  const std::vector<double> grid = check_grid(prob.t0, t1, grid_density, prob.breakpoints());
  for (double t : grid) {
    const std::string at = " at t=" + std::to_string(t);
    const DefinitenessReport p = classify_definiteness(prob.P.eval(t), tol);
    if (p.classification == Definiteness::NotHermitian || !p.is_psd()) {
      throw Error(ErrorCode::HypothesisViolation, "P(t) >= 0 fails" + at, t);
    }
    const DefinitenessReport s = classify_definiteness(prob.S.eval(t), tol);
    if (s.classification == Definiteness::NotHermitian || !s.is_nsd()) {
      throw Error(ErrorCode::HypothesisViolation, "S(t) <= 0 fails" + at, t);
    }
    if (frobenius_norm(prob.R.eval(t) - adjoint(prob.Q.eval(t))) > tol) {
      throw Error(ErrorCode::HypothesisViolation, "R(t) = Q*(t) fails" + at, t);
    }
  }
  const DefinitenessReport zr = classify_definiteness(z0, tol);
  if (zr.classification == Definiteness::NotHermitian || !zr.is_psd()) {
    throw Error(ErrorCode::HypothesisViolation, "Z0 >= 0 fails", prob.t0);
  }

  IntegratorOptions o = opts;
  o.t_end = t1;
  const Trajectory z = integrate_riccati(prob, z0, o);
  const Trajectory zt = integrate_lyapunov(prob.Q.adjoint(), prob.S, z0, prob.t0, t1, o);
  CompareResult out;
  out.riccati_status = z.status();
  if (z.status().kind != Termination::Completed) out.holds = false;
  for (double t : grid) {
    if (t > z.end_time()) break;
    const CMatrix zt_val = zt.at(t);
    const CMatrix z_val = z.at(t);
    const std::vector<double> ez = hermitian_part_eigenvalues(z_val);
    const std::vector<double> eg = hermitian_part_eigenvalues(zt_val - z_val);
    CompareRecord rec{t, ez.front(), eg.front(),
                      1.0 + std::max(std::abs(ez.front()), std::abs(ez.back())),
                      1.0 + std::max(std::abs(eg.front()), std::abs(eg.back()))};
    out.worst_z_margin = std::min(out.worst_z_margin, rec.z_min_eig / rec.z_scale);
    out.worst_gap_margin = std::min(out.worst_gap_margin, rec.gap_min_eig / rec.gap_scale);
    if (rec.z_min_eig < -tol * rec.z_scale || rec.gap_min_eig < -tol * rec.gap_scale) out.holds = false;
    out.records.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ScanRow {
  double parameter = 0.0;
  InitialClass initial = InitialClass::Fail;
  bool certified = false;
  TrajectoryStatus status;
};

/// Z0(alpha) = base + alpha * direction for each alpha; rows are computed
/// concurrently and returned in parameter order.
inline std::vector<ScanRow> scan_initial_values(const Certificate& cert, const RiccatiProblem& prob,
                                                const CMatrix& base, const CMatrix& direction,
                                                const std::vector<double>& alphas,
                                                const IntegratorOptions& opts = {}) {
  const CertReport conditions = certify(cert, prob, std::nullopt);
  const bool hypotheses = conditions.conditions_hold();
  auto run_row = [&](double alpha) {
    ScanRow row;
    row.parameter = alpha;
    const CMatrix z0 = base + direction * alpha;
    try {
      row.initial = check_initial_condition(cert, prob, z0).classification;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularU) throw;
      row.initial = InitialClass::Fail;
    }
    row.certified = hypotheses && row.initial != InitialClass::Fail;
    row.status = integrate_riccati(prob, z0, opts).status();
    return row;
  };
  const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
  std::vector<ScanRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t start = 0; start < alphas.size(); start += batch) {
    std::vector<std::future<ScanRow>> jobs;
    for (std::size_t k = start; k < std::min(alphas.size(), start + batch); ++k) {
      jobs.push_back(std::async(std::launch::async, run_row, alphas[k]));
    }
    for (auto& j : jobs) rows.push_back(j.get());
  }
  return rows;
}

}  // namespace riccati

#endif  // RICCATI_CERTIFY_HPP
