#ifndef RICCATI_PROBLEM_HPP
#define RICCATI_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "riccati/error.hpp"
#include "riccati/matrix.hpp"
#include "riccati/timefn.hpp"

namespace riccati {

/// Z' + Z P(t) Z + Q(t) Z + Z R(t) + S(t) = 0 on [t0, horizon].
struct RiccatiProblem {
  std::size_t n = 1;
  MatrixTimeFn P, Q, R, S;
  double t0 = 0.0;
  double horizon = 1.0;

  void validate() const {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    const std::pair<const char*, const MatrixTimeFn*> fns[] = {{"P", &P}, {"Q", &Q}, {"R", &R}, {"S", &S}};
    for (const auto& [name, f] : fns) {
      if (f->n() != n) {
        throw Error(ErrorCode::DimMismatch, std::string(name) + " has dimension " +
                                                std::to_string(f->n()) + ", expected " +
                                                std::to_string(n));
      }
    }
    if (!(horizon > t0)) throw Error(ErrorCode::InvalidArgument, "horizon must exceed t0");
  }

  /// Union of coefficient breakpoints inside (t0, horizon).
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (const MatrixTimeFn* f : {&P, &Q, &R, &S})
      for (double t : f->breakpoints())
        if (t > t0 && t < horizon) b.push_back(t);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }
};

inline constexpr double kCertificateRcond = 1e-10;

/// Hypothesis data (U, Lambda, mu) for the global-existence test. When `mu`
/// is absent it is extracted from condition II.
struct Certificate {
  MatrixTimeFn U;
  MatrixTimeFn Lambda;
  std::optional<MatrixTimeFn> mu;
  double grid_density = 64.0;  ///< check points per unit time
  double tol = kDefaultDefinitenessTol;

  void validate(std::size_t n) const {
    if (U.n() != n) throw Error(ErrorCode::DimMismatch, "certificate U has wrong dimension");
    if (Lambda.n() != n) throw Error(ErrorCode::DimMismatch, "certificate Lambda has wrong dimension");
    if (mu) {
      if (mu->n() != 1) throw Error(ErrorCode::DimMismatch, "certificate mu must be 1x1");
      if (!mu->is_real_valued()) throw Error(ErrorCode::InvalidArgument, "mu must be real-valued");
    }
    if (!(grid_density > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_density must be positive");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  }

  std::vector<double> breakpoints() const {
    std::vector<double> b = U.breakpoints();
    for (double t : Lambda.breakpoints()) b.push_back(t);
    if (mu)
      for (double t : mu->breakpoints()) b.push_back(t);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }
};

/// Certificate U = I, Lambda = 0, mu = 0.
inline Certificate identity_certificate(std::size_t n) {
  return Certificate{MatrixTimeFn::constant(CMatrix::identity(n)), MatrixTimeFn::zero(n),
                     MatrixTimeFn::zero(1)};
}

/// Uniform grid with `density` points per unit time on [t0, t1], merged with
/// `extra` points inside the interval.
inline std::vector<double> check_grid(double t0, double t1, double density,
                                      const std::vector<double>& extra = {}) {
  const auto count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t1 - t0) * density)));
  std::vector<double> g;
  g.reserve(count + 1 + extra.size());
  for (std::size_t k = 0; k <= count; ++k) {
    g.push_back(k == count ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count));
  }
  for (double t : extra)
    if (t >= t0 && t <= t1) g.push_back(t);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

/// -(Z P Z + Q Z + Z R + S)
inline CMatrix rhs(const RiccatiProblem& prob, double t, const CMatrix& z, double anchor) {
  const CMatrix p = prob.P.eval(t, anchor);
  const CMatrix q = prob.Q.eval(t, anchor);
  const CMatrix r = prob.R.eval(t, anchor);
  const CMatrix s = prob.S.eval(t, anchor);
  return -(z * p * z + q * z + z * r + s);
}

inline CMatrix rhs(const RiccatiProblem& prob, double t, const CMatrix& z) {
  return rhs(prob, t, z, t);
}

/// Everything the transformed coefficients need at a single instant.
struct CertificateFrame {
  double t = 0.0;
  CMatrix P, Q, R, S;
  CMatrix U, U_inv, dU;
  CMatrix Lambda, dLambda;
};

inline CertificateFrame evaluate_frame(const Certificate& cert, const RiccatiProblem& prob,
                                       double t) {
  CertificateFrame f;
  f.t = t;
  f.P = prob.P.eval(t);
  f.Q = prob.Q.eval(t);
  f.R = prob.R.eval(t);
  f.S = prob.S.eval(t);
  f.U = cert.U.eval(t);
  f.dU = cert.U.deriv(t);
  f.Lambda = cert.Lambda.eval(t);
  f.dLambda = cert.Lambda.deriv(t);
  InverseResult inv = invert(f.U);
  if (inv.rcond < kCertificateRcond) {
    throw Error(ErrorCode::SingularU, "U(t) is singular at t=" + std::to_string(t), t);
  }
  f.U_inv = std::move(inv.inverse);
  return f;
}

/// S_{U,Lambda} = Lambda' + Lambda P U Lambda + [U^-1 U' + U^-1 Q U] Lambda
///               + Lambda R + U^-1 S
inline CMatrix s_ul(const CertificateFrame& f) {
  return f.dLambda + f.Lambda * f.P * f.U * f.Lambda +
         (f.U_inv * f.dU + f.U_inv * f.Q * f.U) * f.Lambda + f.Lambda * f.R + f.U_inv * f.S;
}

/// Q_{U,Lambda} = U^-1 U' + U^-1 Q U + Lambda P U
inline CMatrix q_ul(const CertificateFrame& f) {
  return f.U_inv * f.dU + f.U_inv * f.Q * f.U + f.Lambda * f.P * f.U;
}

/// R_{U,Lambda} = R + P U Lambda
inline CMatrix r_ul(const CertificateFrame& f) { return f.R + f.P * f.U * f.Lambda; }

inline CMatrix s_ul(const Certificate& cert, const RiccatiProblem& prob, double t) {
  return s_ul(evaluate_frame(cert, prob, t));
}
inline CMatrix q_ul(const Certificate& cert, const RiccatiProblem& prob, double t) {
  return q_ul(evaluate_frame(cert, prob, t));
}
inline CMatrix r_ul(const Certificate& cert, const RiccatiProblem& prob, double t) {
  return r_ul(evaluate_frame(cert, prob, t));
}

/// Coefficients of the transformed equation
///   L' + L (P U) L + Q_UL L + L R_UL + S_UL = 0,
/// evaluated on demand.
class TransformedProblem {
 public:
  TransformedProblem(const Certificate& cert, const RiccatiProblem& prob)
      : cert_(&cert), prob_(&prob) {}

  struct Coefficients {
    CMatrix A;  ///< P U
    CMatrix Q, R, S;
  };

  Coefficients at(double t) const {
    const CertificateFrame f = evaluate_frame(*cert_, *prob_, t);
    return {f.P * f.U, q_ul(f), r_ul(f), s_ul(f)};
  }

  /// L' + L A L + Q L + L R + S
  CMatrix residual(double t, const CMatrix& l, const CMatrix& dl) const {
    const Coefficients c = at(t);
    return dl + l * c.A * l + c.Q * l + l * c.R + c.S;
  }

 private:
  const Certificate* cert_;
  const RiccatiProblem* prob_;
};

/// L = U(t)^-1 Z - Lambda(t)
inline CMatrix transform_solution(const Certificate& cert, const RiccatiProblem& /*prob*/, double t,
                                  const CMatrix& z) {
  InverseResult inv = invert(cert.U.eval(t));
  if (inv.rcond < kCertificateRcond) {
    throw Error(ErrorCode::SingularU, "U(t) is singular at t=" + std::to_string(t), t);
  }
  return inv.inverse * z - cert.Lambda.eval(t);
}

/// Z = U(t) (L + Lambda(t))
inline CMatrix untransform_solution(const Certificate& cert, const RiccatiProblem& /*prob*/,
                                    double t, const CMatrix& l) {
  return cert.U.eval(t) * (l + cert.Lambda.eval(t));
}

}  // namespace riccati

#endif  // RICCATI_PROBLEM_HPP
