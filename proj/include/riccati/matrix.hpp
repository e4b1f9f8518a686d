#ifndef RICCATI_MATRIX_HPP
#define RICCATI_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "riccati/error.hpp"

namespace riccati {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), a_(n * n, cplx{0.0, 0.0}) {}
  CMatrix(std::size_t n, std::vector<cplx> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n_ * n_) {
      throw Error(ErrorCode::DimMismatch, "entry count does not match n*n");
    }
  }
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : n_(rows.size()) {
    a_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw Error(ErrorCode::DimMismatch, "matrix must be square");
      a_.insert(a_.end(), row.begin(), row.end());
    }
  }

  static CMatrix zero(std::size_t n) { return CMatrix(n); }
  static CMatrix identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMatrix diag(std::span<const cplx> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static CMatrix diag(std::initializer_list<cplx> d) {
    return diag(std::span<const cplx>(d.begin(), d.size()));
  }

  std::size_t n() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::span<cplx> data() noexcept { return a_; }
  std::span<const cplx> data() const noexcept { return a_; }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(double s, CMatrix a) { return a *= cplx{s, 0.0}; }
  friend CMatrix operator*(CMatrix a, double s) { return a *= cplx{s, 0.0}; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    a.check_same(b);
    const std::size_t n = a.n_;
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  void check_same(const CMatrix& o) const {
    if (o.n_ != n_) throw Error(ErrorCode::DimMismatch, "matrix dimensions differ");
  }

  std::size_t n_ = 0;
  std::vector<cplx> a_;
};

inline double frobenius_norm(const CMatrix& m) {
  double s = 0.0;
  for (const cplx& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

/// Induced 1-norm (max column sum).
inline double one_norm(const CMatrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.n(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i) col += std::abs(m(i, j));
    best = std::max(best, col);
  }
  return best;
}

inline bool all_finite(const CMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

inline CMatrix adjoint(const CMatrix& m) {
  CMatrix r(m.n());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j < m.n(); ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

/// (M + M*) / 2.
inline CMatrix hermitian_part(const CMatrix& m) {
  CMatrix r(m.n());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j < m.n(); ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return r;
}

/// M + M*, unhalved; the form used by the certificate conditions.
inline CMatrix hermitian_sum(const CMatrix& m) { return 2.0 * hermitian_part(m); }

inline cplx trace(const CMatrix& m) {
  cplx s{};
  for (std::size_t i = 0; i < m.n(); ++i) s += m(i, i);
  return s;
}

/// ||M - M*||_F / (1 + ||M||_F)
inline double hermiticity_defect(const CMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j < m.n(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
  return std::sqrt(s) / (1.0 + frobenius_norm(m));
}

// ---------------------------------------------------------------------------
// LU-based inverse and determinant

struct InverseResult {
  CMatrix inverse;
  /// 1 / (||M||_1 ||M^-1||_1); zero when a pivot vanished.
  double rcond = 0.0;
};

namespace detail {

struct LU {
  CMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

inline LU lu_decompose(const CMatrix& m) {
  LU f{m, std::vector<std::size_t>(m.n()), 1, false};
  const std::size_t n = m.n();
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  CMatrix& a = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best == 0.0 || !std::isfinite(best)) {
      f.singular = true;
      continue;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      const cplx l = a(i, k);
      if (l == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return f;
}

}  // namespace detail

/// Never throws on singular input; inspect `rcond`.
inline InverseResult invert(const CMatrix& m) {
  const std::size_t n = m.n();
  const detail::LU f = detail::lu_decompose(m);
  if (f.singular) return {CMatrix(n), 0.0};
  CMatrix inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (f.perm[i] == col) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) x[i] -= f.lu(i, k) * x[k];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= f.lu(ii, k) * x[k];
      x[ii] /= f.lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  if (!all_finite(inv)) return {CMatrix(n), 0.0};
  const double denom = one_norm(m) * one_norm(inv);
  return {std::move(inv), denom > 0.0 ? 1.0 / denom : 0.0};
}

inline constexpr double kSingularRcond = 1e-13;

/// Throws Error(Singular) when the reciprocal condition estimate drops below
/// `rcond_threshold`.
inline CMatrix inverse(const CMatrix& m, double rcond_threshold = kSingularRcond) {
  InverseResult r = invert(m);
  if (r.rcond < rcond_threshold) {
    throw Error(ErrorCode::Singular, "matrix is singular to working precision (rcond=" +
                                         std::to_string(r.rcond) + ")");
  }
  return std::move(r.inverse);
}

inline cplx determinant(const CMatrix& m) {
  const detail::LU f = detail::lu_decompose(m);
  if (f.singular) return cplx{};
  cplx d = static_cast<double>(f.sign);
  for (std::size_t i = 0; i < m.n(); ++i) d *= f.lu(i, i);
  return d;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)

struct HermitianEigen {
  std::vector<double> values;  ///< ascending
  CMatrix vectors;             ///< unitary, columns are eigenvectors
};

inline constexpr double kDefaultDefinitenessTol = 1e-9;

/// Cyclic complex Jacobi. Each rotation first applies a diagonal phase that
/// makes the pivot real, then a real Givens rotation annihilates it. Sweeps
/// stop when the off-diagonal Frobenius mass is below 1e-14 ||H||_F or after
/// 30 sweeps.
inline HermitianEigen eig_hermitian(const CMatrix& h, double tol = kDefaultDefinitenessTol) {
  if (hermiticity_defect(h) > tol) {
    throw Error(ErrorCode::NotHermitian, "eig_hermitian requires a Hermitian matrix");
  }
  const std::size_t n = h.n();
  CMatrix a = hermitian_part(h);
  CMatrix v = CMatrix::identity(n);
  const double target = 1e-14 * frobenius_norm(a);

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 30 && off_mass() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        // phase: scale column q by e^{-i phi}, row q by e^{i phi}
        const cplx phase = std::conj(a(p, q)) / mag;
        for (std::size_t r = 0; r < n; ++r) {
          a(r, q) *= phase;
          v(r, q) *= phase;
        }
        for (std::size_t r = 0; r < n; ++r) a(q, r) *= std::conj(phase);
        a(p, q) = mag;
        a(q, p) = mag;

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          const cplx x = a(r, p), y = a(r, q);
          a(r, p) = c * x - s * y;
          a(r, q) = s * x + c * y;
          const cplx vx = v(r, p), vy = v(r, q);
          v(r, p) = c * vx - s * vy;
          v(r, q) = s * vx + c * vy;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx x = a(p, r), y = a(q, r);
          a(p, r) = c * x - s * y;
          a(q, r) = s * x + c * y;
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEigen out{std::vector<double>(n), CMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

/// Eigenvalues of the Hermitian part, skipping the hermiticity gate.
inline std::vector<double> hermitian_part_eigenvalues(const CMatrix& m) {
  return eig_hermitian(hermitian_part(m), 1.0).values;
}

// ---------------------------------------------------------------------------
// Definiteness

enum class Definiteness { PD, PSD, ND, NSD, Indefinite, NotHermitian };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PD: return "PD";
    case Definiteness::PSD: return "PSD";
    case Definiteness::ND: return "ND";
    case Definiteness::NSD: return "NSD";
    case Definiteness::Indefinite: return "INDEFINITE";
    case Definiteness::NotHermitian: return "NOT_HERMITIAN";
  }
  return "?";
}

struct DefinitenessReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double hermiticity_defect = 0.0;
  Definiteness classification = Definiteness::Indefinite;
  double tolerance_used = kDefaultDefinitenessTol;

  /// 1 + max(|lambda_min|, |lambda_max|)
  double scale() const {
    return 1.0 + std::max(std::abs(min_eigenvalue), std::abs(max_eigenvalue));
  }
  bool is_psd() const {
    return classification != Definiteness::NotHermitian &&
           min_eigenvalue >= -tolerance_used * scale();
  }
  bool is_pd() const { return classification == Definiteness::PD; }
  bool is_nsd() const {
    return classification != Definiteness::NotHermitian &&
           max_eigenvalue <= tolerance_used * scale();
  }
};

/// Eigenvalues are those of the Hermitian part; for NOT_HERMITIAN input they
/// are reported for information but no sign label is assigned.
inline DefinitenessReport classify_definiteness(const CMatrix& m,
                                                double tol = kDefaultDefinitenessTol) {
  DefinitenessReport r;
  r.tolerance_used = tol;
  r.hermiticity_defect = hermiticity_defect(m);
  const std::vector<double> ev = hermitian_part_eigenvalues(m);
  r.min_eigenvalue = ev.empty() ? 0.0 : ev.front();
  r.max_eigenvalue = ev.empty() ? 0.0 : ev.back();
  if (r.hermiticity_defect > tol) {
    r.classification = Definiteness::NotHermitian;
    return r;
  }
  const double band = tol * r.scale();
  if (r.min_eigenvalue > band) {
    r.classification = Definiteness::PD;
  } else if (r.min_eigenvalue >= -band) {
    r.classification = Definiteness::PSD;
  } else if (r.max_eigenvalue < -band) {
    r.classification = Definiteness::ND;
  } else if (r.max_eigenvalue <= band) {
    r.classification = Definiteness::NSD;
  } else {
    r.classification = Definiteness::Indefinite;
  }
  return r;
}

}  // namespace riccati

#endif  // RICCATI_MATRIX_HPP
