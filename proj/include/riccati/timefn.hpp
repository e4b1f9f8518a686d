#ifndef RICCATI_TIMEFN_HPP
#define RICCATI_TIMEFN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "riccati/error.hpp"
#include "riccati/matrix.hpp"

namespace riccati {

enum class BasisKind { Const, Poly, Sin, Cos, Exp };

inline const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Const: return "const";
    case BasisKind::Poly: return "poly";
    case BasisKind::Sin: return "sin";
    case BasisKind::Cos: return "cos";
    case BasisKind::Exp: return "exp";
  }
  return "?";
}

/// coeff * {1, t^k, sin(w t), cos(w t), e^{a t}}
struct ScalarBasisTerm {
  BasisKind kind = BasisKind::Const;
  int degree = 0;     ///< Poly only
  double rate = 0.0;  ///< omega for Sin/Cos, a for Exp
  cplx coeff{0.0, 0.0};

  static ScalarBasisTerm constant(cplx c) { return {BasisKind::Const, 0, 0.0, c}; }
  static ScalarBasisTerm poly(int k, cplx c) { return {BasisKind::Poly, k, 0.0, c}; }
  static ScalarBasisTerm sin(double w, cplx c) { return {BasisKind::Sin, 0, w, c}; }
  static ScalarBasisTerm cos(double w, cplx c) { return {BasisKind::Cos, 0, w, c}; }
  static ScalarBasisTerm exp(double a, cplx c) { return {BasisKind::Exp, 0, a, c}; }

  void validate() const {
    if (kind == BasisKind::Poly && degree < 0) {
      throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 0");
    }
    if (!std::isfinite(rate) || !std::isfinite(coeff.real()) || !std::isfinite(coeff.imag())) {
      throw Error(ErrorCode::InvalidArgument, "basis term parameters must be finite");
    }
  }

  cplx eval(double t) const {
    switch (kind) {
      case BasisKind::Const: return coeff;
      case BasisKind::Poly: return coeff * std::pow(t, degree);
      case BasisKind::Sin: return coeff * std::sin(rate * t);
      case BasisKind::Cos: return coeff * std::cos(rate * t);
      case BasisKind::Exp: return coeff * std::exp(rate * t);
    }
    return {};
  }

  /// d/dt stays inside the basis; a vanishing derivative yields a zero constant.
  ScalarBasisTerm derivative() const {
    switch (kind) {
      case BasisKind::Const: return constant(0.0);
      case BasisKind::Poly:
        if (degree == 0) return constant(0.0);
        if (degree == 1) return constant(coeff);
        return poly(degree - 1, coeff * static_cast<double>(degree));
      case BasisKind::Sin: return cos(rate, coeff * rate);
      case BasisKind::Cos: return sin(rate, -coeff * rate);
      case BasisKind::Exp: return exp(rate, coeff * rate);
    }
    return constant(0.0);
  }

  friend bool operator==(const ScalarBasisTerm&, const ScalarBasisTerm&) = default;
};

/// Finite sum of basis terms.
using ScalarFn = std::vector<ScalarBasisTerm>;

inline cplx eval(const ScalarFn& f, double t) {
  cplx s{};
  for (const auto& term : f) s += term.eval(t);
  return s;
}

inline ScalarFn derivative(const ScalarFn& f) {
  ScalarFn d;
  d.reserve(f.size());
  for (const auto& term : f) {
    ScalarBasisTerm dt = term.derivative();
    if (dt.coeff != cplx{}) d.push_back(dt);
  }
  return d;
}

/// Matrix-valued function of time, piecewise in t. Piece k is active on
/// [start_k, start_{k+1}); evaluation is right-continuous at breakpoints.
class MatrixTimeFn {
 public:
  struct Piece {
    double start = -std::numeric_limits<double>::infinity();
    std::vector<ScalarFn> entries;  ///< row-major n*n
    friend bool operator==(const Piece&, const Piece&) = default;
  };

  MatrixTimeFn() = default;

  explicit MatrixTimeFn(std::size_t n) : n_(n) {
    pieces_.push_back({-std::numeric_limits<double>::infinity(), std::vector<ScalarFn>(n * n)});
  }

  MatrixTimeFn(std::size_t n, std::vector<Piece> pieces) : n_(n), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw Error(ErrorCode::InvalidArgument, "MatrixTimeFn needs a piece");
    pieces_.front().start = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      if (pieces_[k].entries.size() != n_ * n_) {
        throw Error(ErrorCode::DimMismatch, "piece entry count does not match n*n");
      }
      if (k > 0 && !(pieces_[k].start > pieces_[k - 1].start)) {
        throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly ascending");
      }
      for (const auto& e : pieces_[k].entries)
        for (const auto& term : e) term.validate();
    }
  }

  static MatrixTimeFn constant(const CMatrix& m) {
    MatrixTimeFn f(m.n());
    for (std::size_t k = 0; k < m.n() * m.n(); ++k) {
      const cplx c = m.data()[k];
      if (c != cplx{}) f.pieces_[0].entries[k].push_back(ScalarBasisTerm::constant(c));
    }
    return f;
  }

  static MatrixTimeFn zero(std::size_t n) { return MatrixTimeFn(n); }

  /// Single-piece function from row-major entries.
  static MatrixTimeFn from_entries(std::size_t n, std::vector<ScalarFn> entries) {
    return MatrixTimeFn(n, {Piece{0.0, std::move(entries)}});
  }

  static MatrixTimeFn scalar(ScalarFn f) { return from_entries(1, {std::move(f)}); }

  std::size_t n() const noexcept { return n_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (std::size_t k = 1; k < pieces_.size(); ++k) b.push_back(pieces_[k].start);
    return b;
  }

  bool is_breakpoint(double t) const {
    for (std::size_t k = 1; k < pieces_.size(); ++k)
      if (pieces_[k].start == t) return true;
    return false;
  }

  /// Index of the piece active at `t` (right-continuous).
  std::size_t piece_index(double t) const {
    std::size_t k = 0;
    while (k + 1 < pieces_.size() && pieces_[k + 1].start <= t) ++k;
    return k;
  }

  CMatrix eval(double t) const { return eval_piece(piece_index(t), t); }

  /// Evaluates the piece active at `anchor`; integrators pass the step start
  /// so that a stage landing on a breakpoint uses the left-hand definition.
  CMatrix eval(double t, double anchor) const { return eval_piece(piece_index(anchor), t); }

  /// Exact derivative; one-sided (right) at breakpoints.
  CMatrix deriv(double t) const { return deriv_piece(piece_index(t), t); }
  CMatrix deriv(double t, double anchor) const { return deriv_piece(piece_index(anchor), t); }

  MatrixTimeFn derivative() const {
    MatrixTimeFn d = *this;
    for (auto& p : d.pieces_)
      for (auto& e : p.entries) e = riccati::derivative(e);
    return d;
  }

  /// Entrywise conjugate transpose (basis functions are real for real t).
  MatrixTimeFn adjoint() const {
    MatrixTimeFn r = *this;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          ScalarFn e = pieces_[k].entries[j * n_ + i];
          for (auto& term : e) term.coeff = std::conj(term.coeff);
          r.pieces_[k].entries[i * n_ + j] = std::move(e);
        }
      }
    }
    return r;
  }

  /// True when every coefficient is real (so the function is real-valued).
  bool is_real_valued() const {
    for (const auto& p : pieces_)
      for (const auto& e : p.entries)
        for (const auto& term : e)
          if (term.coeff.imag() != 0.0) return false;
    return true;
  }

  MatrixTimeFn scaled(cplx s) const {
    MatrixTimeFn r = *this;
    for (auto& p : r.pieces_)
      for (auto& e : p.entries)
        for (auto& term : e) term.coeff *= s;
    return r;
  }

  friend MatrixTimeFn operator+(const MatrixTimeFn& f, const MatrixTimeFn& g) {
    if (f.n_ != g.n_) throw Error(ErrorCode::DimMismatch, "MatrixTimeFn dimensions differ");
    std::vector<double> starts;
    for (const auto& p : f.pieces_) starts.push_back(p.start);
    for (const auto& p : g.pieces_) starts.push_back(p.start);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::vector<Piece> merged;
    for (double s : starts) {
      const Piece& pf = f.pieces_[f.piece_index(s)];
      const Piece& pg = g.pieces_[g.piece_index(s)];
      Piece m{s, pf.entries};
      for (std::size_t k = 0; k < m.entries.size(); ++k)
        m.entries[k].insert(m.entries[k].end(), pg.entries[k].begin(), pg.entries[k].end());
      merged.push_back(std::move(m));
    }
    return MatrixTimeFn(f.n_, std::move(merged));
  }

  friend bool operator==(const MatrixTimeFn&, const MatrixTimeFn&) = default;

 private:
  CMatrix eval_piece(std::size_t k, double t) const {
    CMatrix m(n_);
    const auto& entries = pieces_[k].entries;
    for (std::size_t idx = 0; idx < entries.size(); ++idx) m.data()[idx] = riccati::eval(entries[idx], t);
    return m;
  }

  CMatrix deriv_piece(std::size_t k, double t) const {
    CMatrix m(n_);
    const auto& entries = pieces_[k].entries;
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
      cplx s{};
      for (const auto& term : entries[idx]) s += term.derivative().eval(t);
      m.data()[idx] = s;
    }
    return m;
  }

  std::size_t n_ = 0;
  std::vector<Piece> pieces_;
};

struct HermitianCheck {
  bool hermitian = true;
  double worst_defect = 0.0;
  double worst_time = std::nan("");
};

/// Hermiticity defect of f(t) at each grid point.
inline HermitianCheck is_hermitian_valued(const MatrixTimeFn& f, const std::vector<double>& grid,
                                          double tol = kDefaultDefinitenessTol) {
  HermitianCheck r;
  for (double t : grid) {
    const double d = hermiticity_defect(f.eval(t));
    if (d > r.worst_defect || std::isnan(r.worst_time)) {
      r.worst_defect = d;
      r.worst_time = t;
    }
  }
  r.hermitian = r.worst_defect <= tol;
  return r;
}

}  // namespace riccati

#endif  // RICCATI_TIMEFN_HPP
