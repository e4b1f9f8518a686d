#ifndef RICCATI_LEMMAS_HPP
#define RICCATI_LEMMAS_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "riccati/matrix.hpp"

namespace riccati {

/// Randomized checks of the trace and congruence facts the global-existence
/// argument rests on:
///   trace:      tr(M1 M2) = tr(M2 M1)
///   trace-psd:  H1, H2 >= 0  =>  tr(H1 H2) >= 0
///   congruence: H >= 0       =>  V H V* >= 0
struct LemmaResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_residual = 0.0;  ///< relative, see the bound of each check
  bool pass() const { return failures == 0; }
};

struct LemmaSuiteResult {
  std::vector<LemmaResult> lemmas;
  bool pass() const {
    return std::all_of(lemmas.begin(), lemmas.end(), [](const LemmaResult& r) { return r.pass(); });
  }
};

inline constexpr double kLemmaTol = 1e-10;

inline CMatrix random_complex_matrix(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(n);
  for (cplx& x : m.data()) x = cplx{g(rng), g(rng)};
  return m;
}

/// A A*, PSD by construction.
inline CMatrix random_psd_matrix(std::mt19937_64& rng, std::size_t n) {
  const CMatrix a = random_complex_matrix(rng, n);
  return a * adjoint(a);
}

/// |tr(M1 M2) - tr(M2 M1)| / (1 + |tr(M1 M2)|)
inline double trace_commutation_residual(const CMatrix& m1, const CMatrix& m2) {
  const cplx a = trace(m1 * m2), b = trace(m2 * m1);
  return std::abs(a - b) / (1.0 + std::abs(a));
}

/// max(-Re tr(H1 H2), |Im tr(H1 H2)|) / (1 + ||H1|| ||H2||)
inline double trace_psd_residual(const CMatrix& h1, const CMatrix& h2) {
  const cplx t = trace(h1 * h2);
  return std::max(-t.real(), std::abs(t.imag())) /
         (1.0 + frobenius_norm(h1) * frobenius_norm(h2));
}

/// max(0, -lambda_min(V H V*)) / (1 + ||V||^2 ||H||)
inline double congruence_residual(const CMatrix& v, const CMatrix& h) {
  const double lmin = hermitian_part_eigenvalues(v * h * adjoint(v)).front();
  const double nv = frobenius_norm(v);
  return std::max(0.0, -lmin) / (1.0 + nv * nv * frobenius_norm(h));
}

inline LemmaSuiteResult run_lemma_suite(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  LemmaResult l1{"trace-commutation", trials};
  LemmaResult l2{"trace-of-psd-product", trials};
  LemmaResult l3{"psd-congruence", trials};
  auto record = [](LemmaResult& r, double residual) {
    r.worst_residual = std::max(r.worst_residual, residual);
    if (!(residual <= kLemmaTol)) ++r.failures;
  };
  for (std::size_t k = 0; k < trials; ++k) {
    const std::size_t n = dim(rng);
    const CMatrix m1 = random_complex_matrix(rng, n);
    const CMatrix m2 = random_complex_matrix(rng, n);
    record(l1, trace_commutation_residual(m1, m2));
    const CMatrix h1 = random_psd_matrix(rng, n);
    const CMatrix h2 = random_psd_matrix(rng, n);
    record(l2, trace_psd_residual(h1, h2));
    const CMatrix v = random_complex_matrix(rng, n);
    const CMatrix h = random_psd_matrix(rng, n);
    record(l3, congruence_residual(v, h));
  }
  return {{l1, l2, l3}};
}

/// Deterministic fixtures: known Hermitian PSD matrices and their products.
inline LemmaSuiteResult run_lemma_fixtures() {
  const cplx i{0.0, 1.0};
  const CMatrix h1{{2.0, i}, {-i, 2.0}};
  const CMatrix h2{{1.0, 1.0}, {1.0, 1.0}};
  const CMatrix h3 = CMatrix::diag({3.0, 0.0, 1.0});
  const CMatrix v{{1.0, 2.0 * i}, {0.5, -1.0}};
  const CMatrix m1{{1.0, 2.0}, {3.0 * i, 4.0}};
  LemmaResult l1{"trace-commutation", 2};
  LemmaResult l2{"trace-of-psd-product", 2};
  LemmaResult l3{"psd-congruence", 2};
  auto record = [](LemmaResult& r, double residual) {
    r.worst_residual = std::max(r.worst_residual, residual);
    if (!(residual <= kLemmaTol)) ++r.failures;
  };
  record(l1, trace_commutation_residual(m1, v));
  record(l1, trace_commutation_residual(h1, m1));
  record(l2, trace_psd_residual(h1, h2));
  record(l2, trace_psd_residual(h3, h3));
  record(l3, congruence_residual(v, h1));
  record(l3, congruence_residual(m1, h2));
  return {{l1, l2, l3}};
}

}  // namespace riccati

#endif  // RICCATI_LEMMAS_HPP
