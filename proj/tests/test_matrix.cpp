#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace riccati;
using testing_support::random_hermitian;

namespace {

const cplx I{0.0, 1.0};

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

// Laplace expansion along the first row; independent of the LU path.
cplx cofactor_det(const CMatrix& m) {
  const std::size_t n = m.n();
  if (n == 1) return m(0, 0);
  cplx sum{};
  for (std::size_t c = 0; c < n; ++c) {
    CMatrix minor(n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, jj = 0; j < n; ++j)
        if (j != c) minor(i - 1, jj++) = m(i, j);
    sum += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return sum;
}

}  // namespace

TEST(HermitianPart, Examples) {
  EXPECT_EQ(hermitian_part(CMatrix{{0.0, 2.0}, {0.0, 0.0}}), (CMatrix{{0.0, 1.0}, {1.0, 0.0}}));
  const CMatrix h{{2.0, 1.0 + I}, {1.0 - I, -3.0}};
  EXPECT_EQ(hermitian_part(h), h);
  EXPECT_EQ(hermitian_part(CMatrix{{I}}), CMatrix{{0.0}});
}

TEST(Trace, Examples) {
  EXPECT_EQ(trace(CMatrix::identity(3)), cplx(3.0));
  EXPECT_EQ(trace(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), cplx(0.0));
}

TEST(Adjoint, Example) {
  EXPECT_EQ(adjoint(CMatrix{{I, 0.0}, {2.0, 0.0}}), (CMatrix{{-I, 2.0}, {0.0, 0.0}}));
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(CMatrix::identity(2)), CMatrix::identity(2));
  EXPECT_LE(max_abs_diff(inverse(CMatrix::diag({2.0, 4.0})), CMatrix::diag({0.5, 0.25})), 1e-15);
  EXPECT_LE(max_abs_diff(inverse(CMatrix{{1.0, 1.0}, {0.0, 1.0}}), CMatrix{{1.0, -1.0}, {0.0, 1.0}}), 1e-15);
}

TEST(Inverse, SingularThrows) {
  try {
    inverse(CMatrix{{1.0, 2.0}, {2.0, 4.0}});
    FAIL() << "expected SINGULAR";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
  EXPECT_LT(invert(CMatrix{{1.0, 2.0}, {2.0, 4.0}}).rcond, kSingularRcond);
}

TEST(Inverse, RandomProductIsIdentity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix a = random_complex_matrix(rng, 1 + trial % 4);
    EXPECT_LE(max_abs_diff(a * inverse(a), CMatrix::identity(a.n())), 1e-10);
  }
}

TEST(Determinant, Examples) {
  EXPECT_EQ(determinant(CMatrix::identity(3)), cplx(1.0));
  const double t = 0.5;
  EXPECT_DOUBLE_EQ(determinant(CMatrix{{1.0 - t}}).real(), 0.5);
}

TEST(Determinant, MatchesCofactorExpansion) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = random_complex_matrix(rng, 3);
    const cplx oracle = cofactor_det(a);
    EXPECT_LE(std::abs(determinant(a) - oracle), 1e-12 * std::abs(oracle)) << "trial " << trial;
  }
}

TEST(Eigen, Examples) {
  const HermitianEigen e1 = eig_hermitian(CMatrix::diag({2.0, 1.0}));
  EXPECT_NEAR(e1.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e1.values[1], 2.0, 1e-15);
  const HermitianEigen e2 = eig_hermitian(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
  EXPECT_NEAR(e2.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e2.values[1], 1.0, 1e-14);
}

TEST(Eigen, MatchesCharacteristicPolynomialRoots) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const CMatrix h = random_hermitian(rng, 2);
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double b2 = std::norm(h(0, 1));
    // lambda^2 - (a + d) lambda + (a d - |b|^2) = 0
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b2);
    const double lo = 0.5 * (a + d - disc), hi = 0.5 * (a + d + disc);
    const HermitianEigen e = eig_hermitian(h);
    EXPECT_LE(std::abs(e.values[0] - lo), 1e-10);
    EXPECT_LE(std::abs(e.values[1] - hi), 1e-10);
  }
}

TEST(Eigen, EigenpairsAndOrthonormality) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 6; ++n) {
    const CMatrix h = random_hermitian(rng, n);
    const HermitianEigen e = eig_hermitian(h);
    const CMatrix& v = e.vectors;
    EXPECT_LE(max_abs_diff(adjoint(v) * v, CMatrix::identity(n)), 1e-12);
    std::vector<cplx> d(e.values.begin(), e.values.end());
    EXPECT_LE(max_abs_diff(h * v, v * CMatrix::diag(d)), 1e-11 * (1.0 + frobenius_norm(h)));
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
  }
}

TEST(Eigen, UnitaryCongruenceKeepsSpectrum) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const CMatrix h = random_hermitian(rng, n);
    const CMatrix w = eig_hermitian(random_hermitian(rng, n)).vectors;  // unitary
    const auto a = eig_hermitian(h).values;
    const auto b = eig_hermitian(hermitian_part(w * h * adjoint(w))).values;
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(a[k], b[k], 1e-11 * (1.0 + std::abs(a[k])));
  }
}

TEST(Eigen, RejectsNonHermitian) {
  try {
    eig_hermitian(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
    FAIL() << "expected NOT_HERMITIAN";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(Definiteness, Examples) {
  EXPECT_EQ(classify_definiteness(CMatrix::identity(3)).classification, Definiteness::PD);
  const DefinitenessReport z = classify_definiteness(CMatrix(2));
  EXPECT_EQ(z.classification, Definiteness::PSD);
  EXPECT_EQ(z.min_eigenvalue, 0.0);
  EXPECT_TRUE(z.is_psd());
  EXPECT_TRUE(z.is_nsd());
  EXPECT_EQ(classify_definiteness(CMatrix::diag({1.0, -1.0})).classification, Definiteness::Indefinite);
  EXPECT_EQ(classify_definiteness(-1.0 * CMatrix::identity(2)).classification, Definiteness::ND);
  EXPECT_EQ(classify_definiteness(CMatrix::diag({-1.0, 0.0})).classification, Definiteness::NSD);
  EXPECT_EQ(classify_definiteness(CMatrix{{0.0, 1.0}, {0.0, 0.0}}).classification, Definiteness::NotHermitian);
}

TEST(Definiteness, ToleranceBandScalesWithSpectrum) {
  EXPECT_EQ(classify_definiteness(CMatrix::diag({1.0, -1e-12})).classification, Definiteness::PSD);
  EXPECT_EQ(classify_definiteness(CMatrix::diag({1e6, -1e-4})).classification, Definiteness::PSD);
  EXPECT_EQ(classify_definiteness(CMatrix::diag({1.0, -1e-6})).classification, Definiteness::Indefinite);
  EXPECT_EQ(classify_definiteness(CMatrix::diag({1.0, -1e-6}), 1e-5).classification, Definiteness::PSD);
}

TEST(Definiteness, ReportInvariants) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix h = random_hermitian(rng, 1 + trial % 4);
    const DefinitenessReport r = classify_definiteness(h);
    EXPECT_LE(r.min_eigenvalue, r.max_eigenvalue);
    if (r.is_pd()) {
      EXPECT_TRUE(r.is_psd());
    }
    // PSD for H implies NSD for -H
    EXPECT_EQ(r.is_psd(), classify_definiteness(-1.0 * h).is_nsd());
  }
}

TEST(Lemmas, SeededSuitePasses) {
  const LemmaSuiteResult r = run_lemma_suite(42, 1000);
  ASSERT_EQ(r.lemmas.size(), 3u);
  for (const auto& l : r.lemmas) {
    EXPECT_EQ(l.trials, 1000u);
    EXPECT_EQ(l.failures, 0u) << l.name;
    EXPECT_LE(l.worst_residual, kLemmaTol) << l.name;
  }
}

TEST(Lemmas, Deterministic) {
  const LemmaSuiteResult a = run_lemma_suite(123, 200), b = run_lemma_suite(123, 200);
  for (std::size_t k = 0; k < a.lemmas.size(); ++k)
    EXPECT_EQ(a.lemmas[k].worst_residual, b.lemmas[k].worst_residual);
}

TEST(Lemmas, FixturesPass) { EXPECT_TRUE(run_lemma_fixtures().pass()); }

TEST(Lemmas, ResidualsDetectViolations) {
  // an indefinite "H" must be caught by the PSD-product and congruence checks
  const CMatrix ind = CMatrix::diag({1.0, -1.0});
  EXPECT_GT(trace_psd_residual(ind, CMatrix::diag({0.0, 1.0})), kLemmaTol);
  EXPECT_GT(congruence_residual(CMatrix::identity(2), ind), kLemmaTol);
}

TEST(Definiteness, UnitaryCongruencePreservesClassification) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    // mix of PSD, NSD and indefinite inputs
    CMatrix h = random_psd_matrix(rng, n);
    if (trial % 3 == 1) h = -1.0 * h;
    if (trial % 3 == 2) h = random_hermitian(rng, n);
    const CMatrix w = eig_hermitian(random_hermitian(rng, n)).vectors;
    EXPECT_EQ(classify_definiteness(h).classification,
              classify_definiteness(hermitian_part(w * h * adjoint(w))).classification)
        << "trial " << trial;
  }
}
