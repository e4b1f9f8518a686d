#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace riccati;
using testing_support::certified_suite;
using testing_support::load;

namespace {

using T = ScalarBasisTerm;

RiccatiProblem unit_problem(const CMatrix& p, const CMatrix& q, const CMatrix& r, const CMatrix& s,
                            double horizon = 5.0) {
  RiccatiProblem prob;
  prob.n = p.n();
  prob.P = MatrixTimeFn::constant(p);
  prob.Q = MatrixTimeFn::constant(q);
  prob.R = MatrixTimeFn::constant(r);
  prob.S = MatrixTimeFn::constant(s);
  prob.horizon = horizon;
  return prob;
}

const CMatrix I2 = CMatrix::identity(2);
const CMatrix Z2 = CMatrix(2);

Certificate identity_extracting_mu() {
  Certificate c = identity_certificate(2);
  c.mu.reset();
  return c;
}

MatrixTimeFn bump(std::size_t i, std::size_t j, cplx v, std::size_t n = 2) {
  CMatrix m(n);
  m(i, j) = v;
  return MatrixTimeFn::constant(m);
}

}  // namespace

TEST(ConditionI, Examples) {
  const Certificate c = identity_certificate(2);
  EXPECT_TRUE(check_condition_I(c, unit_problem(I2, Z2, Z2, -1.0 * I2)).pass);
  EXPECT_FALSE(check_condition_I(c, unit_problem(CMatrix{{0.0, 1.0}, {0.0, 0.0}}, Z2, Z2, Z2)).pass);
  RiccatiProblem p = unit_problem(I2, Z2, Z2, Z2);
  p.P = MatrixTimeFn::from_entries(2, {{T::exp(-1.0, 1.0)}, {}, {}, {T::constant(1.0)}});
  EXPECT_TRUE(check_condition_I(c, p).pass);
}

TEST(ConditionII, Examples) {
  const Certificate c = identity_extracting_mu();
  const ConditionII two = check_condition_II(c, unit_problem(I2, Z2, 2.0 * I2, Z2));
  EXPECT_TRUE(two.pass);
  EXPECT_TRUE(two.mu_extracted);
  for (double mu : two.mu_values) EXPECT_DOUBLE_EQ(mu, 2.0);

  const cplx i{0.0, 1.0};
  const CMatrix q{{1.0, 2.0 + i}, {-3.0, 0.5 * i}};
  const ConditionII zero = check_condition_II(c, unit_problem(I2, q, adjoint(q), Z2));
  EXPECT_TRUE(zero.pass);
  for (double mu : zero.mu_values) EXPECT_DOUBLE_EQ(mu, 0.0);

  const ConditionII off = check_condition_II(c, unit_problem(I2, Z2, CMatrix{{1.0, 1.0}, {0.0, 1.0}}, Z2));
  EXPECT_FALSE(off.pass);
  EXPECT_DOUBLE_EQ(off.worst_offdiag, 1.0);
}

TEST(ConditionII, SuppliedMuIsCheckedAbsolutely) {
  Certificate c = identity_certificate(2);
  c.mu = MatrixTimeFn::constant(CMatrix{{2.0}});
  EXPECT_TRUE(check_condition_II(c, unit_problem(I2, Z2, 2.0 * I2, Z2)).pass);
  c.mu = MatrixTimeFn::constant(CMatrix{{1.0}});
  const ConditionII bad = check_condition_II(c, unit_problem(I2, Z2, 2.0 * I2, Z2));
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.worst_residual, std::sqrt(2.0), 1e-15);
}

TEST(ConditionII, ImaginaryMuRejected) {
  const cplx i{0.0, 1.0};
  EXPECT_FALSE(check_condition_II(identity_extracting_mu(), unit_problem(I2, Z2, i * I2, Z2)).pass);
}

TEST(ConditionIII, Examples) {
  const Certificate c = identity_certificate(2);
  EXPECT_TRUE(check_condition_III(c, unit_problem(I2, Z2, Z2, -1.0 * I2)).pass);
  EXPECT_TRUE(check_condition_III(c, unit_problem(I2, Z2, Z2, CMatrix{{0.0, 2.0}, {-2.0, 0.0}})).pass);
  EXPECT_FALSE(check_condition_III(c, unit_problem(I2, Z2, Z2, CMatrix{{0.0, 2.0}, {0.0, 0.0}})).pass);
  EXPECT_FALSE(check_condition_III(c, unit_problem(I2, Z2, Z2, I2)).pass);
}

TEST(InitialCondition, Examples) {
  const Certificate c = identity_certificate(2);
  const RiccatiProblem p = unit_problem(I2, Z2, Z2, -1.0 * I2);
  const InitialCheck strict = check_initial_condition(c, p, I2);
  EXPECT_EQ(strict.classification, InitialClass::Strict);
  EXPECT_DOUBLE_EQ(strict.gap_min_eig, 2.0);
  EXPECT_EQ(check_initial_condition(c, p, Z2).classification, InitialClass::NonStrict);
  EXPECT_EQ(check_initial_condition(c, p, -1.0 * I2).classification, InitialClass::Fail);
}

TEST(InitialCondition, EpsilonShiftMakesStrict) {
  const RunConfig cfg = load("tanh");
  const Certificate c = build_certificate(cfg);
  EXPECT_EQ(check_initial_condition(c, cfg.problem, cfg.z0).classification, InitialClass::NonStrict);
  const CMatrix shifted = cfg.z0 + 1e-6 * CMatrix::identity(cfg.problem.n);
  EXPECT_EQ(check_initial_condition(c, cfg.problem, shifted).classification, InitialClass::Strict);
}

TEST(Certify, SingularUReportedWithTime) {
  const RiccatiProblem p = unit_problem(I2, Z2, Z2, -1.0 * I2, 4.0);
  Certificate c = identity_certificate(2);
  // U(t) = diag(1, t - 2) is singular at the grid point t = 2
  c.U = MatrixTimeFn::from_entries(2, {{T::constant(1.0)}, {}, {}, {T::poly(1, 1.0), T::constant(-2.0)}});
  const CertReport r = certify(c, p, I2);
  ASSERT_TRUE(r.singular_u_time.has_value());
  EXPECT_DOUBLE_EQ(*r.singular_u_time, 2.0);
  EXPECT_EQ(r.verdict(), Verdict::HypothesisFailed);
  EXPECT_NE(r.failed_conditions().find("SINGULAR_U"), std::string::npos);
}

TEST(Certify, BundledSuiteCertifiesStrict) {
  for (const std::string& name : certified_suite()) {
    const RunConfig cfg = load(name);
    const CertReport r = certify(build_certificate(cfg), cfg.problem, cfg.z0);
    EXPECT_EQ(r.verdict(), Verdict::CertifiedStrict) << name << " failed: " << r.failed_conditions();
  }
}

TEST(Certify, NegativeControls) {
  {
    RunConfig cfg = load("tanh_matrix");
    cfg.problem.P = cfg.problem.P + bump(0, 1, 1e-3);
    const CertReport r = certify(build_certificate(cfg), cfg.problem, cfg.z0);
    EXPECT_EQ(r.failed_conditions(), "I");
  }
  {
    RunConfig cfg = load("tanh_matrix");
    cfg.problem.R = cfg.problem.R + bump(0, 1, 1e-3);
    const CertReport r = certify(build_certificate(cfg), cfg.problem, cfg.z0);
    EXPECT_EQ(r.failed_conditions(), "II");
    EXPECT_NEAR(r.condition_II.worst_residual, 1e-3, 1e-12);
  }
  {
    RunConfig cfg = load("skew_boundary");
    cfg.problem.S = cfg.problem.S + MatrixTimeFn::constant(1e-3 * CMatrix::identity(2));
    const CertReport r = certify(build_certificate(cfg), cfg.problem, cfg.z0);
    EXPECT_EQ(r.failed_conditions(), "III");
    EXPECT_NEAR(r.condition_III.worst_max_eig, 2e-3, 1e-12);
  }
}

TEST(Certify, ComparisonProblemsPassIdentityCertificate) {
  for (const std::string& name : testing_support::comparison_suite()) {
    const RunConfig cfg = load(name);
    const CertReport r = certify(identity_certificate(cfg.problem.n), cfg.problem, cfg.z0);
    EXPECT_TRUE(r.conditions_hold()) << name;
  }
}

TEST(Monitor, TanhStrictHolds) {
  const RunConfig cfg = load("tanh_matrix");
  RunConfig tanh = cfg;
  tanh.problem.Q = tanh.problem.R = MatrixTimeFn::zero(2);
  const Certificate c = identity_certificate(2);
  const CertReport rep = certify(c, tanh.problem, tanh.z0);
  const Trajectory tr = integrate_riccati(tanh.problem, tanh.z0);
  const MonitorResult m = monitor_invariant(c, tanh.problem, tr, rep);
  EXPECT_EQ(m.verdict, MonitorVerdict::Holds);
  // Z = z(t) I with z between 1/2 and 1: min eig of Z + Z* >= 1
  for (const auto& rec : m.records) EXPECT_GE(rec.g_min, 1.0 - 1e-9);
}

TEST(Monitor, NonStrictStaysNonNegative) {
  const RunConfig cfg = load("tanh");
  const Certificate c = build_certificate(cfg);
  const CertReport rep = certify(c, cfg.problem, cfg.z0);
  ASSERT_EQ(rep.verdict(), Verdict::CertifiedNonStrict);
  const MonitorResult m = monitor_invariant(c, cfg.problem, integrate_riccati(cfg.problem, cfg.z0), rep);
  for (const auto& rec : m.records) EXPECT_GE(rec.g_min, -1e-9);
}

TEST(Monitor, UncertifiedReportYieldsNoRecords) {
  RunConfig cfg = load("skew_boundary");
  cfg.problem.S = cfg.problem.S + MatrixTimeFn::constant(CMatrix::identity(2));
  const Certificate c = build_certificate(cfg);
  const CertReport rep = certify(c, cfg.problem, cfg.z0);
  const MonitorResult m = monitor_invariant(c, cfg.problem, integrate_riccati(cfg.problem, cfg.z0), rep);
  EXPECT_EQ(m.verdict, MonitorVerdict::NotCertified);
  EXPECT_TRUE(m.records.empty());
}

TEST(Soundness, CertifiedSuiteCompletesAndHolds) {
  for (const std::string& name : certified_suite()) {
    const RunConfig cfg = load(name);
    const Certificate c = build_certificate(cfg);
    const CertReport rep = certify(c, cfg.problem, cfg.z0);
    const Trajectory tr = integrate_riccati(cfg.problem, cfg.z0, cfg.integrator);
    EXPECT_EQ(tr.status().kind, Termination::Completed) << name;
    EXPECT_EQ(tr.end_time(), 50.0) << name;
    EXPECT_EQ(monitor_invariant(c, cfg.problem, tr, rep).verdict, MonitorVerdict::Holds) << name;
  }
}

TEST(TransformEquivalence, CertifiedSuite) {
  for (const std::string& name : certified_suite()) {
    const RunConfig cfg = load(name);
    const Certificate c = build_certificate(cfg);
    const Trajectory tr = integrate_riccati(cfg.problem, cfg.z0, cfg.integrator);
    for (double t = 0.05; t < 50.0; t += 0.5) {
      EXPECT_LE(transform_residual(c, cfg.problem, tr, t), 1e-6) << name << " t=" << t;
    }
  }
}

TEST(Corollary, Examples) {
  const RiccatiProblem id = unit_problem(I2, Z2, Z2, -1.0 * I2);
  const Certificate c = corollary_certificate(id);
  EXPECT_EQ(c.U.eval(1.0), I2);
  const CertReport a = certify(c, id, I2), b = certify(identity_certificate(2), id, I2);
  EXPECT_EQ(a.verdict(), b.verdict());
  EXPECT_EQ(a.condition_III.worst_max_eig, b.condition_III.worst_max_eig);

  EXPECT_TRUE(check_condition_I(corollary_certificate(unit_problem(2.0 * I2, Z2, Z2, Z2)),
                                unit_problem(2.0 * I2, Z2, Z2, Z2))
                  .pass);

  RiccatiProblem dp = unit_problem(I2, Z2, Z2, Z2);
  dp.P = MatrixTimeFn::from_entries(2, {{T::constant(1.0)}, {}, {}, {T::exp(-1.0, 1.0)}});
  const Certificate dc = corollary_certificate(dp);
  const CertificateFrame f = evaluate_frame(dc, dp, 1.5);
  EXPECT_NEAR((f.P * f.U)(1, 1).real(), std::exp(-3.0), 1e-15);
  EXPECT_TRUE(check_condition_I(dc, dp).pass);
}

TEST(Corollary, SingularPThrows) {
  RiccatiProblem p = unit_problem(I2, Z2, Z2, Z2, 3.0);
  p.P = MatrixTimeFn::from_entries(2, {{T::constant(1.0)}, {}, {}, {T::poly(1, 1.0), T::constant(-1.0)}});
  try {
    corollary_certificate(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularP);
    EXPECT_DOUBLE_EQ(e.time(), 1.0);
  }
}

TEST(Compare, TanhBelowLinearGrowth) {
  const RunConfig cfg = load("compare_identity");
  const CompareResult r = compare_with_linear(cfg.problem, cfg.z0);
  EXPECT_TRUE(r.holds);
  for (const auto& rec : r.records) {
    EXPECT_NEAR(rec.z_min_eig, std::tanh(rec.t), 1e-7);
    EXPECT_NEAR(rec.gap_min_eig, rec.t - std::tanh(rec.t), 1e-7);
  }
}

TEST(Compare, ZeroSourceIsEqualityBoundary) {
  const CompareResult r = compare_with_linear(unit_problem(I2, Z2, Z2, Z2), Z2);
  EXPECT_TRUE(r.holds);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.z_min_eig, 0.0);
    EXPECT_EQ(rec.gap_min_eig, 0.0);
  }
}

TEST(Compare, DiagonalProblemMatchesScalarOracles) {
  // z' = -p z^2 - s per entry with p > 0, s < 0: z = sqrt(-s/p) tanh(sqrt(-s p) t)
  const double p1 = 0.7, p2 = 2.0, s1 = -1.5, s2 = -0.2;
  const RiccatiProblem prob = unit_problem(CMatrix::diag({p1, p2}), Z2, Z2, CMatrix::diag({s1, s2}));
  const CompareResult r = compare_with_linear(prob, Z2);
  EXPECT_TRUE(r.holds);
  const Trajectory z = integrate_riccati(prob, Z2);
  auto oracle = [](double p, double s, double t) { return std::sqrt(-s / p) * std::tanh(std::sqrt(-s * p) * t); };
  for (double t : {0.5, 2.0, 5.0}) {
    EXPECT_NEAR(z.at(t)(0, 0).real(), oracle(p1, s1, t), 1e-7);
    EXPECT_NEAR(z.at(t)(1, 1).real(), oracle(p2, s2, t), 1e-7);
  }
}

TEST(Compare, HypothesisViolationNamesHypothesis) {
  auto expect_violation = [](const RiccatiProblem& p, const CMatrix& z0, const std::string& what) {
    try {
      compare_with_linear(p, z0);
      ADD_FAILURE() << "expected violation of " << what;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::HypothesisViolation);
      EXPECT_NE(std::string(e.what()).find(what), std::string::npos) << e.what();
    }
  };
  expect_violation(unit_problem(-1.0 * I2, Z2, Z2, Z2), Z2, "P(t)");
  expect_violation(unit_problem(I2, Z2, Z2, CMatrix{{-1.0, 1.0}, {-1.0, -1.0}}), Z2, "S(t)");
  expect_violation(unit_problem(I2, I2, Z2, Z2), Z2, "R(t)");
  expect_violation(unit_problem(I2, Z2, Z2, Z2), -1.0 * I2, "Z0");
}

TEST(Scan, TanhFamily) {
  const RunConfig cfg = load("tanh_scan");
  const std::vector<ScanRow> rows =
      scan_initial_values(build_certificate(cfg), cfg.problem, cfg.scan->base, cfg.scan->direction, cfg.scan->values);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].initial, InitialClass::Fail);
  EXPECT_FALSE(rows[0].certified);
  EXPECT_EQ(rows[1].initial, InitialClass::NonStrict);
  EXPECT_EQ(rows[2].initial, InitialClass::Strict);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(rows[k].parameter, cfg.scan->values[k]);
}

TEST(Scan, NegativePNeverCertifies) {
  const RiccatiProblem p = testing_support::scalar_problem(-1, 0, 0, 0, 2);
  const std::vector<ScanRow> rows =
      scan_initial_values(identity_certificate(1), p, CMatrix(1), CMatrix::identity(1), {0.0, 0.5, 1.0});
  for (const auto& r : rows) EXPECT_FALSE(r.certified);
  EXPECT_EQ(rows[2].status.kind, Termination::Blowup);
}

TEST(Scan, CertifiedGridCompletesInOrder) {
  const RunConfig cfg = load("tanh_matrix");
  std::vector<double> alphas;
  for (int k = 0; k <= 12; ++k) alphas.push_back(0.25 * k);
  const std::vector<ScanRow> rows = scan_initial_values(build_certificate(cfg), cfg.problem, CMatrix(2),
                                                        CMatrix::identity(2), alphas);
  ASSERT_EQ(rows.size(), alphas.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].parameter, alphas[k]);
    EXPECT_TRUE(rows[k].certified);
    EXPECT_EQ(rows[k].status.kind, Termination::Completed);
  }
}
