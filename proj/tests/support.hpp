#ifndef RICCATI_TEST_SUPPORT_HPP
#define RICCATI_TEST_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "riccati/config.hpp"
#include "riccati/riccati.hpp"

namespace testing_support {

using namespace riccati;

inline std::string data_path(const std::string& name) {
  return std::string(RICCATI_DATA_DIR) + "/problems/" + name + ".json";
}

inline RunConfig load(const std::string& name) { return parse_config_file(data_path(name)); }

// Problems carrying a certificate that must certify and integrate to t = 50.
inline const std::vector<std::string>& certified_suite() {
  static const std::vector<std::string> names{"tanh_scalar",  "tanh_matrix", "skew_source",
                                              "corollary",    "lambda_shift", "oscillating",
                                              "lambda_timevarying", "skew_boundary"};
  return names;
}

// Members that also satisfy the hypotheses of the linear comparison.
inline const std::vector<std::string>& comparison_suite() {
  static const std::vector<std::string> names{"tanh_scalar", "tanh_matrix", "compare_identity"};
  return names;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = g(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = cplx{g(rng), g(rng)};
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline CMatrix scalar_matrix(cplx c, std::size_t n) { return CMatrix::identity(n) * c; }

inline RiccatiProblem scalar_problem(double p, double q, double r, double s, double horizon) {
  RiccatiProblem prob;
  prob.n = 1;
  prob.P = MatrixTimeFn::constant(CMatrix{{p}});
  prob.Q = MatrixTimeFn::constant(CMatrix{{q}});
  prob.R = MatrixTimeFn::constant(CMatrix{{r}});
  prob.S = MatrixTimeFn::constant(CMatrix{{s}});
  prob.t0 = 0.0;
  prob.horizon = horizon;
  return prob;
}

}  // namespace testing_support

#endif
