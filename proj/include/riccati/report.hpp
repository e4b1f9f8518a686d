#ifndef RICCATI_REPORT_HPP
#define RICCATI_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "riccati/certify.hpp"
#include "riccati/integrate.hpp"

namespace riccati {

/// 17 significant digits, enough to round-trip a double.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Short form for human-readable reports.
inline std::string fmt_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string status_line(const TrajectoryStatus& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s T=%.6f", to_string(s.kind), s.time);
  return buf;
}

/// t, Re/Im of each Z entry (row-major), ||Z||_F, min eig(Z + Z*), step.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double output_dt = 0.0) {
  const std::size_t n = traj.n();
  os << "t";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) os << ",Z" << i << j << "_re,Z" << i << j << "_im";
  os << ",norm_F,min_eig_herm,step\n";
  auto row = [&](double t, const CMatrix& z, double step) {
    os << fmt(t);
    for (const cplx& x : z.data()) os << ',' << fmt(x.real()) << ',' << fmt(x.imag());
    os << ',' << fmt(frobenius_norm(z)) << ',' << fmt(2.0 * hermitian_part_eigenvalues(z).front()) << ','
       << fmt(step) << '\n';
  };
  if (output_dt > 0.0) {
    const double t0 = traj.start_time(), t1 = traj.end_time();
    const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / output_dt + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
      const double t = t0 + static_cast<double>(k) * output_dt;
      row(t, traj.at(t), k == 0 ? 0.0 : output_dt);
    }
    if (t0 + static_cast<double>(count) * output_dt < t1) row(t1, traj.at(t1), t1 - t0 - count * output_dt);
    return;
  }
  for (std::size_t k = 0; k < traj.size(); ++k) row(traj.times()[k], traj.samples()[k], traj.diagnostics()[k].step);
}

inline nlohmann::json to_json(const TrajectoryStatus& s) {
  return {{"kind", to_string(s.kind)}, {"time", s.time}, {"message", s.message}};
}

inline nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const CertReport& r) {
  using nlohmann::json;
  json j;
  j["wording"] = "hypotheses verified numerically on grid G with tolerance tau";
  j["grid"] = {{"points", r.grid.size()},
               {"density", r.grid_density},
               {"t_start", r.grid.empty() ? 0.0 : r.grid.front()},
               {"t_end", r.grid.empty() ? 0.0 : r.grid.back()}};
  j["tolerance"] = r.tol;
  j["condition_I"] = {{"pass", r.condition_I.pass},
                      {"worst_hermiticity_defect", r.condition_I.worst_defect},
                      {"worst_min_eigenvalue", finite_or_null(r.condition_I.worst_min_eig)},
                      {"worst_time", finite_or_null(r.condition_I.worst_time)}};
  j["condition_II"] = {{"pass", r.condition_II.pass},
                       {"mu_extracted", r.condition_II.mu_extracted},
                       {"worst_residual", r.condition_II.worst_residual},
                       {"worst_offdiagonal", r.condition_II.worst_offdiag},
                       {"worst_diagonal_spread", r.condition_II.worst_spread},
                       {"worst_imaginary_mu", r.condition_II.worst_imag},
                       {"worst_time", finite_or_null(r.condition_II.worst_time)},
                       {"mu_samples", r.condition_II.mu_values.size()}};
  j["condition_III"] = {{"pass", r.condition_III.pass},
                        {"worst_max_eigenvalue", finite_or_null(r.condition_III.worst_max_eig)},
                        {"worst_time", finite_or_null(r.condition_III.worst_time)}};
  if (r.initial) {
    j["initial_condition"] = {{"classification", to_string(r.initial->classification)},
                              {"gap_min_eigenvalue", r.initial->gap_min_eig},
                              {"uinv_sum_min_eigenvalue", r.initial->uinv_sum_min_eig}};
  }
  if (r.singular_u_time) j["singular_u_time"] = *r.singular_u_time;
  if (!r.failure.empty()) j["failure"] = r.failure;
  j["failed"] = r.failed_conditions();
  j["verdict"] = to_string(r.verdict());
  return j;
}

inline nlohmann::json to_json(const MonitorResult& m) {
  nlohmann::json j;
  j["verdict"] = to_string(m.verdict);
  j["samples"] = m.records.size();
  j["worst_relative_margin"] = finite_or_null(m.worst_relative_margin);
  double worst_l = std::numeric_limits<double>::infinity();
  double worst_variant = std::numeric_limits<double>::infinity();
  for (const auto& r : m.records) {
    if (r.skipped) continue;
    worst_l = std::min(worst_l, r.l_hermitian_min);
    worst_variant = std::min(worst_variant, r.g_min_t0_variant);
  }
  j["worst_L_hermitian_min"] = finite_or_null(worst_l);
  j["worst_initial_lambda_variant_min"] = finite_or_null(worst_variant);
  return j;
}

inline void write_certify_text(std::ostream& os, const CertReport& r, const MonitorResult* monitor,
                               const TrajectoryStatus* status) {
  os << "hypotheses verified numerically on grid G with tolerance tau\n";
  os << "  grid: " << r.grid.size() << " points on [" << fmt_short(r.grid.front()) << ", "
     << fmt_short(r.grid.back()) << "], density " << fmt_short(r.grid_density)
     << " per unit time; tau = " << fmt_short(r.tol) << "\n";
  auto pf = [](bool b) { return b ? "PASS" : "FAIL"; };
  os << "condition I   : " << pf(r.condition_I.pass)
     << "  worst hermiticity defect " << fmt_short(r.condition_I.worst_defect)
     << ", min eig(PU) " << fmt_short(r.condition_I.worst_min_eig) << "\n";
  os << "condition II  : " << pf(r.condition_II.pass) << "  worst residual "
     << fmt_short(r.condition_II.worst_residual) << " at t=" << fmt_short(r.condition_II.worst_time)
     << (r.condition_II.mu_extracted ? " (mu extracted)" : " (mu supplied)") << "\n";
  os << "condition III : " << pf(r.condition_III.pass) << "  max eig(S_UL + S_UL*) "
     << fmt_short(r.condition_III.worst_max_eig) << " at t=" << fmt_short(r.condition_III.worst_time)
     << "\n";
  if (r.singular_u_time) os << "SINGULAR_U at t=" << fmt_short(*r.singular_u_time) << "\n";
  if (!r.failure.empty()) os << "error: " << r.failure << "\n";
  if (r.initial) {
    os << "initial value : " << to_string(r.initial->classification) << "  min eig(G0) "
       << fmt_short(r.initial->gap_min_eig) << "\n";
  }
  os << "verdict       : " << to_string(r.verdict());
  if (!r.failed_conditions().empty()) os << " (failed: " << r.failed_conditions() << ")";
  os << "\n";
  if (status) os << "trajectory    : " << status_line(*status) << "\n";
  if (monitor) {
    os << "monitor       : " << to_string(monitor->verdict) << "  worst margin min eig(G)/scale "
       << fmt_short(monitor->worst_relative_margin) << "\n";
  }
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "parameter,initial_class,certified,status,t_stop,t_escape\n";
  for (const auto& r : rows) {
    os << fmt(r.parameter) << ',' << to_string(r.initial) << ',' << (r.certified ? "true" : "false")
       << ',' << to_string(r.status.kind) << ',' << fmt(r.status.time) << ','
       << (r.status.kind == Termination::Blowup ? fmt(r.status.time) : std::string()) << '\n';
  }
}

inline void write_compare_csv(std::ostream& os, const CompareResult& c) {
  os << "t,min_eig_Z,min_eig_Ztilde_minus_Z,scale_Z,scale_gap\n";
  for (const auto& r : c.records) {
    os << fmt(r.t) << ',' << fmt(r.z_min_eig) << ',' << fmt(r.gap_min_eig) << ',' << fmt(r.z_scale)
       << ',' << fmt(r.gap_scale) << '\n';
  }
}

}  // namespace riccati

#endif  // RICCATI_REPORT_HPP
