#ifndef RICCATI_CLI_HPP
#define RICCATI_CLI_HPP

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "riccati/certify.hpp"
#include "riccati/config.hpp"
#include "riccati/lemmas.hpp"
#include "riccati/report.hpp"

namespace riccati::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitHypothesisFailed = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitOtherTermination = 3;
inline constexpr int kExitSoundnessAlarm = 4;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitConfig = 65;

struct CommandOptions {
  std::string config_path;
  std::string out_path;
  std::optional<double> grid_density;
  std::optional<double> tol;
  std::optional<double> horizon;
  std::uint64_t seed = 42;
  long long trials = 1000;
  bool no_solve = false;
  std::vector<double> values;  ///< scan parameters; overrides the config list
};

/// RICCATI_LOG: 0 (quiet, default), 1 (info), 2 (debug).
inline int log_level() {
  const char* v = std::getenv("RICCATI_LOG");
  if (!v) return 0;
  const std::string s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return std::atoi(v);
}

inline void log(std::ostream& err, int level, const std::string& msg) {
  if (log_level() >= level) err << "[riccati] " << msg << "\n";
}

namespace detail {

inline RunConfig load(const CommandOptions& o) {
  if (o.config_path.empty()) throw Error(ErrorCode::InvalidArgument, "--config is required");
  RunConfig cfg = parse_config_file(o.config_path);
  if (o.horizon) {
    if (!(*o.horizon > cfg.problem.t0)) throw Error(ErrorCode::InvalidArgument, "--horizon must exceed t0");
    cfg.problem.horizon = *o.horizon;
  }
  if (cfg.certificate) {
    if (o.grid_density) cfg.certificate->grid_density = *o.grid_density;
    if (o.tol) cfg.certificate->tol = *o.tol;
  }
  return cfg;
}

/// Writes to --out when given, otherwise to `fallback`.
template <class Fn>
void emit(const CommandOptions& o, std::ostream& fallback, Fn&& write) {
  if (o.out_path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + o.out_path + "'");
  write(f);
}

template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ParseError:
      case ErrorCode::DimMismatch:
        return kExitConfig;
      case ErrorCode::InvalidArgument:
        return kExitUsage;
      default:
        return kExitOtherTermination;
    }
  }
}

}  // namespace detail

/// Exit 0 on COMPLETED, 2 on BLOWUP, 3 otherwise. The CSV goes to --out or
/// `out`; the status line goes to `err`.
inline int cmd_solve(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const RunConfig cfg = detail::load(o);
    log(err, 1, "solving '" + cfg.name + "' on [" + fmt_short(cfg.problem.t0) + ", " +
                    fmt_short(cfg.problem.horizon) + "]");
    const Trajectory traj = integrate_riccati(cfg.problem, cfg.z0, cfg.integrator);
    log(err, 2, std::to_string(traj.size()) + " accepted steps");
    detail::emit(o, out, [&](std::ostream& os) { write_trajectory_csv(os, traj, cfg.output_dt); });
    err << status_line(traj.status()) << "\n";
    switch (traj.status().kind) {
      case Termination::Completed: return kExitOk;
      case Termination::Blowup: return kExitBlowup;
      default: return kExitOtherTermination;
    }
  });
}

/// Exit 0 when certified (and, unless --no-solve, the invariant held along
/// the integrated trajectory), 1 when a hypothesis or the initial-value cone
/// test failed, 4 when a certified run violated the invariant or did not
/// reach the horizon.
inline int cmd_certify(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const RunConfig cfg = detail::load(o);
    if (!cfg.certificate) throw Error(ErrorCode::InvalidArgument, "config has no certificate");
    nlohmann::json j;
    j["name"] = cfg.name;
    Certificate cert;
    try {
      cert = build_certificate(cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularP) throw;
      out << "SINGULAR_P at t=" << fmt_short(e.time()) << "\nverdict       : "
          << to_string(Verdict::HypothesisFailed) << " (failed: SINGULAR_P)\n";
      j["verdict"] = to_string(Verdict::HypothesisFailed);
      j["failed"] = "SINGULAR_P";
      j["singular_p_time"] = e.time();
      if (!o.out_path.empty()) detail::emit(o, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
      return kExitHypothesisFailed;
    }
    const CertReport report = certify(cert, cfg.problem, cfg.z0);
    j["report"] = to_json(report);

    std::optional<MonitorResult> monitor;
    std::optional<TrajectoryStatus> status;
    if (!o.no_solve && report.certified()) {
      const Trajectory traj = integrate_riccati(cfg.problem, cfg.z0, cfg.integrator);
      status = traj.status();
      monitor = monitor_invariant(cert, cfg.problem, traj, report);
      j["trajectory"] = to_json(*status);
      j["monitor"] = to_json(*monitor);
    }
    write_certify_text(out, report, monitor ? &*monitor : nullptr, status ? &*status : nullptr);

    int code = report.certified() ? kExitOk : kExitHypothesisFailed;
    if (code == kExitOk && status &&
        (status->kind != Termination::Completed || monitor->verdict == MonitorVerdict::Violated)) {
      out << "SOLVER-ACCURACY ANOMALY: certified problem "
          << (status->kind != Termination::Completed ? "did not reach the horizon"
                                                     : "violated the monitored invariant")
          << "\n";
      j["anomaly"] = true;
      code = kExitSoundnessAlarm;
    }
    j["exit_code"] = code;
    if (!o.out_path.empty()) detail::emit(o, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    return code;
  });
}

inline int cmd_scan(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const RunConfig cfg = detail::load(o);
    if (!cfg.certificate) throw Error(ErrorCode::InvalidArgument, "config has no certificate");
    const std::size_t n = cfg.problem.n;
    const CMatrix base = cfg.scan ? cfg.scan->base : CMatrix(n);
    const CMatrix direction = cfg.scan ? cfg.scan->direction : CMatrix::identity(n);
    std::vector<double> values = o.values;
    if (values.empty() && cfg.scan) values = cfg.scan->values;
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no scan values (config scan.values or --values)");
    const Certificate cert = build_certificate(cfg);
    const std::vector<ScanRow> rows =
        scan_initial_values(cert, cfg.problem, base, direction, values, cfg.integrator);
    detail::emit(o, out, [&](std::ostream& os) { write_scan_csv(os, rows); });
    return kExitOk;
  });
}

inline int cmd_check_lemmas(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  if (o.trials < 1) {
    err << "error: --trials must be at least 1\n";
    return kExitUsage;
  }
  const LemmaSuiteResult fixtures = run_lemma_fixtures();
  const LemmaSuiteResult random = run_lemma_suite(o.seed, static_cast<std::size_t>(o.trials));
  out << "seed " << o.seed << ", " << o.trials << " trials, tolerance " << fmt_short(kLemmaTol) << "\n";
  for (std::size_t k = 0; k < random.lemmas.size(); ++k) {
    const LemmaResult& r = random.lemmas[k];
    const LemmaResult& f = fixtures.lemmas[k];
    const bool pass = r.pass() && f.pass();
    out << (pass ? "PASS " : "FAIL ") << r.name << "  worst residual " << fmt(r.worst_residual)
        << "  failures " << r.failures << "/" << r.trials << "  fixtures "
        << (f.pass() ? "ok" : "FAILED") << "\n";
  }
  return random.pass() && fixtures.pass() ? kExitOk : kExitHypothesisFailed;
}

/// Exit 0 when 0 <= Z <= Ztilde held, 1 on a violated hypothesis, 4 when the
/// sandwich failed numerically.
inline int cmd_compare(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const RunConfig cfg = detail::load(o);
    const double density = o.grid_density.value_or(cfg.certificate ? cfg.certificate->grid_density : 64.0);
    const double tol = o.tol.value_or(kDefaultDefinitenessTol);
    CompareResult res;
    try {
      res = compare_with_linear(cfg.problem, cfg.z0, cfg.integrator, density, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisViolation) throw;
      err << e.what() << "\n";
      return kExitHypothesisFailed;
    }
    detail::emit(o, out, [&](std::ostream& os) { write_compare_csv(os, res); });
    err << "comparison " << (res.holds ? "HOLDS" : "VIOLATED") << "  riccati "
        << status_line(res.riccati_status) << "  worst margins: Z " << fmt_short(res.worst_z_margin)
        << ", Ztilde - Z " << fmt_short(res.worst_gap_margin) << "\n";
    return res.holds ? kExitOk : kExitSoundnessAlarm;
  });
}

}  // namespace riccati::cli

#endif  // RICCATI_CLI_HPP
