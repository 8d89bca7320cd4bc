#pragma once

// Subcommand dispatch behind the command-line tool. Every subcommand
// validates its request before computing, writes its CSV artifacts only on
// success and maps toolkit errors onto exit codes: 0 success, 2 invalid
// input, 3 solver failure.

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tehom/config.hpp"
#include "tehom/csv.hpp"
#include "tehom/homogenize.hpp"
#include "tehom/recon.hpp"
#include "tehom/scatter.hpp"
#include "tehom/tables.hpp"
#include "tehom/te/analytic.hpp"
#include "tehom/te/fourth_order.hpp"
#include "tehom/te/pencil.hpp"
#include "tehom/te/rate.hpp"

#ifndef TEHOM_VERSION
#define TEHOM_VERSION "dev"
#endif

namespace tehom {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitSolver = 3;

inline const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"homogenize",     "te-analytic", "te-fem",      "rate",
                                              "farfield-synth", "lsm-detect",  "reconstruct", "paper-table"};
  return names;
}

/// Everything a subcommand reads: the experiment configuration plus the
/// per-subcommand arguments that have no place in a config file.
struct RunRequest {
  ExperimentConfig config;
  bool seed_given = false;  // noisy runs must name their seed
  int threads = 0;
  std::optional<double> k;  // farfield-synth wavenumber
  ReconMode mode = ReconMode::Index;  // reconstruct
  std::optional<double> k1;
  ContrastBranch branch = ContrastBranch::Below;
  std::string table;  // paper-table id or "all"
  std::vector<double> k1s;  // rate: fit these instead of solving
  std::optional<double> k_ref;  // rate: absolute errors against k_ref
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;
  std::string message;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FactorizationFailure:
    case ErrorKind::NumericalResonance:
    case ErrorKind::OutOfRange: return kExitSolver;
    default: return kExitInvalid;
  }
}

/// First `count` eigenvalues by the solver the medium calls for.
inline TEResult solve_te_fem(const TEQuery& q, const TEOptions& opts) {
  return q.field.isotropic_identity() ? solve_te_4th(q, opts) : solve_te_pencil(q, opts);
}

namespace detail {

/// Constant disk parameters (a, n) of the configured medium.
inline std::pair<double, double> constant_medium(const ExperimentConfig& c) {
  require(c.medium.tensor == "identity" || c.medium.tensor == "constant", ErrorKind::InvalidParameter,
          "this subcommand needs a constant tensor (identity or constant), got '" + c.medium.tensor + "'");
  require(c.medium.index == "constant", ErrorKind::InvalidParameter,
          "this subcommand needs a constant index, got '" + c.medium.index + "'");
  return {c.medium.tensor == "identity" ? 1.0 : c.medium.a, c.medium.n};
}

inline double disk_radius(const ExperimentConfig& c) {
  const Domain d = c.make_domain();
  require(d.is_disk(), ErrorKind::DomainError, "this subcommand needs a disk domain, got " + d.describe());
  return d.radius;
}

inline std::vector<double> epsilons_or_one(const ExperimentConfig& c) {
  return c.epsilons.empty() ? std::vector<double>{1.0} : c.epsilons;
}

inline CsvTable te_table() { return CsvTable({"method", "epsilon", "k_index", "k_value", "residual", "h"}); }

inline void add_te_rows(CsvTable& t, const TEResult& r, double eps) {
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    t.add({std::string(to_string(r.method)), eps, static_cast<int>(i + 1), r.eigenvalues[i],
           i < r.residuals.size() ? r.residuals[i] : 0.0, r.h});
  }
}

inline void report_warnings(std::ostream& diag, const std::vector<std::string>& w) {
  for (const auto& s : w) diag << "warning: " << s << "\n";
}

inline std::string request_text(const std::string& name, const RunRequest& req) {
  std::string s = "# subcommand = " + name + "\n" + emit_config(req.config);
  if (req.k) s += "# k = " + format_double(*req.k) + "\n";
  if (req.k1) s += "# k1 = " + format_double(*req.k1) + "\n";
  if (name == "reconstruct") {
    s += "# mode = " + std::string(to_string(req.mode)) + "\n";
    s += std::string("# branch = ") + (req.branch == ContrastBranch::Below ? "below" : "above") + "\n";
  }
  if (name == "paper-table") s += "# table = " + req.table + "\n";
  if (!req.k1s.empty()) {
    s += "# k1s = ";
    for (std::size_t i = 0; i < req.k1s.size(); ++i) s += (i ? ", " : "") + format_double(req.k1s[i]);
    s += "\n";
  }
  if (req.k_ref) s += "# k_ref = " + format_double(*req.k_ref) + "\n";
  return s;
}

/// Validation that must pass before any solver runs.
inline void validate_request(const std::string& name, const RunRequest& req) {
  const auto& c = req.config;
  c.validate();
  require(req.threads >= 0, ErrorKind::InvalidParameter, "threads must be nonnegative");
  if (name == "te-analytic" || name == "farfield-synth" || name == "lsm-detect") {
    disk_radius(c);
    constant_medium(c);
  }
  if (name == "farfield-synth") {
    require(req.k.has_value() && *req.k > 0.0, ErrorKind::InvalidParameter, "farfield-synth needs --k > 0");
  }
  if ((name == "farfield-synth" || name == "lsm-detect") && c.delta > 0.0) {
    require(req.seed_given, ErrorKind::InvalidParameter, "noisy runs (delta > 0) need an explicit seed");
  }
  if (name == "reconstruct") {
    require(req.k1.has_value() && *req.k1 > 0.0, ErrorKind::InvalidParameter, "reconstruct needs --k1 > 0");
  }
  if (name == "rate") {
    if (!req.k1s.empty()) {
      require(req.k1s.size() == c.epsilons.size(), ErrorKind::InvalidParameter,
              "--k1s needs one value per epsilon");
    }
    require(c.epsilons.size() >= 3, ErrorKind::InvalidParameter, "rate needs at least three epsilons");
  }
  if (name == "paper-table") {
    const auto& ids = paper_table_ids();
    require(req.table == "all" || std::find(ids.begin(), ids.end(), req.table) != ids.end(),
            ErrorKind::InvalidParameter, "unsupported table id '" + req.table + "' (t1 .. t9 or all)");
  }
}

}  // namespace detail

/// Runs one subcommand; artifacts go to req.config.output.
inline RunOutcome run_subcommand(const std::string& name, const RunRequest& req, std::ostream& diag) {
  RunOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto& names = subcommand_names();
    require(std::find(names.begin(), names.end(), name) != names.end(), ErrorKind::InvalidParameter,
            "unknown subcommand '" + name + "'");
    detail::validate_request(name, req);
    const ExperimentConfig& c = req.config;
    TEOptions opts = c.te_options();
    opts.threads = req.threads;

    std::vector<std::pair<std::string, CsvTable>> tables;
    std::map<std::string, std::string> extra;

    if (name == "homogenize") {
      const int div = c.divisions > 0 ? c.divisions : 32;
      const EffectiveMedium em = homogenize(c.make_field(), div);
      CsvTable t({"quantity", "xx", "xy", "yx", "yy"});
      for (const auto& [label, m] : {std::pair<const char*, const Mat2*>{"a_h", &em.a_h}, {"voigt", &em.voigt},
                                     {"reuss", &em.reuss}}) {
        t.add({label, (*m)(0, 0), (*m)(0, 1), (*m)(1, 0), (*m)(1, 1)});
      }
      t.add({"n_h", em.n_h, 0.0, 0.0, em.n_h});
      tables.emplace_back("homogenize.csv", std::move(t));
    } else if (name == "te-analytic") {
      const auto [a, n] = detail::constant_medium(c);
      const TEResult r = roots_disk(detail::disk_radius(c), a, n, c.k_min, c.k_max, c.count);
      detail::report_warnings(diag, r.warnings);
      CsvTable t = detail::te_table();
      detail::add_te_rows(t, r, 0.0);
      tables.emplace_back("te_analytic.csv", std::move(t));
    } else if (name == "te-fem") {
      CsvTable t = detail::te_table();
      for (double eps : detail::epsilons_or_one(c)) {
        const TEResult r = solve_te_fem({c.make_domain(), c.make_field(eps), c.k_min, c.k_max, c.count}, opts);
        detail::report_warnings(diag, r.warnings);
        detail::add_te_rows(t, r, eps);
      }
      tables.emplace_back("te_fem.csv", std::move(t));
    } else if (name == "rate") {
      std::vector<double> ks = req.k1s;
      if (ks.empty()) {
        for (double eps : c.epsilons) {
          const TEResult r = solve_te_fem({c.make_domain(), c.make_field(eps), c.k_min, c.k_max, 1}, opts);
          detail::report_warnings(diag, r.warnings);
          ks.push_back(r.first());
        }
      }
      const RateFit fit = fit_rate(c.epsilons, ks, req.k_ref);
      detail::report_warnings(diag, fit.warnings);
      CsvTable pts({"epsilon", "k1"});
      for (std::size_t i = 0; i < ks.size(); ++i) pts.add({c.epsilons[i], ks[i]});
      CsvTable f({"kind", "p", "log_c", "points"});
      f.add({fit.relative() ? "relative" : "absolute", fit.p, fit.c, fit.errors.size()});
      tables.emplace_back("rate_points.csv", std::move(pts));
      tables.emplace_back("rate_fit.csv", std::move(f));
    } else if (name == "farfield-synth") {
      const auto [a, n] = detail::constant_medium(c);
      FarFieldMatrix f = farfield_disk(*req.k, detail::disk_radius(c), a, n, c.directions);
      if (c.delta > 0.0) add_noise(f, c.delta, c.seed);
      CsvTable t({"theta", "phi", "re", "im"});
      for (int i = 0; i < f.size(); ++i)
        for (int j = 0; j < f.size(); ++j) t.add({f.thetas[i], f.phis[j], f.entries(i, j).real(), f.entries(i, j).imag()});
      tables.emplace_back("farfield.csv", std::move(t));
    } else if (name == "lsm-detect") {
      const auto [a, n] = detail::constant_medium(c);
      DetectOptions d;
      d.step = c.step;
      d.directions = c.directions;
      d.num_z = c.num_z;
      d.spike_factor = c.spike_factor;
      d.seed = c.seed;
      d.threads = req.threads;
      const DetectionCurve curve = detect_te(c.k_min, c.k_max, detail::disk_radius(c), a, n, c.delta, d);
      detail::report_warnings(diag, curve.warnings);
      CsvTable t({"k", "gnorm", "is_spike"});
      for (std::size_t i = 0; i < curve.ks.size(); ++i)
        t.add({curve.ks[i], curve.gnorm[i], static_cast<int>(curve.is_spike[i])});
      std::string found;
      for (double k : curve.detected) found += (found.empty() ? "" : " ") + csv_number(k);
      extra["detected"] = found.empty() ? "none" : found;
      tables.emplace_back("detection.csv", std::move(t));
    } else if (name == "reconstruct") {
      const Domain dom = c.make_domain();
      const ReconstructionReport rep = dom.is_disk() ? invert_disk(req.mode, *req.k1, dom, req.branch)
                                                     : invert_fem(req.mode, *req.k1, dom, opts, req.branch);
      detail::report_warnings(diag, rep.warnings);
      CsvTable t({"mode", "domain", "measured_k1", "value", "residual", "lo", "hi", "converged", "forward_solves"});
      t.add({std::string(to_string(rep.mode)), rep.domain.describe(), rep.measured_k1, rep.value, rep.residual, rep.lo,
             rep.hi, rep.converged ? "yes" : "no", rep.forward_solves});
      tables.emplace_back("reconstruct.csv", std::move(t));
    } else if (name == "paper-table") {
      TableOptions to;
      to.te.h_max = c.h_max;
      to.te.threads = req.threads;
      const std::vector<std::string> ids =
          req.table == "all" ? paper_table_ids() : std::vector<std::string>{req.table};
      for (const auto& id : ids) {
        PaperTable pt = paper_table(id, to);
        diag << id << ": " << (pt.pass ? "pass" : "FAIL") << " (" << csv_number(pt.seconds) << " s)\n";
        for (const auto& note : pt.notes) diag << id << ": " << note << "\n";
        for (const auto& [k, v] : pt.scalars) extra[id + "." + k] = csv_number(v);
        extra[id + ".pass"] = pt.pass ? "true" : "false";
        tables.emplace_back(id + ".csv", std::move(pt.csv));
      }
    }

    Manifest m;
    m.tool = "tehom " + name;
    m.version = TEHOM_VERSION;
    m.config_text = detail::request_text(name, req);
    m.config_hash = content_hash(m.config_text);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.extra = extra;
    for (const auto& [file, table] : tables) out.artifacts.push_back(write_artifact(c.output, file, table, m));
    out.message = "wrote " + std::to_string(out.artifacts.size()) + " artifact(s) to " + c.output;
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.message = e.what();
    out.artifacts.clear();
  } catch (const std::filesystem::filesystem_error& e) {
    out.exit_code = kExitInvalid;
    out.message = e.what();
  }
  return out;
}

}  // namespace tehom
