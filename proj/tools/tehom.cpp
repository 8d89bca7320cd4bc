// Command-line front end. Every subcommand accepts --config FILE and flag
// overrides of the config keys; see `tehom <subcommand> --help`.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tehom/cli.hpp"

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::string> domain, tensor, index, output;
  std::optional<double> disk, a, n, a1, a2, n1, n2, a_out, n_out, angle;
  std::optional<double> k_min, k_max, h_max, delta, step, spike_factor;
  std::optional<int> count, divisions, scan_steps, directions, num_z;
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons;
  bool allow_voids = false;
  int threads = 0;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_file, "Experiment config file")->check(CLI::ExistingFile);
  sub->add_option("--domain", o.domain, "disk:R or square:lo,hi");
  sub->add_option("--disk", o.disk, "Disk radius (same as --domain disk:R)");
  sub->add_option("--tensor", o.tensor, "identity|constant|sincos|rotated|checkerboard|voids");
  sub->add_option("--index", o.index, "constant|sincos|layered|checkerboard|voids");
  sub->add_option("--a", o.a, "Constant tensor value (selects --tensor constant)");
  sub->add_option("--n", o.n, "Constant index value (selects --index constant)");
  sub->add_option("--a1", o.a1, "Checkerboard tensor, first phase");
  sub->add_option("--a2", o.a2, "Checkerboard tensor, second phase");
  sub->add_option("--n1", o.n1, "Checkerboard index, first phase");
  sub->add_option("--n2", o.n2, "Checkerboard index, second phase");
  sub->add_option("--a-out", o.a_out, "Voids tensor outside the inclusion");
  sub->add_option("--n-out", o.n_out, "Voids index outside the inclusion");
  sub->add_option("--angle", o.angle, "Rotation angle of the rotated tensor");
  sub->add_option("--epsilons", o.epsilons, "Periods, comma separated")->delimiter(',');
  sub->add_option("--k-min", o.k_min, "Lower end of the k-window");
  sub->add_option("--k-max", o.k_max, "Upper end of the k-window");
  sub->add_option("--count", o.count, "Number of eigenvalues");
  sub->add_option("--h-max", o.h_max, "Mesh size (0 = automatic)");
  sub->add_option("--divisions", o.divisions, "Square or cell mesh divisions (0 = automatic)");
  sub->add_option("--scan-steps", o.scan_steps, "Fixed-point tau grid");
  sub->add_flag("--allow-voids", o.allow_voids, "Accept phases with n = 1 or A = I");
  sub->add_option("--delta", o.delta, "Relative far-field noise");
  sub->add_option("--directions", o.directions, "Incidence and observation directions");
  sub->add_option("--num-z", o.num_z, "Sampling points");
  sub->add_option("--step", o.step, "k-grid step of the detection sweep");
  sub->add_option("--spike-factor", o.spike_factor, "Spike threshold over the median");
  sub->add_option("--seed", o.seed, "Noise seed (required when delta > 0)");
  sub->add_option("--output,-o", o.output, "Artifact directory");
  sub->add_option("--threads", o.threads, "Worker threads (default TEHOM_THREADS or 1)");
}

tehom::RunRequest build_request(const Overrides& o) {
  tehom::RunRequest r;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    std::stringstream text;
    text << in.rdbuf();
    r.config = tehom::parse_config(text.str());
    std::istringstream again(text.str());
    r.seed_given = tehom::parse_config_table(again)["run"].count("seed") > 0;
  }
  auto& c = r.config;
  auto& m = c.medium;
  if (o.domain) c.domain = *o.domain;
  if (o.disk) c.domain = "disk:" + tehom::format_double(*o.disk);
  if (o.tensor) m.tensor = *o.tensor;
  if (o.index) m.index = *o.index;
  if (o.a) {
    m.a = *o.a;
    if (!o.tensor) m.tensor = "constant";
  }
  if (o.n) {
    m.n = *o.n;
    if (!o.index) m.index = "constant";
  }
  if (o.a1) m.a1 = *o.a1;
  if (o.a2) m.a2 = *o.a2;
  if (o.n1) m.n1 = *o.n1;
  if (o.n2) m.n2 = *o.n2;
  if (o.a_out) m.a_out = *o.a_out;
  if (o.n_out) m.n_out = *o.n_out;
  if (o.angle) m.angle = *o.angle;
  if (!o.epsilons.empty()) c.epsilons = o.epsilons;
  if (o.k_min) c.k_min = *o.k_min;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.count) c.count = *o.count;
  if (o.h_max) c.h_max = *o.h_max;
  if (o.divisions) c.divisions = *o.divisions;
  if (o.scan_steps) c.scan_steps = *o.scan_steps;
  if (o.allow_voids) c.allow_voids = true;
  if (o.delta) c.delta = *o.delta;
  if (o.directions) c.directions = *o.directions;
  if (o.num_z) c.num_z = *o.num_z;
  if (o.step) c.step = *o.step;
  if (o.spike_factor) c.spike_factor = *o.spike_factor;
  if (o.seed) {
    c.seed = *o.seed;
    r.seed_given = true;
  }
  if (o.output) c.output = *o.output;
  r.threads = o.threads;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission eigenvalues of periodic media: homogenization, FEM, sampling and reconstruction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TEHOM_VERSION);

  Overrides o;
  std::optional<double> k, k1, k_ref;
  std::string mode = "index", branch = "below", table = "all";
  std::vector<double> k1s;

  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"homogenize", "Effective tensor, mean index and Voigt-Reuss bounds of the configured medium"},
      {"te-analytic", "Transmission eigenvalues of a constant disk (radial mode)"},
      {"te-fem", "Finite element transmission eigenvalues for each epsilon"},
      {"rate", "Convergence rate of k1(eps) (FEM, or --k1s values)"},
      {"farfield-synth", "Far-field matrix of a constant disk as CSV"},
      {"lsm-detect", "Herglotz-norm detection curve over the k-window"},
      {"reconstruct", "Effective parameter from a measured first eigenvalue"},
      {"paper-table", "Reproduce a published table (t1 .. t9, or all)"}};
  for (const auto& [name, help] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (name == "farfield-synth") sub->add_option("--k", k, "Wavenumber")->required();
    if (name == "reconstruct") {
      sub->add_option("--k1", k1, "Measured first eigenvalue")->required();
      sub->add_option("--mode", mode, "index|tensor|ratio")->check(CLI::IsMember({"index", "tensor", "ratio"}));
      sub->add_option("--branch", branch, "Tensor contrast side: below (a < 1) or above (a > 1)")
          ->check(CLI::IsMember({"below", "above"}));
    }
    if (name == "rate") {
      sub->add_option("--k1s", k1s, "First eigenvalues to fit, one per epsilon")->delimiter(',');
      sub->add_option("--k-ref", k_ref, "Fit |k1 - k_ref| instead of successive relative errors");
    }
    if (name == "paper-table") sub->add_option("--id", table, "t1 .. t9 or all");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tehom::kExitInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  tehom::RunRequest req;
  try {
    req = build_request(o);
  } catch (const tehom::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tehom::exit_code_for(e.kind());
  }
  req.k = k;
  req.k1 = k1;
  req.k1s = k1s;
  req.k_ref = k_ref;
  req.table = table;
  req.mode = mode == "tensor" ? tehom::ReconMode::TensorScalar
             : mode == "ratio" ? tehom::ReconMode::Ratio
                               : tehom::ReconMode::Index;
  req.branch = branch == "above" ? tehom::ContrastBranch::Above : tehom::ContrastBranch::Below;

  const tehom::RunOutcome out = tehom::run_subcommand(name, req, std::cerr);
  if (out.exit_code != tehom::kExitOk) {
    std::cerr << "error: " << out.message << "\n";
    return out.exit_code;
  }
  for (const auto& p : out.artifacts) std::cout << p.string() << "\n";
  return tehom::kExitOk;
}
