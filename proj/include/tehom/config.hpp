#pragma once

// Experiment configuration: flat "key = value" lines grouped under
// [section] headers; '#' starts a comment. Lists are comma separated.
//
//   [domain]    shape = disk:2 | square:-3,3
//   [medium]    tensor = identity|constant|sincos|rotated|checkerboard|voids
//               index = constant|sincos|layered|checkerboard|voids
//               a, n, a1, a2, n1, n2, a_out, n_out, angle
//   [run]       epsilons, k_min, k_max, count, h_max, divisions, scan_steps,
//               allow_voids, delta, directions, num_z, step, spike_factor,
//               seed, output

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tehom/coeffs.hpp"
#include "tehom/error.hpp"
#include "tehom/te/types.hpp"

namespace tehom {

struct MediumSpec {
  std::string tensor = "identity";
  std::string index = "constant";
  double a = 1.0, n = 2.0;
  double a1 = 1.0, a2 = 0.2, n1 = 2.0, n2 = 5.0;  // checkerboard phases
  double a_out = 0.5, n_out = 5.0;  // voids: values outside the inclusion
  double angle = 1.0;  // rotated tensor
  bool operator==(const MediumSpec&) const = default;
};

struct ExperimentConfig {
  std::string domain = "disk:1";
  MediumSpec medium;
  std::vector<double> epsilons;
  double k_min = 0.5, k_max = 5.0;
  int count = 1;
  double h_max = 0.0;  // 0 = automatic
  int divisions = 0;  // square meshes, 0 = automatic
  int scan_steps = 200;
  bool allow_voids = false;  // accept phases with n = 1 or A = I
  double delta = 0.01;
  int directions = 64;
  int num_z = 25;
  double step = 0.005;
  double spike_factor = 5.0;
  std::uint64_t seed = 1;
  std::string output = "out";
  bool operator==(const ExperimentConfig&) const = default;

  void validate() const;
  Domain make_domain() const;
  CoefficientField make_field(double epsilon = 1.0) const;
  TEOptions te_options() const;
};

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double parse_double(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used > 0 && s.find_first_not_of(" \t", used) == std::string::npos, ErrorKind::Parse,
          "'" + key + "' expects a number, got '" + s + "'");
  return v;
}

inline long long parse_integer(const std::string& s, const std::string& key) {
  const double v = parse_double(s, key);
  require(v == std::floor(v) && std::abs(v) < 9e15, ErrorKind::Parse, "'" + key + "' expects an integer");
  return static_cast<long long>(v);
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorKind::Parse, "'" + key + "' expects true or false, got '" + s + "'");
}

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_double(item.substr(b), key));
  }
  return out;
}

/// "disk:R" or "square:lo,hi".
inline Domain parse_domain(const std::string& s) {
  const auto colon = s.find(':');
  require(colon != std::string::npos, ErrorKind::Parse, "domain must be disk:R or square:lo,hi, got '" + s + "'");
  const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
  if (kind == "disk") {
    const double r = parse_double(rest, "domain");
    require(r > 0.0, ErrorKind::InvalidParameter, "disk radius must be positive");
    return Domain::disk(r);
  }
  if (kind == "square") {
    const auto v = parse_list(rest, "domain");
    require(v.size() == 2, ErrorKind::Parse, "square needs lo,hi");
    require(v[1] > v[0], ErrorKind::InvalidParameter, "square needs hi > lo");
    return Domain::square(v[0], v[1]);
  }
  throw Error(ErrorKind::Parse, "unknown domain kind '" + kind + "'");
}

inline TensorField make_tensor(const MediumSpec& m) {
  if (m.tensor == "identity") return presets::identity_tensor();
  if (m.tensor == "constant") return presets::tensor_constant(m.a);
  if (m.tensor == "sincos") return presets::tensor_sincos();
  if (m.tensor == "rotated") return presets::tensor_rotated(m.angle);
  if (m.tensor == "checkerboard") return presets::tensor_checkerboard(m.a1, m.a2);
  if (m.tensor == "voids") return presets::tensor_voids(m.a_out);
  throw Error(ErrorKind::InvalidParameter, "unknown tensor preset '" + m.tensor + "'");
}

inline ScalarField make_index(const MediumSpec& m) {
  if (m.index == "constant") return presets::scalar_constant(m.n);
  if (m.index == "sincos") return presets::scalar_sincos();
  if (m.index == "layered") return presets::scalar_layered();
  if (m.index == "checkerboard") return presets::scalar_checkerboard(m.n1, m.n2);
  if (m.index == "voids") return presets::scalar_voids(m.n_out);
  throw Error(ErrorKind::InvalidParameter, "unknown index preset '" + m.index + "'");
}

inline void ExperimentConfig::validate() const {
  make_domain();
  for (double v : {medium.a, medium.n, medium.a1, medium.a2, medium.n1, medium.n2, medium.a_out, medium.n_out})
    require(v > 0.0 && std::isfinite(v), ErrorKind::InvalidParameter, "material values must be positive");
  make_tensor(medium);
  make_index(medium);
  for (double e : epsilons)
    require(e > 0.0 && std::isfinite(e), ErrorKind::InvalidParameter, "epsilons must be positive");
  require(k_min > 0.0 && k_max > k_min, ErrorKind::InvalidParameter, "k-window must satisfy 0 < k_min < k_max");
  require(count >= 1, ErrorKind::InvalidParameter, "count must be positive");
  require(h_max >= 0.0 && divisions >= 0, ErrorKind::InvalidParameter, "mesh sizes must be nonnegative");
  require(scan_steps >= 1, ErrorKind::InvalidParameter, "scan_steps must be positive");
  require(delta >= 0.0, ErrorKind::InvalidParameter, "noise level must be nonnegative");
  require(directions >= 16 && directions <= 256 && (directions & (directions - 1)) == 0,
          ErrorKind::InvalidParameter, "directions must be a power of two in [16, 256]");
  require(num_z >= 1 && step > 0.0 && spike_factor > 0.0, ErrorKind::InvalidParameter,
          "detection needs num_z >= 1, step > 0 and spike_factor > 0");
  require(!output.empty(), ErrorKind::InvalidParameter, "output directory must be named");
}

inline Domain ExperimentConfig::make_domain() const { return parse_domain(domain); }

inline CoefficientField ExperimentConfig::make_field(double epsilon) const {
  return combine(make_tensor(medium), make_index(medium), epsilon);
}

inline TEOptions ExperimentConfig::te_options() const {
  TEOptions o;
  o.h_max = h_max;
  o.divisions = divisions;
  o.scan_steps = scan_steps;
  o.allow_voids = allow_voids;
  return o;
}

/// Section -> key -> raw value.
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

inline ConfigTable parse_config_table(std::istream& in) {
  ConfigTable t;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      require(line.back() == ']', ErrorKind::Parse, "line " + std::to_string(lineno) + ": unterminated section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    const auto vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);
    require(!section.empty(), ErrorKind::Parse, "line " + std::to_string(lineno) + ": key outside a section");
    t[section][key] = value;
  }
  return t;
}

inline ExperimentConfig parse_config(std::istream& in) {
  const ConfigTable t = parse_config_table(in);
  ExperimentConfig c;
  for (const auto& [section, keys] : t) {
    for (const auto& [key, v] : keys) {
      const std::string where = section + "." + key;
      if (section == "domain" && key == "shape") c.domain = v;
      else if (section == "medium" && key == "tensor") c.medium.tensor = v;
      else if (section == "medium" && key == "index") c.medium.index = v;
      else if (section == "medium" && key == "a") c.medium.a = parse_double(v, where);
      else if (section == "medium" && key == "n") c.medium.n = parse_double(v, where);
      else if (section == "medium" && key == "a1") c.medium.a1 = parse_double(v, where);
      else if (section == "medium" && key == "a2") c.medium.a2 = parse_double(v, where);
      else if (section == "medium" && key == "n1") c.medium.n1 = parse_double(v, where);
      else if (section == "medium" && key == "n2") c.medium.n2 = parse_double(v, where);
      else if (section == "medium" && key == "a_out") c.medium.a_out = parse_double(v, where);
      else if (section == "medium" && key == "n_out") c.medium.n_out = parse_double(v, where);
      else if (section == "medium" && key == "angle") c.medium.angle = parse_double(v, where);
      else if (section == "run" && key == "epsilons") c.epsilons = parse_list(v, where);
      else if (section == "run" && key == "k_min") c.k_min = parse_double(v, where);
      else if (section == "run" && key == "k_max") c.k_max = parse_double(v, where);
      else if (section == "run" && key == "count") c.count = static_cast<int>(parse_integer(v, where));
      else if (section == "run" && key == "h_max") c.h_max = parse_double(v, where);
      else if (section == "run" && key == "divisions") c.divisions = static_cast<int>(parse_integer(v, where));
      else if (section == "run" && key == "scan_steps") c.scan_steps = static_cast<int>(parse_integer(v, where));
      else if (section == "run" && key == "allow_voids") c.allow_voids = parse_bool(v, where);
      else if (section == "run" && key == "delta") c.delta = parse_double(v, where);
      else if (section == "run" && key == "directions") c.directions = static_cast<int>(parse_integer(v, where));
      else if (section == "run" && key == "num_z") c.num_z = static_cast<int>(parse_integer(v, where));
      else if (section == "run" && key == "step") c.step = parse_double(v, where);
      else if (section == "run" && key == "spike_factor") c.spike_factor = parse_double(v, where);
      else if (section == "run" && key == "seed") c.seed = static_cast<std::uint64_t>(parse_integer(v, where));
      else if (section == "run" && key == "output") c.output = v;
      else throw Error(ErrorKind::Parse, "unknown key '" + where + "'");
    }
  }
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Parse, "cannot read config '" + path + "'");
  return parse_config(in);
}

inline std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[domain]\nshape = " << c.domain << "\n\n[medium]\n";
  os << "tensor = " << c.medium.tensor << "\nindex = " << c.medium.index << "\n";
  const std::pair<const char*, double> vals[] = {{"a", c.medium.a},   {"n", c.medium.n},     {"a1", c.medium.a1},
                                                 {"a2", c.medium.a2}, {"n1", c.medium.n1},   {"n2", c.medium.n2},
                                                 {"a_out", c.medium.a_out}, {"n_out", c.medium.n_out},
                                                 {"angle", c.medium.angle}};
  for (const auto& [k, v] : vals) os << k << " = " << format_double(v) << "\n";
  os << "\n[run]\nepsilons = ";
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) os << (i ? ", " : "") << format_double(c.epsilons[i]);
  os << "\nk_min = " << format_double(c.k_min) << "\nk_max = " << format_double(c.k_max) << "\ncount = " << c.count
     << "\nh_max = " << format_double(c.h_max) << "\ndivisions = " << c.divisions << "\nscan_steps = " << c.scan_steps
     << "\nallow_voids = " << (c.allow_voids ? "true" : "false")
     << "\ndelta = " << format_double(c.delta) << "\ndirections = " << c.directions << "\nnum_z = " << c.num_z
     << "\nstep = " << format_double(c.step) << "\nspike_factor = " << format_double(c.spike_factor)
     << "\nseed = " << c.seed << "\noutput = " << c.output << "\n";
  return os.str();
}

}  // namespace tehom
