#include "pinnkan/exp/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pinnkan/common.hpp"

namespace pinnkan::exp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(int line_no, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

long long parse_int(const std::string& v, int line_no) {
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    bad(line_no, "expected an integer, got '" + v + "'");
  return x;
}

double parse_double(const std::string& v, int line_no) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    bad(line_no, "expected a number, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v, int line_no) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad(line_no, "expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v, int line_no) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(trim(item), line_no)));
  if (out.empty()) bad(line_no, "expected a comma-separated integer list");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void apply_key(ExperimentConfig& c, const std::string& key,
               const std::string& val, int line_no) {
  if (key == "problem") {
    c.problem = prob::problem_from_name(val);
  } else if (key == "family") {
    c.family = basis::family_from_name(val);
  } else if (key == "arch") {
    if (val != "A1" && val != "A2")
      bad(line_no, "unknown architecture '" + val + "' (valid: A1, A2)");
    c.arch = val;
  } else if (key == "widths") {
    c.widths = parse_int_list(val, line_no);
    for (int w : c.widths)
      if (w <= 0) bad(line_no, "widths must be positive");
    if (c.widths.size() < 2) bad(line_no, "widths need input and output");
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_int(val, line_no));
  } else if (key == "iterations") {
    c.iterations = static_cast<int>(parse_int(val, line_no));
    if (c.iterations < 0) bad(line_no, "iterations must be >= 0");
  } else if (key == "batch") {
    c.batch = static_cast<int>(parse_int(val, line_no));
    if (c.batch <= 0) bad(line_no, "batch must be positive");
  } else if (key == "log_interval") {
    c.log_interval = static_cast<int>(parse_int(val, line_no));
    if (c.log_interval <= 0) bad(line_no, "log_interval must be positive");
  } else if (key == "adam.eta") {
    c.adam.eta = parse_double(val, line_no);
  } else if (key == "adam.beta1") {
    c.adam.beta1 = parse_double(val, line_no);
  } else if (key == "adam.beta2") {
    c.adam.beta2 = parse_double(val, line_no);
  } else if (key == "adam.eps") {
    c.adam.eps = parse_double(val, line_no);
  } else if (key == "adam.weight_decay") {
    c.adam.weight_decay = parse_double(val, line_no);
  } else if (key == "loss.lam_phy") {
    c.lam_phy = parse_double(val, line_no);
  } else if (key == "loss.lam_bc") {
    c.lam_bc = parse_double(val, line_no);
  } else if (key == "loss.lam_ic") {
    c.lam_ic = parse_double(val, line_no);
  } else if (key == "snapshots") {
    c.snapshots = parse_int_list(val, line_no);
  } else if (key == "out") {
    c.out = val;
  } else if (key == "cavity_reference") {
    c.cavity_reference = val;
  } else if (key == "flags.silu_blend") {
    c.silu_blend = parse_bool(val, line_no);
  } else if (key == "flags.paper_literal_forcing") {
    c.paper_literal_forcing = parse_bool(val, line_no);
  } else if (key == "flags.jacobi_standard_mode") {
    c.jacobi_standard_mode = parse_bool(val, line_no);
  } else {
    bad(line_no, "unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      bad(line_no, "expected 'key = value', got '" + line + "'");
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
              line_no);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string s;
  auto put = [&](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  put("problem", prob::problem_name(c.problem));
  put("family", basis::family_name(c.family));
  put("arch", c.arch);
  if (!c.widths.empty()) put("widths", join(c.widths));
  put("seed", std::to_string(c.seed));
  put("iterations", std::to_string(c.iterations));
  put("batch", std::to_string(c.batch));
  put("log_interval", std::to_string(c.log_interval));
  put("adam.eta", fmt17(c.adam.eta));
  put("adam.beta1", fmt17(c.adam.beta1));
  put("adam.beta2", fmt17(c.adam.beta2));
  put("adam.eps", fmt17(c.adam.eps));
  put("adam.weight_decay", fmt17(c.adam.weight_decay));
  if (c.lam_phy >= 0) put("loss.lam_phy", fmt17(c.lam_phy));
  if (c.lam_bc >= 0) put("loss.lam_bc", fmt17(c.lam_bc));
  if (c.lam_ic >= 0) put("loss.lam_ic", fmt17(c.lam_ic));
  if (!c.snapshots.empty()) put("snapshots", join(c.snapshots));
  if (!c.out.empty()) put("out", c.out);
  if (!c.cavity_reference.empty()) put("cavity_reference", c.cavity_reference);
  put("flags.silu_blend", c.silu_blend ? "true" : "false");
  put("flags.paper_literal_forcing",
      c.paper_literal_forcing ? "true" : "false");
  put("flags.jacobi_standard_mode",
      c.jacobi_standard_mode ? "true" : "false");
  return s;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // paths do not change the result, only where it lands
  ExperimentConfig c = cfg;
  c.out.clear();
  c.cavity_reference.clear();
  std::string s = serialize_config(c);
  std::uint64_t h = 0x243f6a8885a308d3ull;
  for (unsigned char b : s) h = splitmix64(h ^ b);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<int> arch_widths(prob::ProblemId problem, basis::Family family,
                             const std::string& arch) {
  using prob::ProblemId;
  if (arch == "A1") {
    switch (problem) {
      case ProblemId::Helmholtz:
      case ProblemId::KleinGordon: return {2, 30, 30, 30, 1};
      case ProblemId::Wave:        return {2, 10, 30, 10, 1};
      case ProblemId::ConvDiff:    return {3, 50, 50, 50, 1};
      case ProblemId::Cavity:      return {3, 50, 50, 50, 3};
    }
  }
  if (arch == "A2") {
    if (basis::is_mlp(family)) {
      switch (problem) {
        case ProblemId::Helmholtz:   return {2, 300, 300, 300, 1};
        case ProblemId::KleinGordon: return {2, 400, 400, 400, 1};
        case ProblemId::Wave:        return {2, 300, 300, 300, 300, 1};
        case ProblemId::ConvDiff:    return {3, 300, 300, 300, 1};
        case ProblemId::Cavity:      return {3, 300, 300, 300, 3};
      }
    }
    switch (problem) {
      case ProblemId::Helmholtz:   return {2, 150, 150, 150, 1};
      case ProblemId::KleinGordon: return {2, 200, 200, 200, 1};
      case ProblemId::Wave:        return {2, 150, 150, 150, 150, 1};
      case ProblemId::ConvDiff:    return {3, 150, 150, 150, 1};
      case ProblemId::Cavity:      return {3, 100, 100, 100, 3};
    }
  }
  throw ConfigError("unknown architecture '" + arch + "' (valid: A1, A2)");
}

prob::Problem problem_of(const ExperimentConfig& cfg) {
  prob::Problem p = prob::make_problem(cfg.problem);
  if (cfg.lam_phy >= 0) p.lam_phy = cfg.lam_phy;
  if (cfg.lam_bc >= 0) p.lam_bc = cfg.lam_bc;
  if (cfg.lam_ic >= 0) p.lam_ic = cfg.lam_ic;
  p.paper_literal_forcing = cfg.paper_literal_forcing;
  return p;
}

net::NetworkSpec network_spec(const ExperimentConfig& cfg) {
  net::NetworkSpec spec;
  if (cfg.widths.empty()) {
    spec.widths = arch_widths(cfg.problem, cfg.family, cfg.arch);
    spec.arch_tag = cfg.arch;
  } else {
    spec.widths = cfg.widths;
    spec.arch_tag = "custom";
  }
  prob::Problem p = prob::make_problem(cfg.problem);
  if (spec.widths.front() != p.input_dim || spec.widths.back() != p.output_dim)
    throw ConfigError("widths " + join(spec.widths) + " do not fit problem '" +
                      prob::problem_name(cfg.problem) + "' (" +
                      std::to_string(p.input_dim) + " inputs, " +
                      std::to_string(p.output_dim) + " outputs)");
  spec.family.family = cfg.family;
  if (cfg.silu_blend) {
    if (basis::is_mlp(cfg.family))
      throw ConfigError("silu blend applies to basis families only");
    spec.family.silu_blend = true;
  }
  spec.family.jacobi_printed = !cfg.jacobi_standard_mode;
  return spec;
}

}  // namespace pinnkan::exp
