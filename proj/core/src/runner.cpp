#include "pinnkan/exp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pinnkan/common.hpp"
#include "pinnkan/network/checkpoint.hpp"
#include "pinnkan/network/forward.hpp"
#include "pinnkan/report/grid_eval.hpp"

namespace pinnkan::exp {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string grid_descriptor(const prob::Problem& p, const report::GridEval& ge,
                            const report::CavityReference* ref) {
  if (ref)
    return "reference:" + std::to_string(ref->nt()) + "x" +
           std::to_string(ref->nx()) + "x" + std::to_string(ref->ny());
  std::size_t pts = ge.n_points();
  if (p.input_dim == 2) return "100x100";
  (void)pts;
  return "3x100x100";
}

// Deterministic by construction: fixed key order, 17-significant-digit
// decimals, no timing fields (those live in timing.json).
std::string metrics_json(const ExperimentConfig& cfg, const prob::Problem& p,
                         const net::NetworkSpec& spec,
                         const train::TrainResult& tr,
                         const std::vector<std::pair<std::string, double>>&
                             rel_l2,
                         const std::string& grid) {
  std::string j = "{\n";
  auto str = [&](const char* k, const std::string& v, bool comma = true) {
    j += std::string("  \"") + k + "\": \"" + v + "\"";
    j += comma ? ",\n" : "\n";
  };
  auto num = [&](const char* k, const std::string& v, bool comma = true) {
    j += std::string("  \"") + k + "\": " + v;
    j += comma ? ",\n" : "\n";
  };
  str("config_hash", config_hash(cfg));
  str("problem", prob::problem_name(cfg.problem));
  str("family", basis::family_name(cfg.family));
  str("arch", spec.arch_tag);
  {
    std::string w = "[";
    for (std::size_t i = 0; i < spec.widths.size(); ++i) {
      if (i) w += ", ";
      w += std::to_string(spec.widths[i]);
    }
    w += "]";
    num("widths", w);
  }
  num("n_params", std::to_string(net::param_count(spec)));
  num("seed", std::to_string(cfg.seed));
  num("iterations", std::to_string(cfg.iterations));
  num("last_iter", std::to_string(tr.last_iter));
  str("status", tr.status);
  num("initial_total", fmt17(tr.initial_total));
  {
    const prob::LossBreakdown& f = tr.final_loss;
    j += "  \"final_loss\": {\n";
    auto part = [&](const char* k, double v, bool comma) {
      j += std::string("    \"") + k + "\": " + fmt17(v);
      j += comma ? ",\n" : "\n";
    };
    part("total", f.total, true);
    part("phy", f.phy, true);
    part("bc", f.bc, p.has_ic || f.cavity);
    if (p.has_ic) part("ic", f.ic, f.cavity);
    if (f.cavity) {
      part("ru", f.ru, true);
      part("rv", f.rv, true);
      part("rc", f.rc, true);
      part("up", f.up, true);
      part("bc1", f.bc1, true);
      part("u0", f.u0, false);
    }
    j += rel_l2.empty() ? "  }\n" : "  },\n";
  }
  if (!rel_l2.empty()) {
    str("grid", grid);
    j += "  \"relative_l2\": {\n";
    for (std::size_t i = 0; i < rel_l2.size(); ++i) {
      j += "    \"" + rel_l2[i].first + "\": " + fmt17(rel_l2[i].second);
      j += i + 1 < rel_l2.size() ? ",\n" : "\n";
    }
    j += "  }\n";
  }
  j += "}\n";
  return j;
}

// Evaluation + export tail shared by fresh runs and re-evaluations.
RunResult export_run(const ExperimentConfig& cfg, const prob::Problem& p,
                     const net::NetworkSpec& spec,
                     const train::TrainResult& tr, const fs::path& run_dir) {
  RunResult out;
  out.train = tr;
  out.run_dir = run_dir;
  std::string grid;
  if (tr.status == "completed") {
    net::Forward fwd(spec);
    report::GridEval ge;
    bool have = false;
    if (p.id == prob::ProblemId::Cavity) {
      if (!cfg.cavity_reference.empty()) {
        auto ref = report::load_cavity_reference(cfg.cavity_reference);
        ge = report::eval_on_reference(p, fwd, tr.params, ref);
        grid = grid_descriptor(p, ge, &ref);
        have = true;
      }
    } else {
      ge = report::eval_on_grid(p, fwd, tr.params);
      grid = grid_descriptor(p, ge, nullptr);
      have = true;
    }
    if (have) {
      out.rel_l2 = report::grid_errors(ge);
      report::write_field_csv(run_dir / kFieldsFile, p, ge);
    }
  }
  write_text(run_dir / kMetricsFile,
             metrics_json(cfg, p, spec, tr, out.rel_l2, grid));
  return out;
}

}  // namespace

std::string run_dir_name(const ExperimentConfig& cfg) {
  std::string arch = cfg.widths.empty() ? cfg.arch : std::string("custom");
  return std::string(prob::problem_name(cfg.problem)) + "_" +
         basis::family_name(cfg.family) + "_" + arch + "_" +
         config_hash(cfg).substr(0, 8);
}

RunResult run_experiment(const ExperimentConfig& cfg, bool resume) {
  if (cfg.out.empty())
    throw ConfigError("no output directory set (config key 'out')");
  fs::path run_dir = cfg.out;
  fs::create_directories(run_dir);
  {
    ExperimentConfig copy = cfg;
    copy.out.clear();  // implicit: it is the directory the copy sits in
    write_text(run_dir / kConfigFile, serialize_config(copy));
  }

  prob::Problem p = problem_of(cfg);
  train::TrainConfig tc;
  tc.problem = p;
  tc.net_spec = network_spec(cfg);
  tc.seed = cfg.seed;
  tc.iterations = cfg.iterations;
  tc.batch_size = cfg.batch;
  tc.log_interval = cfg.log_interval;
  tc.adam = cfg.adam;
  tc.snapshots = cfg.snapshots;
  tc.out_dir = run_dir;
  tc.resume = resume;

  auto wall_start = std::chrono::steady_clock::now();
  train::TrainResult tr = train::train(tc);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - wall_start)
                    .count();

  RunResult out = export_run(cfg, p, tc.net_spec, tr, run_dir);
  write_text(run_dir / kTimingFile,
             std::string("{\n  \"mean_time_per_iter\": ") +
                 fmt17(tr.mean_time_per_iter) + ",\n  \"wall_seconds\": " +
                 fmt17(wall) + "\n}\n");
  return out;
}

RunResult eval_experiment(const fs::path& run_dir,
                          const std::optional<ExperimentConfig>& override_cfg) {
  ExperimentConfig cfg = load_config(run_dir / kConfigFile);
  if (override_cfg) {
    if (config_hash(*override_cfg) != config_hash(cfg))
      throw ConfigError(
          "override config does not match the stored run (hash " +
          config_hash(*override_cfg) + " vs " + config_hash(cfg) + ")");
    cfg = *override_cfg;
  }
  cfg.out = run_dir.string();

  net::Checkpoint ckpt = net::load_checkpoint(run_dir / train::kModelFile);
  prob::Problem p = problem_of(cfg);

  // training-side summary comes from the stored metrics
  fs::path mpath = run_dir / kMetricsFile;
  std::ifstream min(mpath);
  if (!min)
    throw ConfigError("no " + std::string(kMetricsFile) + " in " +
                      run_dir.string() + "; train first");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(min);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unreadable " + mpath.string() + ": " + e.what());
  }

  train::TrainResult tr;
  tr.status = m.at("status").get<std::string>();
  tr.params = ckpt.params;
  tr.initial_total = m.at("initial_total").get<double>();
  tr.last_iter = m.at("last_iter").get<int>();
  const auto& fl = m.at("final_loss");
  tr.final_loss.total = fl.at("total").get<double>();
  tr.final_loss.phy = fl.at("phy").get<double>();
  tr.final_loss.bc = fl.at("bc").get<double>();
  tr.final_loss.ic = fl.value("ic", 0.0);
  tr.final_loss.cavity = fl.contains("ru");
  if (tr.final_loss.cavity) {
    tr.final_loss.ru = fl.at("ru").get<double>();
    tr.final_loss.rv = fl.at("rv").get<double>();
    tr.final_loss.rc = fl.at("rc").get<double>();
    tr.final_loss.up = fl.at("up").get<double>();
    tr.final_loss.bc1 = fl.at("bc1").get<double>();
    tr.final_loss.u0 = fl.at("u0").get<double>();
  }

  return export_run(cfg, p, ckpt.spec, tr, run_dir);
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec sw;
  std::string base_text;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("sweep line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key == "sweep.problems") {
      sw.problems = split_list(val);
    } else if (key == "sweep.families") {
      sw.families = split_list(val);
    } else if (key == "sweep.archs") {
      sw.archs = split_list(val);
    } else {
      base_text += t + "\n";
    }
  }
  sw.base = parse_config(base_text);
  for (const auto& s : sw.problems) prob::problem_from_name(s);
  for (const auto& s : sw.families) basis::family_from_name(s);
  for (const auto& s : sw.archs)
    if (s != "A1" && s != "A2")
      throw ConfigError("unknown architecture '" + s + "' (valid: A1, A2)");
  return sw;
}

SweepSpec load_sweep(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sweep config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep(ss.str());
}

std::vector<SweepCell> run_sweep(const SweepSpec& sweep, const fs::path& root) {
  if (sweep.problems.empty() || sweep.families.empty() || sweep.archs.empty())
    throw ConfigError(
        "empty sweep matrix: sweep.problems, sweep.families and sweep.archs "
        "must all be non-empty");
  fs::create_directories(root);
  std::vector<SweepCell> cells;
  std::uint64_t idx = 0;
  for (const auto& pn : sweep.problems)
    for (const auto& fn : sweep.families)
      for (const auto& an : sweep.archs) {
        SweepCell cell;
        cell.cfg = sweep.base;
        cell.cfg.problem = prob::problem_from_name(pn);
        cell.cfg.family = basis::family_from_name(fn);
        cell.cfg.arch = an;
        cell.cfg.widths.clear();  // cells take the architecture tables
        cell.cfg.seed = mix_seed(sweep.base.seed, idx);
        ++idx;
        cell.cfg.out = (root / run_dir_name(cell.cfg)).string();
        try {
          RunResult r = run_experiment(cell.cfg);
          cell.status = r.train.status;
          cell.rel_l2 = r.rel_l2;
          cell.t_it = r.train.mean_time_per_iter;
        } catch (const std::exception& e) {
          cell.status = "error";
          cell.note = e.what();
        }
        cells.push_back(std::move(cell));
      }
  write_sweep_csv(root / "sweep.csv", sweep, cells);
  return cells;
}

void write_sweep_csv(const fs::path& path, const SweepSpec& sweep,
                     const std::vector<SweepCell>& cells) {
  auto cell_at = [&](const std::string& pn, const std::string& fn,
                     const std::string& an) -> const SweepCell& {
    std::size_t pi = 0, fi = 0, ai = 0;
    while (sweep.problems[pi] != pn) ++pi;
    while (sweep.families[fi] != fn) ++fi;
    while (sweep.archs[ai] != an) ++ai;
    return cells[(pi * sweep.families.size() + fi) * sweep.archs.size() + ai];
  };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "problem,metric";
  for (const auto& fn : sweep.families)
    for (const auto& an : sweep.archs) out << "," << fn << "_" << an;
  out << "\n";

  for (const auto& pn : sweep.problems) {
    prob::Problem p = prob::make_problem(prob::problem_from_name(pn));
    std::vector<std::string> metrics;
    if (p.id == prob::ProblemId::Cavity)
      metrics = {"u", "v", "p"};
    else if (prob::has_forcing_row(p.id))
      metrics = {"u", "f"};
    else
      metrics = {"u"};
    metrics.push_back("t_it");

    for (const auto& metric : metrics) {
      out << pn << "," << metric;
      for (const auto& fn : sweep.families)
        for (const auto& an : sweep.archs) {
          const SweepCell& c = cell_at(pn, fn, an);
          out << ",";
          if (c.status != "completed") {
            out << c.status;
          } else if (metric == "t_it") {
            out << fmt17(c.t_it);
          } else {
            auto it = std::find_if(c.rel_l2.begin(), c.rel_l2.end(),
                                   [&](const auto& kv) {
                                     return kv.first == metric;
                                   });
            if (it == c.rel_l2.end())
              out << "-";
            else
              out << fmt17(it->second);
          }
        }
      out << "\n";
    }
  }
}

}  // namespace pinnkan::exp
