#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("pinnkan_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// exit code of the CLI plus its combined output
struct CliRun {
  int code = -1;
  std::string output;
};

CliRun run_cli(const fs::path& workdir, const std::string& args,
               const std::string& env = "") {
  fs::path log = workdir / "cli_output.log";
  std::string cmd = "cd " + workdir.string() + " && " + env + " " +
                    PINNKAN_CLI_PATH + " " + args + " > " + log.string() +
                    " 2>&1";
  int raw = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyWave =
    "problem = wave\n"
    "family = tanh\n"
    "widths = 2, 6, 6, 1\n"
    "seed = 4\n"
    "iterations = 20\n"
    "batch = 10\n"
    "log_interval = 5\n";

}  // namespace

TEST_CASE("train command populates a run directory and exits zero") {
  auto dir = temp_dir("cli_train");
  write_file(dir / "exp.cfg", kTinyWave);
  auto r = run_cli(dir, "train --config exp.cfg --out run");
  CHECK(r.code == 0);
  CHECK(r.output.find("status: completed") != std::string::npos);
  CHECK(r.output.find("rel_l2_u:") != std::string::npos);
  for (const char* f : {"config.cfg", "metrics.json", "timing.json",
                        "fields.csv", "model.ckpt", "loss_history.csv"})
    CHECK_MESSAGE(fs::exists(dir / "run" / f), f);
}

TEST_CASE("unknown names exit with code 1 and list the options") {
  auto dir = temp_dir("cli_badfam");
  write_file(dir / "exp.cfg", "family = wavelet\n");
  auto r = run_cli(dir, "train --config exp.cfg --out run");
  CHECK(r.code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("tanh") != std::string::npos);
  CHECK(r.output.find("bspline") != std::string::npos);

  write_file(dir / "exp2.cfg", "problem = burgers\n");
  r = run_cli(dir, "train --config exp2.cfg --out run");
  CHECK(r.code == 1);
  CHECK(r.output.find("helmholtz") != std::string::npos);

  r = run_cli(dir, "train --config no_such_file.cfg");
  CHECK(r.code == 1);

  r = run_cli(dir, "diagnose fft --out run");
  CHECK(r.code == 1);

  r = run_cli(dir, "bogus_command");
  CHECK(r.code == 1);
}

TEST_CASE("a repeated run with the same seed exports identical metrics") {
  auto dir = temp_dir("cli_repeat");
  write_file(dir / "exp.cfg", kTinyWave);
  CHECK(run_cli(dir, "train --config exp.cfg --out a").code == 0);
  CHECK(run_cli(dir, "train --config exp.cfg --out b").code == 0);
  CHECK(read_text(dir / "a" / "metrics.json") ==
        read_text(dir / "b" / "metrics.json"));
}

TEST_CASE("divergence exits with code 2") {
  auto dir = temp_dir("cli_div");
  write_file(dir / "exp.cfg", std::string(kTinyWave) + "adam.eta = 1e14\n");
  auto r = run_cli(dir, "train --config exp.cfg --out run");
  CHECK(r.code == 2);
  CHECK(r.output.find("status: diverged") != std::string::npos);
}

TEST_CASE("seed and iteration overrides reach the run") {
  auto dir = temp_dir("cli_override");
  write_file(dir / "exp.cfg", kTinyWave);
  auto r = run_cli(dir, "train --config exp.cfg --out run --seed 9 --iters 8");
  CHECK(r.code == 0);
  std::string m = read_text(dir / "run" / "metrics.json");
  CHECK(m.find("\"seed\": 9") != std::string::npos);
  CHECK(m.find("\"iterations\": 8") != std::string::npos);
  CHECK(m.find("\"last_iter\": 8") != std::string::npos);
}

TEST_CASE("the output root environment variable names the default run dir") {
  auto dir = temp_dir("cli_envroot");
  write_file(dir / "exp.cfg", kTinyWave);
  auto r = run_cli(dir, "train --config exp.cfg",
                   "PINNKAN_OUT=" + (dir / "root").string());
  CHECK(r.code == 0);
  REQUIRE(fs::exists(dir / "root"));
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir / "root"))
    found |= fs::exists(e.path() / "metrics.json");
  CHECK(found);
  CHECK(r.output.find("wave_tanh_custom_") != std::string::npos);
}

TEST_CASE("diagnose writes spectra and traces next to the snapshots") {
  auto dir = temp_dir("cli_diag");
  write_file(dir / "exp.cfg", kTinyWave);
  REQUIRE(run_cli(dir, "train --config exp.cfg --out run").code == 0);

  auto r = run_cli(dir, "diagnose ntk --out run");
  CHECK(r.code == 0);
  auto spectra = read_text(dir / "run" / "ntk_spectrum.csv");
  CHECK(spectra.rfind("stage_iter,component,index,eigenvalue", 0) == 0);
  // snapshots 0, 10, 20 each contribute phy, bc and ic stages
  for (const char* stage : {"\n0,phy,", "\n10,bc,", "\n20,ic,"})
    CHECK(spectra.find(stage) != std::string::npos);

  r = run_cli(dir, "diagnose hessian --out run");
  CHECK(r.code == 0);
  auto trace = read_text(dir / "run" / "hessian_trace.csv");
  CHECK(trace.rfind("iter,component,lambda_max,power_steps", 0) == 0);
  CHECK(trace.find("\n20,ic,") != std::string::npos);

  // a directory without snapshots cannot be diagnosed
  fs::create_directories(dir / "empty");
  fs::copy_file(dir / "run" / "config.cfg", dir / "empty" / "config.cfg");
  r = run_cli(dir, "diagnose ntk --out empty");
  CHECK(r.code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("eval re-exports an existing run") {
  auto dir = temp_dir("cli_eval");
  write_file(dir / "exp.cfg", kTinyWave);
  REQUIRE(run_cli(dir, "train --config exp.cfg --out run").code == 0);
  std::string before = read_text(dir / "run" / "metrics.json");
  fs::remove(dir / "run" / "fields.csv");

  auto r = run_cli(dir, "eval --out run");
  CHECK(r.code == 0);
  CHECK(read_text(dir / "run" / "metrics.json") == before);
  CHECK(fs::exists(dir / "run" / "fields.csv"));
}

TEST_CASE("sweep tabulates cells and rejects an empty matrix") {
  auto dir = temp_dir("cli_sweep");
  write_file(dir / "sw.cfg",
             "sweep.problems = wave\n"
             "sweep.families = tanh, bspline\n"
             "sweep.archs = A1\n"
             "iterations = 4\n"
             "batch = 8\n"
             "log_interval = 2\n");
  auto r = run_cli(dir, "sweep --config sw.cfg --out root");
  CHECK(r.code == 0);
  auto table = read_text(dir / "root" / "sweep.csv");
  CHECK(table.rfind("problem,metric,tanh_A1,bspline_A1", 0) == 0);
  CHECK(table.find("\nwave,u,") != std::string::npos);
  CHECK(table.find("\nwave,t_it,") != std::string::npos);

  write_file(dir / "empty.cfg", "iterations = 4\n");
  r = run_cli(dir, "sweep --config empty.cfg --out root2");
  CHECK(r.code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("resume continues a run through the same artifacts") {
  auto dir = temp_dir("cli_resume");
  write_file(dir / "exp.cfg", kTinyWave);
  REQUIRE(run_cli(dir, "train --config exp.cfg --out full").code == 0);

  REQUIRE(run_cli(dir, "train --config exp.cfg --out half --iters 10").code ==
          0);
  auto r = run_cli(dir, "train --config exp.cfg --out half --resume");
  CHECK(r.code == 0);
  CHECK(read_text(dir / "half" / "model.ckpt") ==
        read_text(dir / "full" / "model.ckpt"));
}
