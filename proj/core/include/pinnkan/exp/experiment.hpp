#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pinnkan/network/network.hpp"
#include "pinnkan/problems/problems.hpp"
#include "pinnkan/train/adam.hpp"

namespace pinnkan::exp {

// One benchmark cell. Defaults reproduce the study setup: 60000 Adam
// iterations at batch 128, eta 1e-3, weight decay 1e-6, Xavier init, widths
// from the A1/A2 tables.
struct ExperimentConfig {
  prob::ProblemId problem = prob::ProblemId::Helmholtz;
  basis::Family family = basis::Family::Tanh;
  std::string arch = "A1";  // A1 | A2; ignored when widths are explicit
  std::vector<int> widths;
  std::uint64_t seed = 0;
  int iterations = 60000;
  int batch = 128;
  int log_interval = 100;
  train::AdamParams adam;
  // negative = use the problem's published weight
  double lam_phy = -1, lam_bc = -1, lam_ic = -1;
  std::vector<int> snapshots;  // empty = {0, N/2, N}
  std::string out;
  std::string cavity_reference;
  bool silu_blend = false;
  bool paper_literal_forcing = false;
  bool jacobi_standard_mode = false;  // classical recurrence coefficients
};

// Text format: one "key = value" per line, '#' comments, dotted keys for
// nested fields. Unknown keys are hard errors. parse(serialize(c)) == c.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Hash of every result-relevant field (output/reference paths excluded), as
// 16 hex digits; stamped into the metrics summary for reproducibility.
std::string config_hash(const ExperimentConfig& cfg);

// Published layer widths of an (architecture, problem, family) cell. A1 is
// shared; A2 differs between MLP and basis-expansion families.
std::vector<int> arch_widths(prob::ProblemId problem, basis::Family family,
                             const std::string& arch);

// Derived pieces.
prob::Problem problem_of(const ExperimentConfig& cfg);
net::NetworkSpec network_spec(const ExperimentConfig& cfg);

}  // namespace pinnkan::exp
