#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pinnkan::train {

struct AdamParams {
  double eta = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-6;  // coupled L2: added to the gradient
};

class Adam {
 public:
  Adam(std::size_t n, AdamParams params = {});

  // theta <- theta - eta * m_hat / (sqrt(v_hat) + eps), with g augmented by
  // the coupled decay wd * theta. Throws NumericError on non-finite grads.
  void step(std::span<double> theta, std::span<const double> grads);

  std::int64_t steps() const { return t_; }
  const AdamParams& params() const { return params_; }
  std::span<const double> m() const { return m_; }
  std::span<const double> v() const { return v_; }

  // binary sidecar so a run can resume mid-trajectory bit-exactly
  void save(const std::filesystem::path& path) const;
  static Adam load(const std::filesystem::path& path, std::size_t expect_n);

 private:
  AdamParams params_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace pinnkan::train
