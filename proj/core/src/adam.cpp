#include "pinnkan/train/adam.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "pinnkan/common.hpp"

namespace pinnkan::train {

Adam::Adam(std::size_t n, AdamParams params)
    : params_(params), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> theta, std::span<const double> grads) {
  if (theta.size() != m_.size() || grads.size() != m_.size())
    throw ConfigError("adam step size mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient");

  ++t_;
  const double b1 = params_.beta1, b2 = params_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double wd = params_.weight_decay;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    double g = grads[i] + wd * theta[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    double mhat = m_[i] / bc1;
    double vhat = v_[i] / bc2;
    theta[i] -= params_.eta * mhat / (std::sqrt(vhat) + params_.eps);
  }
}

namespace {
constexpr char kMagic[4] = {'K', 'P', 'A', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void Adam::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write optimizer state: " + path.string());
  out.write(kMagic, 4);
  auto w = [&out](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  w(&kVersion, 4);
  w(&params_, sizeof(params_));
  std::uint64_t n = m_.size();
  w(&n, 8);
  w(&t_, 8);
  w(m_.data(), n * 8);
  w(v_.data(), n * 8);
  if (!out) throw ConfigError("short write: " + path.string());
}

Adam Adam::load(const std::filesystem::path& path, std::size_t expect_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read optimizer state: " + path.string());
  auto r = [&in, &path](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
      throw ConfigError("truncated optimizer state: " + path.string());
  };
  char magic[4];
  r(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("not an optimizer state file: " + path.string());
  std::uint32_t version;
  r(&version, 4);
  if (version != kVersion)
    throw ConfigError("unsupported optimizer state version");
  AdamParams params;
  r(&params, sizeof(params));
  std::uint64_t n;
  r(&n, 8);
  if (n != expect_n)
    throw ConfigError("optimizer state size does not match the network");
  Adam adam(static_cast<std::size_t>(n), params);
  r(&adam.t_, 8);
  r(adam.m_.data(), n * 8);
  r(adam.v_.data(), n * 8);
  return adam;
}

}  // namespace pinnkan::train
