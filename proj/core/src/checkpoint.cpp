#include "pinnkan/network/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "pinnkan/common.hpp"

// The on-disk format is little-endian; this code writes native byte order.
static_assert(std::endian::native == std::endian::little,
              "checkpoint format requires a little-endian host");

namespace pinnkan::net {

namespace {

constexpr char kMagic[4] = {'K', 'P', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("truncated checkpoint file");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const NetworkSpec& spec, const ParamStore& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, 4);
  put(os, kVersion);
  const auto& fs = spec.family;
  put(os, static_cast<std::uint8_t>(fs.family));
  std::uint8_t flags = 0;
  if (fs.silu_blend) flags |= 1;
  if (fs.jacobi_printed) flags |= 2;
  put(os, flags);
  put(os, static_cast<std::int32_t>(fs.spline_grid));
  put(os, static_cast<std::int32_t>(fs.spline_degree));
  put(os, static_cast<std::int32_t>(fs.n_centers));
  put(os, static_cast<std::int32_t>(fs.fourier_k));
  put(os, static_cast<std::int32_t>(fs.poly_degree));
  put(os, fs.sigma);
  put(os, fs.jacobi_alpha);
  put(os, fs.jacobi_beta);
  put(os, static_cast<std::uint32_t>(spec.arch_tag.size()));
  os.write(spec.arch_tag.data(),
           static_cast<std::streamsize>(spec.arch_tag.size()));
  put(os, static_cast<std::uint32_t>(spec.widths.size()));
  for (int w : spec.widths) put(os, static_cast<std::int32_t>(w));
  put(os, static_cast<std::uint64_t>(params.theta.size()));
  os.write(reinterpret_cast<const char*>(params.theta.data()),
           static_cast<std::streamsize>(params.theta.size() * sizeof(double)));
  if (!os) throw ConfigError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("not a checkpoint (bad magic): " + path.string());
  auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw ConfigError("unsupported checkpoint version " +
                      std::to_string(version));

  Checkpoint cp;
  auto& fs = cp.spec.family;
  fs.family = static_cast<basis::Family>(get<std::uint8_t>(is));
  auto flags = get<std::uint8_t>(is);
  fs.silu_blend = flags & 1;
  fs.jacobi_printed = flags & 2;
  fs.spline_grid = get<std::int32_t>(is);
  fs.spline_degree = get<std::int32_t>(is);
  fs.n_centers = get<std::int32_t>(is);
  fs.fourier_k = get<std::int32_t>(is);
  fs.poly_degree = get<std::int32_t>(is);
  fs.sigma = get<double>(is);
  fs.jacobi_alpha = get<double>(is);
  fs.jacobi_beta = get<double>(is);
  auto tag_len = get<std::uint32_t>(is);
  if (tag_len > 4096) throw ConfigError("corrupt checkpoint descriptor");
  cp.spec.arch_tag.resize(tag_len);
  is.read(cp.spec.arch_tag.data(), tag_len);
  auto n_widths = get<std::uint32_t>(is);
  if (n_widths < 2 || n_widths > 64)
    throw ConfigError("corrupt checkpoint width list");
  cp.spec.widths.resize(n_widths);
  for (auto& w : cp.spec.widths) w = get<std::int32_t>(is);
  auto n_params = get<std::uint64_t>(is);
  if (n_params != param_count(cp.spec))
    throw ConfigError("checkpoint parameter count disagrees with descriptor");
  cp.params.theta.resize(n_params);
  is.read(reinterpret_cast<char*>(cp.params.theta.data()),
          static_cast<std::streamsize>(n_params * sizeof(double)));
  if (!is) throw ConfigError("truncated checkpoint file");
  return cp;
}

}  // namespace pinnkan::net
