#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pinnkan/network/network.hpp"

namespace pinnkan::net {

// Binary checkpoint: magic "KPNN", format version, the network descriptor
// (family hyperparameters and widths), then the parameter vector as raw
// little-endian float64 in layout order. Loading whatever save wrote is
// byte-exact.
void save_checkpoint(const std::filesystem::path& path,
                     const NetworkSpec& spec, const ParamStore& params);

struct Checkpoint {
  NetworkSpec spec;
  ParamStore params;
};

// Throws ConfigError on bad magic, unsupported version or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pinnkan::net
