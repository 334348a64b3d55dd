#pragma once

#include <filesystem>
#include <optional>

#include "nlcoh/nn/adam.hpp"
#include "nlcoh/nn/conv_net.hpp"

// Binary network checkpoint: magic "NLCNET01", the layer list and padding,
// little-endian float64 parameters, then optionally the Adam moments.
namespace nlcoh {

struct Checkpoint {
  Conv1dNet net;
  std::optional<AdamState> optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const Conv1dNet& net,
                     const AdamState* optimizer = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nlcoh
