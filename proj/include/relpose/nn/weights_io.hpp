#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relpose/nn/tensor.hpp"

namespace relpose::nn {

// Binary weight container, little-endian. Layout:
//   magic "RPW1", u32 tensor count, then per tensor:
//   u16 name length, UTF-8 name, u8 rank, u32 extents[rank],
//   f64 data in row-major order.
// The "1" in the magic also pins the SPP level ordering the weights were
// produced with (coarse to fine, 1x1 bins first).
void save_weights(const std::string& path, std::span<const NodePtr> params);

// Throws ContainerCorrupt on bad magic, truncation, or trailing bytes.
std::vector<std::pair<std::string, Tensor>> load_weights_raw(const std::string& path);

// Matches container entries to `params` by name. Every parameter must be
// present with the exact shape (ShapeMismatchOnLoad otherwise).
void load_weights_into(const std::string& path, std::span<const NodePtr> params);

}  // namespace relpose::nn
