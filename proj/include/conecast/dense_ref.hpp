#pragma once

#include <vector>

#include "conecast/model.hpp"
#include "conecast/tensor.hpp"

namespace conecast {

// Conventional layer-by-layer forward pass. This is the correctness oracle
// for the streaming engine; it stays serial and simple on purpose.
//
// Accumulation is binary64 with a fixed summation order (kh, kw, in_channel
// ascending); the activation is applied to the binary64 sum.
Tensor3 layer_forward(const LayerSpec& layer, const Tensor3& input);

// Fold of layer_forward over all layers; returns the flattened final map.
std::vector<double> dense_forward(const NetworkSpec& net, const Tensor3& input);

} // namespace conecast
