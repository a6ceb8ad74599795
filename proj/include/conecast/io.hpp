#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conecast/error.hpp"
#include "conecast/metrics.hpp"
#include "conecast/tensor.hpp"

namespace conecast {

enum class InputFormat { Idx, Csv, Raw32 };

InputFormat input_format_from_name(const std::string& name);

// Loads an input sample, checked against the model's input shape.
//   idx:   standard IDX magic 0x00000803 (ubyte, 3-dim). Image 0 is used when
//          the file holds several; values map to [0,1] by /255; channels = 1.
//   csv:   H lines of W*C '.'-decimal values, row-major over (col, channel).
//   raw32: H*W*C IEEE-754 binary32 little-endian values, row-major.
Tensor3 load_input(const std::string& path, InputFormat format, const Shape3& expected);

// IDX label file (magic 0x00000801).
std::vector<int> load_idx_labels(const std::string& path);

void write_input(const std::string& path, InputFormat format, const Tensor3& tensor);

// Trace CSV: header t,output_0..output_{k-1},events,live_scalars; one row per push.
void write_trace_csv(const std::string& path, const RunTrace& trace);

} // namespace conecast
