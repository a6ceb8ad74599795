#pragma once

#include <cstddef>
#include <vector>

namespace conecast {

struct Shape3 {
    int rows = 0;
    int cols = 0;
    int channels = 0;

    std::size_t count() const {
        return static_cast<std::size_t>(rows) * cols * channels;
    }
    bool operator==(const Shape3&) const = default;
};

// Feature map / input sample. Values are row-major over (row, col, channel).
struct Tensor3 {
    Shape3 shape;
    std::vector<double> values;

    Tensor3() = default;
    Tensor3(int rows, int cols, int channels)
        : shape{rows, cols, channels}, values(shape.count(), 0.0) {}

    double& at(int r, int c, int ch) {
        return values[(static_cast<std::size_t>(r) * shape.cols + c) * shape.channels + ch];
    }
    double at(int r, int c, int ch) const {
        return values[(static_cast<std::size_t>(r) * shape.cols + c) * shape.channels + ch];
    }
};

// Swap rows/cols: out(c, r, ch) = in(r, c, ch).
Tensor3 transpose_tensor(const Tensor3& t);

} // namespace conecast
