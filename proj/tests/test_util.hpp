#pragma once

#include <cmath>
#include <vector>

#include "conecast/model.hpp"
#include "conecast/rng.hpp"
#include "conecast/tensor.hpp"

namespace testutil {

inline bool close(double a, double ref, double rel = 1e-6, double abs_floor = 1e-9) {
    return std::abs(a - ref) <= std::max(abs_floor, rel * std::abs(ref));
}

inline bool all_close(const std::vector<double>& a, const std::vector<double>& ref,
                      double rel = 1e-6, double abs_floor = 1e-9) {
    if (a.size() != ref.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!close(a[i], ref[i], rel, abs_floor)) return false;
    return true;
}

// random input; zero_fraction of the pixels forced to exactly 0
inline conecast::Tensor3 random_input(uint64_t seed, const conecast::Shape3& shape,
                                      double zero_fraction = 0.3) {
    conecast::SplitMix64 rng(seed);
    conecast::Tensor3 t(shape.rows, shape.cols, shape.channels);
    for (double& v : t.values)
        v = rng.next_unit() < zero_fraction ? 0.0 : rng.next_symmetric();
    return t;
}

inline conecast::Tensor3 zero_suffix(const conecast::Tensor3& in, int rows_kept) {
    conecast::Tensor3 out = in;
    std::size_t per_row = static_cast<std::size_t>(in.shape.cols) * in.shape.channels;
    for (std::size_t i = static_cast<std::size_t>(rows_kept) * per_row; i < out.values.size();
         ++i)
        out.values[i] = 0.0;
    return out;
}

inline std::vector<double> row_of(const conecast::Tensor3& in, int r) {
    std::size_t per_row = static_cast<std::size_t>(in.shape.cols) * in.shape.channels;
    auto first = in.values.begin() + static_cast<std::ptrdiff_t>(r * per_row);
    return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(per_row));
}

inline conecast::LayerSpec conv_layer(int kh, int kw, int in_c, int out_c,
                                      conecast::Activation act,
                                      const std::vector<float>& weights,
                                      conecast::Padding pad = conecast::Padding::Valid,
                                      int sh = 1, int sw = 1) {
    conecast::LayerSpec l;
    l.kind = conecast::LayerKind::Conv;
    l.kernel_h = kh;
    l.kernel_w = kw;
    l.stride_h = sh;
    l.stride_w = sw;
    l.padding = pad;
    l.in_channels = in_c;
    l.out_channels = out_c;
    l.activation = act;
    l.weights = weights;
    l.bias.assign(out_c, 0.0f);
    return l;
}

inline conecast::LayerSpec ga_layer() {
    conecast::LayerSpec l;
    l.kind = conecast::LayerKind::GlobalAverage;
    l.activation = conecast::Activation::Identity;
    return l;
}

inline conecast::LayerSpec dense_layer(int in, int out, conecast::Activation act,
                                       const std::vector<float>& weights) {
    conecast::LayerSpec l;
    l.kind = conecast::LayerKind::Dense;
    l.in_channels = in;
    l.out_channels = out;
    l.activation = act;
    l.weights = weights;
    l.bias.assign(out, 0.0f);
    return l;
}

// The two-hidden-layer 1D model used throughout: two 1x3 valid convs plus an
// averaging head, one channel everywhere.
inline conecast::NetworkSpec tiny_1d_net(int length) {
    conecast::NetworkSpec net;
    net.input_shape = {1, length, 1};
    net.layers.push_back(conv_layer(1, 3, 1, 1, conecast::Activation::Identity,
                                    {0.25f, 0.5f, 0.25f}));
    net.layers.push_back(conv_layer(1, 3, 1, 1, conecast::Activation::Identity,
                                    {0.5f, 0.25f, 0.125f}));
    net.layers.push_back(ga_layer());
    return conecast::validate(std::move(net));
}

} // namespace testutil
