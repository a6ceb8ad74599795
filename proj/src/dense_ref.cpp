#include "conecast/dense_ref.hpp"

namespace conecast {

static Tensor3 conv_forward(const LayerSpec& l, const Tensor3& in) {
    int oh = conv_out_extent(in.shape.rows, l.kernel_h, l.stride_h, l.padding);
    int ow = conv_out_extent(in.shape.cols, l.kernel_w, l.stride_w, l.padding);
    int pt = conv_pad_begin(in.shape.rows, l.kernel_h, l.stride_h, l.padding);
    int pl = conv_pad_begin(in.shape.cols, l.kernel_w, l.stride_w, l.padding);

    Tensor3 out(oh, ow, l.out_channels);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int oc = 0; oc < l.out_channels; ++oc) {
                double acc = 0.0;
                // fixed summation order: kh, kw, in_channel ascending
                for (int dy = 0; dy < l.kernel_h; ++dy) {
                    int y = oy * l.stride_h + dy - pt;
                    if (y < 0 || y >= in.shape.rows) continue;
                    for (int dx = 0; dx < l.kernel_w; ++dx) {
                        int x = ox * l.stride_w + dx - pl;
                        if (x < 0 || x >= in.shape.cols) continue;
                        for (int ic = 0; ic < l.in_channels; ++ic)
                            acc += static_cast<double>(l.conv_weight(oc, ic, dy, dx)) *
                                   in.at(y, x, ic);
                    }
                }
                acc += static_cast<double>(l.bias[oc]);
                out.at(oy, ox, oc) = apply_activation(l.activation, acc);
            }
        }
    }
    return out;
}

static Tensor3 dense_head_forward(const LayerSpec& l, const Tensor3& in) {
    Tensor3 out(1, 1, l.out_channels);
    for (int o = 0; o < l.out_channels; ++o) {
        double acc = 0.0;
        for (int i = 0; i < l.in_channels; ++i)
            acc += static_cast<double>(l.dense_weight(o, i)) * in.values[i];
        acc += static_cast<double>(l.bias[o]);
        out.at(0, 0, o) = apply_activation(l.activation, acc);
    }
    return out;
}

static Tensor3 global_average_forward(const Tensor3& in) {
    Tensor3 out(1, 1, in.shape.channels);
    double scale = 1.0 / (static_cast<double>(in.shape.rows) * in.shape.cols);
    for (int ch = 0; ch < in.shape.channels; ++ch) {
        double acc = 0.0;
        for (int r = 0; r < in.shape.rows; ++r)
            for (int c = 0; c < in.shape.cols; ++c)
                acc += in.at(r, c, ch);
        out.at(0, 0, ch) = acc * scale;
    }
    return out;
}

Tensor3 layer_forward(const LayerSpec& layer, const Tensor3& input) {
    switch (layer.kind) {
        case LayerKind::Conv:
            if (layer.in_channels != input.shape.channels)
                throw Error(ErrorCode::ShapeMismatch, "conv input channel mismatch");
            return conv_forward(layer, input);
        case LayerKind::Dense:
            if (static_cast<std::size_t>(layer.in_channels) != input.shape.count())
                throw Error(ErrorCode::ShapeMismatch, "dense input size mismatch");
            return dense_head_forward(layer, input);
        case LayerKind::GlobalAverage:
            return global_average_forward(input);
    }
    throw Error(ErrorCode::ShapeMismatch, "unknown layer kind");
}

std::vector<double> dense_forward(const NetworkSpec& net, const Tensor3& input) {
    if (input.shape != net.input_shape)
        throw Error(ErrorCode::ShapeMismatch, "input shape != network input shape");
    Tensor3 cur = input;
    for (const LayerSpec& l : net.layers) cur = layer_forward(l, cur);
    return cur.values;
}

} // namespace conecast
