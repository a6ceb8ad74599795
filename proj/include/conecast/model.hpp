#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "conecast/error.hpp"
#include "conecast/tensor.hpp"

namespace conecast {

// Supported nonlinearities. All satisfy f(0) = 0, which the streaming engine
// relies on (zero initial state, zero padding, all-zero regions cost nothing).
enum class Activation { Identity, Relu, Tanh };

inline double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::Identity: return x;
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Tanh: return std::tanh(x);
    }
    return x;
}

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

enum class LayerKind { Conv, Dense, GlobalAverage };

enum class Padding { Valid, Same };

// One layer of the network. Weight layout:
//   conv:  [out_ch][in_ch][kh][kw], row-major
//   dense: [out][in], in indexed row-major over (row, col, channel) of the input map
struct LayerSpec {
    LayerKind kind = LayerKind::Conv;
    int kernel_h = 1, kernel_w = 1; // conv only
    int stride_h = 1, stride_w = 1; // conv only
    Padding padding = Padding::Valid; // conv only
    int in_channels = 0;  // conv: channels; dense: flat input size
    int out_channels = 0; // conv: channels; dense: output size
    Activation activation = Activation::Identity;
    std::vector<float> weights;
    std::vector<float> bias;

    std::size_t expected_weight_count() const;
    std::size_t expected_bias_count() const;

    float conv_weight(int oc, int ic, int dy, int dx) const {
        return weights[((static_cast<std::size_t>(oc) * in_channels + ic) * kernel_h + dy) * kernel_w + dx];
    }
    float dense_weight(int out, int in) const {
        return weights[static_cast<std::size_t>(out) * in_channels + in];
    }
};

struct NetworkSpec {
    Shape3 input_shape;
    std::vector<LayerSpec> layers;
    // filled by validate(); inferred_shapes[i] is layer i's output shape
    std::vector<Shape3> inferred_shapes;
    bool validated = false;

    Shape3 output_shape() const {
        return inferred_shapes.empty() ? input_shape : inferred_shapes.back();
    }
    std::size_t output_count() const { return output_shape().count(); }
    bool has_nonzero_bias() const;
};

// Conv output extent for one axis; same padding picks pad so out = ceil(in/s).
int conv_out_extent(int in, int k, int s, Padding p);
// Leading (top/left) pad for one axis. Total pad is max((out-1)*s + k - in, 0),
// split pad_begin = total/2 (same as TensorFlow).
int conv_pad_begin(int in, int k, int s, Padding p);

// Checks chain compatibility and fills inferred_shapes. Throws Error with
// ShapeMismatch / EmptyOutput / BadHead. Idempotent.
NetworkSpec validate(NetworkSpec spec);

struct RandomNetOptions {
    int depth = 2;                   // number of conv layers
    int min_size = 6, max_size = 16; // input H and W range
    int min_channels = 1, max_channels = 8;
    int max_kernel = 3;
    bool allow_stride2 = true;
    bool allow_same_padding = true;
    // empty -> per-layer activation sampled from {identity, relu, tanh}
    std::vector<Activation> activation_pool;
    // "ga" | "ga_dense" | "dense" | "auto" (sampled) | "none"
    std::string head = "auto";
    int dense_out = 10;
};

// Deterministic function of seed; zero biases; weights uniform in [-1, 1).
NetworkSpec random_network(uint64_t seed, const RandomNetOptions& opts = {});

// Model persistence. Manifest is JSON (version 1), weights are a raw blob of
// IEEE-754 binary32 little-endian values at the offsets the manifest declares.
void save_model(const NetworkSpec& spec, const std::string& manifest_path,
                const std::string& blob_path);
NetworkSpec load_model(const std::string& manifest_path, const std::string& blob_path);

// In-memory variants used by save_model/load_model and the round-trip tests.
std::string manifest_to_json(const NetworkSpec& spec);
std::vector<uint8_t> weights_to_blob(const NetworkSpec& spec);
NetworkSpec model_from_parts(const std::string& manifest_json,
                             const std::vector<uint8_t>& blob);

// Swap the two spatial axes of the whole network: kernels, strides, and the
// dense-head input indexing are permuted so that for every input x,
// dense_forward(transpose_network(n), transpose_tensor(x)) == dense_forward(n, x).
NetworkSpec transpose_network(const NetworkSpec& spec);

} // namespace conecast
