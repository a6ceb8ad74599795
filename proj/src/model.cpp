#include "conecast/model.hpp"

#include <cstring>
#include <fstream>
#include <json.hpp>

#include "conecast/rng.hpp"

namespace conecast {

using nlohmann::json;

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw Error(ErrorCode::FormatError, "unknown activation '" + name + "'");
}

Tensor3 transpose_tensor(const Tensor3& t) {
    Tensor3 out(t.shape.cols, t.shape.rows, t.shape.channels);
    for (int r = 0; r < t.shape.rows; ++r)
        for (int c = 0; c < t.shape.cols; ++c)
            for (int ch = 0; ch < t.shape.channels; ++ch)
                out.at(c, r, ch) = t.at(r, c, ch);
    return out;
}

std::size_t LayerSpec::expected_weight_count() const {
    switch (kind) {
        case LayerKind::Conv:
            return static_cast<std::size_t>(out_channels) * in_channels * kernel_h * kernel_w;
        case LayerKind::Dense:
            return static_cast<std::size_t>(out_channels) * in_channels;
        case LayerKind::GlobalAverage:
            return 0;
    }
    return 0;
}

std::size_t LayerSpec::expected_bias_count() const {
    return kind == LayerKind::GlobalAverage ? 0 : static_cast<std::size_t>(out_channels);
}

bool NetworkSpec::has_nonzero_bias() const {
    for (const auto& l : layers)
        for (float b : l.bias)
            if (b != 0.0f) return true;
    return false;
}

int conv_out_extent(int in, int k, int s, Padding p) {
    if (p == Padding::Same) return (in + s - 1) / s;
    return (in - k) / s + 1; // may be <= 0: caller reports EmptyOutput
}

int conv_pad_begin(int in, int k, int s, Padding p) {
    if (p == Padding::Valid) return 0;
    int out = conv_out_extent(in, k, s, p);
    int total = (out - 1) * s + k - in;
    if (total < 0) total = 0;
    return total / 2;
}

NetworkSpec validate(NetworkSpec spec) {
    if (spec.input_shape.rows < 1 || spec.input_shape.cols < 1 || spec.input_shape.channels < 1)
        throw Error(ErrorCode::ShapeMismatch, "input shape must be positive");
    if (spec.layers.empty())
        throw Error(ErrorCode::ShapeMismatch, "network has no layers");

    spec.inferred_shapes.clear();
    Shape3 cur = spec.input_shape;
    bool head_seen = false;

    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        std::string where = "layer " + std::to_string(i);

        if (l.weights.size() != l.expected_weight_count())
            throw Error(ErrorCode::ShapeMismatch,
                        where + ": weight count " + std::to_string(l.weights.size()) +
                            " != expected " + std::to_string(l.expected_weight_count()));
        if (l.bias.size() != l.expected_bias_count())
            throw Error(ErrorCode::ShapeMismatch, where + ": bias count mismatch");

        switch (l.kind) {
            case LayerKind::Conv: {
                if (head_seen)
                    throw Error(ErrorCode::BadHead, where + ": conv after head layer");
                if (l.kernel_h < 1 || l.kernel_w < 1 || l.stride_h < 1 || l.stride_w < 1 ||
                    l.in_channels < 1 || l.out_channels < 1)
                    throw Error(ErrorCode::ShapeMismatch, where + ": non-positive conv geometry");
                if (l.in_channels != cur.channels)
                    throw Error(ErrorCode::ShapeMismatch,
                                where + ": in_channels " + std::to_string(l.in_channels) +
                                    " != incoming channels " + std::to_string(cur.channels));
                int oh = conv_out_extent(cur.rows, l.kernel_h, l.stride_h, l.padding);
                int ow = conv_out_extent(cur.cols, l.kernel_w, l.stride_w, l.padding);
                if (oh < 1 || ow < 1)
                    throw Error(ErrorCode::EmptyOutput, where + ": conv collapses a dimension");
                cur = Shape3{oh, ow, l.out_channels};
                break;
            }
            case LayerKind::Dense: {
                int flat = static_cast<int>(cur.count());
                if (l.in_channels != flat)
                    throw Error(ErrorCode::ShapeMismatch,
                                where + ": dense in " + std::to_string(l.in_channels) +
                                    " != flattened input " + std::to_string(flat));
                if (l.out_channels < 1)
                    throw Error(ErrorCode::ShapeMismatch, where + ": dense out must be positive");
                head_seen = true;
                cur = Shape3{1, 1, l.out_channels};
                break;
            }
            case LayerKind::GlobalAverage: {
                if (head_seen)
                    throw Error(ErrorCode::BadHead, where + ": global_average after head layer");
                if (l.activation != Activation::Identity)
                    throw Error(ErrorCode::ShapeMismatch,
                                where + ": global_average takes identity activation");
                head_seen = true;
                cur = Shape3{1, 1, cur.channels};
                break;
            }
        }
        spec.inferred_shapes.push_back(cur);
    }

    spec.validated = true;
    return spec;
}

NetworkSpec random_network(uint64_t seed, const RandomNetOptions& opts) {
    if (opts.depth < 1)
        throw Error(ErrorCode::InfeasibleShape, "depth must be >= 1");
    if (opts.min_size < 1 || opts.min_size > opts.max_size || opts.min_channels < 1 ||
        opts.min_channels > opts.max_channels || opts.max_kernel < 1)
        throw Error(ErrorCode::InfeasibleShape, "bad size/channel ranges");

    SplitMix64 rng(seed);
    NetworkSpec net;
    net.input_shape.rows =
        static_cast<int>(rng.next_range(opts.min_size, opts.max_size));
    net.input_shape.cols =
        static_cast<int>(rng.next_range(opts.min_size, opts.max_size));
    net.input_shape.channels =
        static_cast<int>(rng.next_range(opts.min_channels, opts.max_channels));

    Shape3 cur = net.input_shape;
    for (int i = 0; i < opts.depth; ++i) {
        LayerSpec l;
        l.kind = LayerKind::Conv;
        l.kernel_h = static_cast<int>(rng.next_range(1, std::min(opts.max_kernel, cur.rows)));
        l.kernel_w = static_cast<int>(rng.next_range(1, std::min(opts.max_kernel, cur.cols)));
        l.stride_h = opts.allow_stride2 && cur.rows > 4 ? static_cast<int>(rng.next_range(1, 2)) : 1;
        l.stride_w = opts.allow_stride2 && cur.cols > 4 ? static_cast<int>(rng.next_range(1, 2)) : 1;
        l.padding = opts.allow_same_padding && rng.next_range(0, 1) == 1 ? Padding::Same
                                                                         : Padding::Valid;
        l.in_channels = cur.channels;
        l.out_channels = static_cast<int>(rng.next_range(opts.min_channels, opts.max_channels));
        if (opts.activation_pool.empty()) {
            l.activation = static_cast<Activation>(rng.next_range(0, 2));
        } else {
            l.activation =
                opts.activation_pool[rng.next_range(0, opts.activation_pool.size() - 1)];
        }
        l.weights.resize(l.expected_weight_count());
        for (float& w : l.weights) w = static_cast<float>(rng.next_symmetric());
        l.bias.assign(l.expected_bias_count(), 0.0f);

        int oh = conv_out_extent(cur.rows, l.kernel_h, l.stride_h, l.padding);
        int ow = conv_out_extent(cur.cols, l.kernel_w, l.stride_w, l.padding);
        if (oh < 1 || ow < 1)
            throw Error(ErrorCode::InfeasibleShape, "ranges cannot keep conv output non-empty");
        cur = Shape3{oh, ow, l.out_channels};
        net.layers.push_back(std::move(l));
    }

    std::string head = opts.head;
    if (head == "auto") {
        const char* kinds[] = {"ga", "ga_dense", "dense"};
        head = kinds[rng.next_range(0, 2)];
    }
    if (head == "ga" || head == "ga_dense") {
        LayerSpec ga;
        ga.kind = LayerKind::GlobalAverage;
        ga.in_channels = cur.channels;
        ga.out_channels = cur.channels;
        ga.activation = Activation::Identity;
        cur = Shape3{1, 1, cur.channels};
        net.layers.push_back(std::move(ga));
    }
    if (head == "dense" || head == "ga_dense") {
        LayerSpec d;
        d.kind = LayerKind::Dense;
        d.in_channels = static_cast<int>(cur.count());
        d.out_channels = opts.dense_out;
        d.activation = Activation::Identity;
        d.weights.resize(d.expected_weight_count());
        for (float& w : d.weights) w = static_cast<float>(rng.next_symmetric());
        d.bias.assign(d.expected_bias_count(), 0.0f);
        net.layers.push_back(std::move(d));
    } else if (head != "ga" && head != "none") {
        throw Error(ErrorCode::InfeasibleShape, "unknown head kind '" + head + "'");
    }

    return validate(std::move(net));
}

static const char* padding_name(Padding p) { return p == Padding::Valid ? "valid" : "same"; }

static Padding padding_from_name(const std::string& s) {
    if (s == "valid") return Padding::Valid;
    if (s == "same") return Padding::Same;
    throw Error(ErrorCode::FormatError, "unknown padding '" + s + "'");
}

std::string manifest_to_json(const NetworkSpec& spec) {
    json j;
    j["version"] = 1;
    j["input_shape"] = {spec.input_shape.rows, spec.input_shape.cols, spec.input_shape.channels};
    json layers = json::array();
    std::size_t offset = 0;
    for (const LayerSpec& l : spec.layers) {
        json e;
        switch (l.kind) {
            case LayerKind::Conv:
                e["kind"] = "conv";
                e["kernel"] = {l.kernel_h, l.kernel_w};
                e["stride"] = {l.stride_h, l.stride_w};
                e["padding"] = padding_name(l.padding);
                e["in_channels"] = l.in_channels;
                e["out_channels"] = l.out_channels;
                break;
            case LayerKind::Dense:
                e["kind"] = "dense";
                e["in"] = l.in_channels;
                e["out"] = l.out_channels;
                break;
            case LayerKind::GlobalAverage:
                e["kind"] = "global_average";
                break;
        }
        if (l.kind != LayerKind::GlobalAverage) {
            e["activation"] = activation_name(l.activation);
            e["weights_offset"] = offset;
            offset += l.weights.size() * sizeof(float);
            e["bias_offset"] = offset;
            offset += l.bias.size() * sizeof(float);
        }
        layers.push_back(std::move(e));
    }
    j["layers"] = std::move(layers);
    return j.dump(2) + "\n";
}

std::vector<uint8_t> weights_to_blob(const NetworkSpec& spec) {
    std::vector<uint8_t> blob;
    auto append = [&blob](const std::vector<float>& v) {
        std::size_t base = blob.size();
        blob.resize(base + v.size() * sizeof(float));
        if (!v.empty()) std::memcpy(blob.data() + base, v.data(), v.size() * sizeof(float));
    };
    for (const LayerSpec& l : spec.layers) {
        append(l.weights);
        append(l.bias);
    }
    return blob;
}

static std::vector<float> read_tensor(const std::vector<uint8_t>& blob, std::size_t offset,
                                      std::size_t count) {
    if (offset > blob.size() || count > (blob.size() - offset) / sizeof(float))
        throw Error(ErrorCode::SizeMismatch, "tensor extends past end of blob");
    std::vector<float> out(count);
    if (count) std::memcpy(out.data(), blob.data() + offset, count * sizeof(float));
    return out;
}

NetworkSpec model_from_parts(const std::string& manifest_json, const std::vector<uint8_t>& blob) {
    json j;
    try {
        j = json::parse(manifest_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("manifest is not valid JSON: ") + e.what());
    }

    try {
        if (!j.contains("version") || !j["version"].is_number_integer())
            throw Error(ErrorCode::FormatError, "manifest missing integer version");
        if (j["version"].get<int>() != 1)
            throw Error(ErrorCode::FormatError,
                        "unsupported manifest version " + j["version"].dump() + " (reader supports 1)");

        NetworkSpec spec;
        auto shape = j.at("input_shape");
        if (!shape.is_array() || shape.size() != 3)
            throw Error(ErrorCode::FormatError, "input_shape must be [H,W,C]");
        spec.input_shape = {shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>()};

        std::size_t declared_bytes = 0;
        for (const auto& e : j.at("layers")) {
            LayerSpec l;
            std::string kind = e.at("kind").get<std::string>();
            if (kind == "conv") {
                l.kind = LayerKind::Conv;
                l.kernel_h = e.at("kernel")[0].get<int>();
                l.kernel_w = e.at("kernel")[1].get<int>();
                l.stride_h = e.at("stride")[0].get<int>();
                l.stride_w = e.at("stride")[1].get<int>();
                l.padding = padding_from_name(e.at("padding").get<std::string>());
                l.in_channels = e.at("in_channels").get<int>();
                l.out_channels = e.at("out_channels").get<int>();
            } else if (kind == "dense") {
                l.kind = LayerKind::Dense;
                l.in_channels = e.at("in").get<int>();
                l.out_channels = e.at("out").get<int>();
            } else if (kind == "global_average") {
                l.kind = LayerKind::GlobalAverage;
            } else {
                throw Error(ErrorCode::FormatError, "unknown layer kind '" + kind + "'");
            }
            if (l.kind != LayerKind::GlobalAverage) {
                l.activation = activation_from_name(e.at("activation").get<std::string>());
                std::size_t woff = e.at("weights_offset").get<std::size_t>();
                std::size_t boff = e.at("bias_offset").get<std::size_t>();
                l.weights = read_tensor(blob, woff, l.expected_weight_count());
                l.bias = read_tensor(blob, boff, l.expected_bias_count());
                declared_bytes += (l.weights.size() + l.bias.size()) * sizeof(float);
            }
            spec.layers.push_back(std::move(l));
        }

        if (declared_bytes != blob.size())
            throw Error(ErrorCode::SizeMismatch,
                        "blob length " + std::to_string(blob.size()) +
                            " != declared tensor bytes " + std::to_string(declared_bytes));

        // infer in/out channels for GA entries (the manifest carries none)
        Shape3 cur = spec.input_shape;
        for (LayerSpec& l : spec.layers) {
            if (l.kind == LayerKind::GlobalAverage) {
                l.in_channels = cur.channels;
                l.out_channels = cur.channels;
                l.activation = Activation::Identity;
                cur = Shape3{1, 1, cur.channels};
            } else if (l.kind == LayerKind::Conv) {
                int oh = conv_out_extent(cur.rows, l.kernel_h, l.stride_h, l.padding);
                int ow = conv_out_extent(cur.cols, l.kernel_w, l.stride_w, l.padding);
                cur = Shape3{oh, ow, l.out_channels};
            } else {
                cur = Shape3{1, 1, l.out_channels};
            }
        }

        return validate(std::move(spec));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("manifest field error: ") + e.what());
    }
}

void save_model(const NetworkSpec& spec, const std::string& manifest_path,
                const std::string& blob_path) {
    std::string manifest = manifest_to_json(spec);
    std::vector<uint8_t> blob = weights_to_blob(spec);

    std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
    if (!mf) throw Error(ErrorCode::Io, "cannot open " + manifest_path + " for writing");
    mf.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
    if (!mf) throw Error(ErrorCode::Io, "write failed: " + manifest_path);

    std::ofstream bf(blob_path, std::ios::binary | std::ios::trunc);
    if (!bf) throw Error(ErrorCode::Io, "cannot open " + blob_path + " for writing");
    bf.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (!bf) throw Error(ErrorCode::Io, "write failed: " + blob_path);
}

static std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
    std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<uint8_t> data(static_cast<std::size_t>(size));
    if (size && !f.read(reinterpret_cast<char*>(data.data()), size))
        throw Error(ErrorCode::Io, "read failed: " + path);
    return data;
}

NetworkSpec load_model(const std::string& manifest_path, const std::string& blob_path) {
    std::vector<uint8_t> manifest = read_file(manifest_path);
    std::vector<uint8_t> blob = read_file(blob_path);
    return model_from_parts(std::string(manifest.begin(), manifest.end()), blob);
}

NetworkSpec transpose_network(const NetworkSpec& spec) {
    NetworkSpec out;
    out.input_shape =
        Shape3{spec.input_shape.cols, spec.input_shape.rows, spec.input_shape.channels};

    Shape3 cur = spec.input_shape; // original orientation, tracked for dense re-indexing
    for (const LayerSpec& l : spec.layers) {
        LayerSpec t = l;
        if (l.kind == LayerKind::Conv) {
            t.kernel_h = l.kernel_w;
            t.kernel_w = l.kernel_h;
            t.stride_h = l.stride_w;
            t.stride_w = l.stride_h;
            for (int oc = 0; oc < l.out_channels; ++oc)
                for (int ic = 0; ic < l.in_channels; ++ic)
                    for (int dy = 0; dy < t.kernel_h; ++dy)
                        for (int dx = 0; dx < t.kernel_w; ++dx)
                            t.weights[((static_cast<std::size_t>(oc) * l.in_channels + ic) *
                                           t.kernel_h +
                                       dy) *
                                          t.kernel_w +
                                      dx] = l.conv_weight(oc, ic, dx, dy);
            cur = Shape3{conv_out_extent(cur.rows, l.kernel_h, l.stride_h, l.padding),
                         conv_out_extent(cur.cols, l.kernel_w, l.stride_w, l.padding),
                         l.out_channels};
        } else if (l.kind == LayerKind::Dense) {
            // dense input index is row-major over (row, col, ch) of its input
            // map; in the transposed net that map arrives transposed
            for (int o = 0; o < l.out_channels; ++o)
                for (int r = 0; r < cur.rows; ++r)
                    for (int c = 0; c < cur.cols; ++c)
                        for (int ch = 0; ch < cur.channels; ++ch) {
                            std::size_t orig = (static_cast<std::size_t>(r) * cur.cols + c) *
                                                   cur.channels + ch;
                            std::size_t flipped = (static_cast<std::size_t>(c) * cur.rows + r) *
                                                      cur.channels + ch;
                            t.weights[static_cast<std::size_t>(o) * l.in_channels + flipped] =
                                l.dense_weight(o, static_cast<int>(orig));
                        }
            cur = Shape3{1, 1, l.out_channels};
        } else {
            cur = Shape3{1, 1, cur.channels};
        }
        out.layers.push_back(std::move(t));
    }
    return validate(std::move(out));
}

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyOutput: return "EmptyOutput";
        case ErrorCode::BadHead: return "BadHead";
        case ErrorCode::InfeasibleShape: return "InfeasibleShape";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::Io: return "Io";
        case ErrorCode::NonzeroBias: return "NonzeroBias";
        case ErrorCode::UnsupportedLayer: return "UnsupportedLayer";
        case ErrorCode::TooManyRows: return "TooManyRows";
        case ErrorCode::TooManyElements: return "TooManyElements";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::NotOneDimensional: return "NotOneDimensional";
        case ErrorCode::IncompleteInput: return "IncompleteInput";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
    }
    return "Error";
}

} // namespace conecast
