#include "conecast/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace conecast {

InputFormat input_format_from_name(const std::string& name) {
    if (name == "idx") return InputFormat::Idx;
    if (name == "csv") return InputFormat::Csv;
    if (name == "raw32") return InputFormat::Raw32;
    throw Error(ErrorCode::FormatError, "unknown input format '" + name + "'");
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

static uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

static Tensor3 load_idx_image(const std::string& path, const Shape3& expected) {
    std::vector<uint8_t> data = read_file(path);
    if (data.size() < 4) throw Error(ErrorCode::FormatError, "idx file too short");
    uint32_t magic = be32(data.data());
    if (magic != 0x00000803u)
        throw Error(ErrorCode::FormatError, "bad idx magic (want 0x00000803 ubyte 3-dim)");
    if (data.size() < 16) throw Error(ErrorCode::FormatError, "idx header truncated");
    uint32_t n = be32(data.data() + 4);
    uint32_t rows = be32(data.data() + 8);
    uint32_t cols = be32(data.data() + 12);
    if (n < 1) throw Error(ErrorCode::FormatError, "idx file holds no images");
    if (rows > (1u << 20) || cols > (1u << 20) || n > (1u << 20))
        throw Error(ErrorCode::FormatError, "idx dimensions out of range");
    std::size_t need = 16 + static_cast<std::size_t>(n) * rows * cols;
    if (data.size() != need)
        throw Error(ErrorCode::SizeMismatch, "idx payload length does not match dimensions");
    if (expected.channels != 1 || static_cast<uint32_t>(expected.rows) != rows ||
        static_cast<uint32_t>(expected.cols) != cols)
        throw Error(ErrorCode::SizeMismatch, "idx image dimensions do not match the model input");

    Tensor3 t(static_cast<int>(rows), static_cast<int>(cols), 1);
    const uint8_t* px = data.data() + 16; // image 0
    for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i)
        t.values[i] = static_cast<double>(px[i]) / 255.0;
    return t;
}

std::vector<int> load_idx_labels(const std::string& path) {
    std::vector<uint8_t> data = read_file(path);
    if (data.size() < 8) throw Error(ErrorCode::FormatError, "idx label file too short");
    if (be32(data.data()) != 0x00000801u)
        throw Error(ErrorCode::FormatError, "bad idx magic (want 0x00000801 ubyte 1-dim)");
    uint32_t n = be32(data.data() + 4);
    if (data.size() != 8 + static_cast<std::size_t>(n))
        throw Error(ErrorCode::SizeMismatch, "idx label payload length mismatch");
    return std::vector<int>(data.begin() + 8, data.end());
}

static double parse_value(const std::string& tok, const std::string& path) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw Error(ErrorCode::FormatError, path + ": bad numeric value '" + tok + "'");
    return v;
}

static Tensor3 load_csv(const std::string& path, const Shape3& expected) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
    Tensor3 t(expected.rows, expected.cols, expected.channels);
    std::size_t per_row = static_cast<std::size_t>(expected.cols) * expected.channels;
    std::string line;
    int r = 0;
    while (std::getline(f, line)) {
        if (line.empty() && f.peek() == EOF) break;
        if (r >= expected.rows)
            throw Error(ErrorCode::SizeMismatch, path + ": more rows than the model input has");
        std::stringstream ls(line);
        std::string tok;
        std::size_t c = 0;
        while (std::getline(ls, tok, ',')) {
            if (c >= per_row)
                throw Error(ErrorCode::SizeMismatch, path + ": row " + std::to_string(r) +
                                                         " has too many values");
            t.values[static_cast<std::size_t>(r) * per_row + c] = parse_value(tok, path);
            ++c;
        }
        if (c != per_row)
            throw Error(ErrorCode::SizeMismatch,
                        path + ": row " + std::to_string(r) + " has " + std::to_string(c) +
                            " values, expected " + std::to_string(per_row));
        ++r;
    }
    if (r != expected.rows)
        throw Error(ErrorCode::SizeMismatch, path + ": " + std::to_string(r) +
                                                 " rows, expected " +
                                                 std::to_string(expected.rows));
    return t;
}

static Tensor3 load_raw32(const std::string& path, const Shape3& expected) {
    std::vector<uint8_t> data = read_file(path);
    std::size_t count = expected.count();
    if (data.size() != count * sizeof(float))
        throw Error(ErrorCode::SizeMismatch,
                    path + ": " + std::to_string(data.size()) + " bytes, expected " +
                        std::to_string(count * sizeof(float)));
    Tensor3 t(expected.rows, expected.cols, expected.channels);
    for (std::size_t i = 0; i < count; ++i) {
        float v;
        std::memcpy(&v, data.data() + i * sizeof(float), sizeof(float));
        t.values[i] = static_cast<double>(v);
    }
    return t;
}

Tensor3 load_input(const std::string& path, InputFormat format, const Shape3& expected) {
    switch (format) {
        case InputFormat::Idx: return load_idx_image(path, expected);
        case InputFormat::Csv: return load_csv(path, expected);
        case InputFormat::Raw32: return load_raw32(path, expected);
    }
    throw Error(ErrorCode::FormatError, "unknown input format");
}

static void format_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void write_input(const std::string& path, InputFormat format, const Tensor3& tensor) {
    if (format == InputFormat::Idx)
        throw Error(ErrorCode::FormatError, "idx output is not supported");

    if (format == InputFormat::Raw32) {
        std::vector<uint8_t> bytes(tensor.values.size() * sizeof(float));
        for (std::size_t i = 0; i < tensor.values.size(); ++i) {
            float v = static_cast<float>(tensor.values[i]);
            std::memcpy(bytes.data() + i * sizeof(float), &v, sizeof(float));
        }
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw Error(ErrorCode::Io, "write failed: " + path);
        return;
    }

    std::string out;
    std::size_t per_row = static_cast<std::size_t>(tensor.shape.cols) * tensor.shape.channels;
    for (int r = 0; r < tensor.shape.rows; ++r) {
        for (std::size_t c = 0; c < per_row; ++c) {
            if (c) out += ',';
            format_double(out, tensor.values[static_cast<std::size_t>(r) * per_row + c]);
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    f << out;
    if (!f) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
    std::string out = "t";
    std::size_t k = trace.steps.empty() ? 0 : trace.steps.front().output.size();
    for (std::size_t i = 0; i < k; ++i) out += ",output_" + std::to_string(i);
    out += ",events,live_scalars\n";
    for (const StepRecord& s : trace.steps) {
        out += std::to_string(s.step);
        for (double v : s.output) {
            out += ',';
            format_double(out, v);
        }
        out += ',' + std::to_string(s.events) + ',' + std::to_string(s.live_scalars) + '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    f << out;
    if (!f) throw Error(ErrorCode::Io, "write failed: " + path);
}

} // namespace conecast
