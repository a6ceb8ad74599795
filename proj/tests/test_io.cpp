#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "conecast/io.hpp"
#include "test_util.hpp"

using namespace conecast;
using namespace testutil;

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
    fs::path dir = fs::temp_directory_path() / "conecast_io_test";
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& p, const std::vector<uint8_t>& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x >> 24));
    v.push_back(static_cast<uint8_t>(x >> 16));
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

} // namespace

TEST_CASE("idx image reader") {
    auto dir = scratch();
    std::vector<uint8_t> bytes;
    push_be32(bytes, 0x00000803);
    push_be32(bytes, 2); // two images; reader takes the first
    push_be32(bytes, 2);
    push_be32(bytes, 3);
    for (uint8_t px : {0, 51, 102, 153, 204, 255}) bytes.push_back(px); // image 0
    for (int i = 0; i < 6; ++i) bytes.push_back(9);                     // image 1

    auto p = dir / "img.idx";
    write_bytes(p, bytes);

    Tensor3 t = load_input(p.string(), InputFormat::Idx, {2, 3, 1});
    CHECK(t.shape == Shape3{2, 3, 1});
    CHECK(t.values[0] == 0.0);
    CHECK(t.values[1] == doctest::Approx(51.0 / 255.0));
    CHECK(t.values[5] == 1.0);

    SUBCASE("shape mismatch against the model") {
        try {
            (void)load_input(p.string(), InputFormat::Idx, {3, 3, 1});
            FAIL("expected SizeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SizeMismatch);
        }
    }
    SUBCASE("bad magic") {
        bytes[2] = 0x07;
        write_bytes(p, bytes);
        try {
            (void)load_input(p.string(), InputFormat::Idx, {2, 3, 1});
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::FormatError);
        }
    }
    SUBCASE("truncated payload") {
        bytes.pop_back();
        write_bytes(p, bytes);
        try {
            (void)load_input(p.string(), InputFormat::Idx, {2, 3, 1});
            FAIL("expected SizeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SizeMismatch);
        }
    }
}

TEST_CASE("idx label reader") {
    auto dir = scratch();
    std::vector<uint8_t> bytes;
    push_be32(bytes, 0x00000801);
    push_be32(bytes, 4);
    for (uint8_t l : {7, 2, 1, 0}) bytes.push_back(l);
    auto p = dir / "labels.idx";
    write_bytes(p, bytes);

    auto labels = load_idx_labels(p.string());
    CHECK(labels == std::vector<int>{7, 2, 1, 0});
}

TEST_CASE("csv and raw32 round-trip through files") {
    auto dir = scratch();
    Tensor3 t = random_input(313, {4, 3, 2});

    SUBCASE("csv") {
        auto p = dir / "x.csv";
        write_input(p.string(), InputFormat::Csv, t);
        Tensor3 back = load_input(p.string(), InputFormat::Csv, t.shape);
        CHECK(back.values == t.values); // %.17g round-trips doubles
    }
    SUBCASE("raw32") {
        auto p = dir / "x.raw32";
        write_input(p.string(), InputFormat::Raw32, t);
        Tensor3 back = load_input(p.string(), InputFormat::Raw32, t.shape);
        REQUIRE(back.values.size() == t.values.size());
        for (std::size_t i = 0; i < t.values.size(); ++i)
            CHECK(back.values[i] == doctest::Approx(t.values[i]).epsilon(1e-7));
    }
}

TEST_CASE("csv reader rejects malformed grids") {
    auto dir = scratch();
    auto p = dir / "bad.csv";

    SUBCASE("wrong column count") {
        std::ofstream(p) << "1,2,3\n4,5\n";
        try {
            (void)load_input(p.string(), InputFormat::Csv, {2, 3, 1});
            FAIL("expected SizeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SizeMismatch);
        }
    }
    SUBCASE("wrong row count") {
        std::ofstream(p) << "1,2,3\n";
        try {
            (void)load_input(p.string(), InputFormat::Csv, {2, 3, 1});
            FAIL("expected SizeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SizeMismatch);
        }
    }
    SUBCASE("non-numeric value") {
        std::ofstream(p) << "1,2,x\n4,5,6\n";
        try {
            (void)load_input(p.string(), InputFormat::Csv, {2, 3, 1});
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::FormatError);
        }
    }
}

TEST_CASE("raw32 length must match the model input") {
    auto dir = scratch();
    auto p = dir / "short.raw32";
    write_bytes(p, std::vector<uint8_t>(20, 0));
    try {
        (void)load_input(p.string(), InputFormat::Raw32, {2, 3, 1});
        FAIL("expected SizeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeMismatch);
    }
}

TEST_CASE("trace csv writer") {
    auto dir = scratch();
    RunTrace trace;
    trace.steps.push_back({1, {0.5, -1.25}, 3, 7});
    trace.steps.push_back({2, {0.75, 2.0}, 9, 7});
    auto p = dir / "trace.csv";
    write_trace_csv(p.string(), trace);

    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    CHECK(line == "t,output_0,output_1,events,live_scalars");
    std::getline(f, line);
    CHECK(line == "1,0.5,-1.25,3,7");
    std::getline(f, line);
    CHECK(line == "2,0.75,2,9,7");
}
