#include <doctest.h>

#include "conecast/dense_ref.hpp"
#include "conecast/model.hpp"
#include "naive_ref.hpp"
#include "test_util.hpp"

using namespace conecast;
using namespace testutil;

TEST_CASE("1x1 identity conv is the identity") {
    auto l = conv_layer(1, 1, 1, 1, Activation::Identity, {1.0f});
    Tensor3 in = random_input(5, {4, 5, 1});
    Tensor3 out = layer_forward(l, in);
    CHECK(out.values == in.values);
}

TEST_CASE("hand-evaluated 1D conv") {
    // weights [1,2,3] over input row [1,0,2]: 1*1 + 2*0 + 3*2 = 7
    auto l = conv_layer(1, 3, 1, 1, Activation::Identity, {1.0f, 2.0f, 3.0f});
    Tensor3 in(1, 3, 1);
    in.values = {1.0, 0.0, 2.0};
    Tensor3 out = layer_forward(l, in);
    REQUIRE(out.shape == Shape3{1, 1, 1});
    CHECK(out.values[0] == 7.0);
}

TEST_CASE("relu of all-zero input with zero bias is all-zero") {
    auto l = conv_layer(3, 3, 2, 3, Activation::Relu, std::vector<float>(3 * 2 * 9, 0.7f));
    Tensor3 in(5, 5, 2);
    Tensor3 out = layer_forward(l, in);
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("layer_forward rejects shape mismatches") {
    auto l = conv_layer(3, 3, 2, 3, Activation::Relu, std::vector<float>(3 * 2 * 9, 0.7f));
    Tensor3 in(5, 5, 1);
    CHECK_THROWS_AS((void)layer_forward(l, in), Error);
}

TEST_CASE("dense_forward of zero input through a zero-bias net is zero") {
    auto net = random_network(21);
    Tensor3 zeros(net.input_shape.rows, net.input_shape.cols, net.input_shape.channels);
    for (double v : dense_forward(net, zeros)) CHECK(v == 0.0);
}

TEST_CASE("stack of 1x1 identity convs with averaging head yields the spatial mean") {
    NetworkSpec net;
    net.input_shape = {3, 4, 1};
    net.layers.push_back(conv_layer(1, 1, 1, 1, Activation::Identity, {1.0f}));
    net.layers.push_back(conv_layer(1, 1, 1, 1, Activation::Identity, {1.0f}));
    net.layers.push_back(ga_layer());
    net = validate(std::move(net));

    Tensor3 in = random_input(9, net.input_shape, 0.0);
    double mean = 0.0;
    for (double v : in.values) mean += v;
    mean /= static_cast<double>(in.values.size());

    auto out = dense_forward(net, in);
    REQUIRE(out.size() == 1);
    CHECK(close(out[0], mean, 1e-12, 1e-15));
}

TEST_CASE("oracle agrees with the independent brute-force reference") {
    for (uint64_t seed = 300; seed < 330; ++seed) {
        RandomNetOptions opts;
        opts.depth = 1 + static_cast<int>(seed % 4);
        auto net = random_network(seed, opts);
        auto in = random_input(seed ^ 0xabcdef, net.input_shape);

        auto fast = dense_forward(net, in);
        auto ref = naive::forward(net, in);
        REQUIRE(fast.size() == ref.size());
        CHECK(all_close(fast, ref, 1e-12, 1e-12));
    }
}

TEST_CASE("oracle supports nonzero biases (engine-only restriction)") {
    auto l = conv_layer(1, 1, 1, 1, Activation::Identity, {2.0f});
    l.bias = {1.5f};
    Tensor3 in(1, 1, 1);
    in.values = {3.0};
    CHECK(layer_forward(l, in).values[0] == 7.5);
}

TEST_CASE("property: pre-activation linearity for identity layers") {
    SplitMix64 rng(77);
    auto l = conv_layer(3, 3, 2, 3, Activation::Identity,
                        [&] {
                            std::vector<float> w(3 * 2 * 9);
                            for (auto& v : w) v = static_cast<float>(rng.next_symmetric());
                            return w;
                        }());
    Tensor3 x = random_input(501, {6, 6, 2}, 0.0);
    Tensor3 y = random_input(502, {6, 6, 2}, 0.0);

    auto fx = layer_forward(l, x);
    auto fy = layer_forward(l, y);

    SUBCASE("scaling") {
        Tensor3 ax = x;
        for (double& v : ax.values) v *= -2.5;
        auto fax = layer_forward(l, ax);
        for (std::size_t i = 0; i < fax.values.size(); ++i)
            CHECK(close(fax.values[i], -2.5 * fx.values[i], 1e-12, 1e-12));
    }
    SUBCASE("additivity") {
        Tensor3 xy = x;
        for (std::size_t i = 0; i < xy.values.size(); ++i) xy.values[i] += y.values[i];
        auto fxy = layer_forward(l, xy);
        for (std::size_t i = 0; i < fxy.values.size(); ++i)
            CHECK(close(fxy.values[i], fx.values[i] + fy.values[i], 1e-12, 1e-12));
    }
}

TEST_CASE("property: stride-1 valid conv commutes with column shifts in the interior") {
    SplitMix64 rng(88);
    std::vector<float> w(2 * 2 * 9);
    for (auto& v : w) v = static_cast<float>(rng.next_symmetric());
    auto l = conv_layer(3, 3, 2, 2, Activation::Tanh, w);

    Tensor3 x = random_input(601, {7, 9, 2}, 0.2);
    Tensor3 shifted(7, 9, 2); // x moved one column right, new left column zero
    for (int r = 0; r < 7; ++r)
        for (int c = 1; c < 9; ++c)
            for (int ch = 0; ch < 2; ++ch) shifted.at(r, c, ch) = x.at(r, c - 1, ch);

    auto fx = layer_forward(l, x);
    auto fs = layer_forward(l, shifted);
    for (int r = 0; r < fx.shape.rows; ++r)
        for (int c = 1; c < fx.shape.cols; ++c)
            for (int ch = 0; ch < 2; ++ch)
                CHECK(fs.at(r, c, ch) == fx.at(r, c - 1, ch));
}

TEST_CASE("property: appended zero rows only change units that can see them") {
    SplitMix64 rng(99);
    std::vector<float> w(1 * 1 * 9);
    for (auto& v : w) v = static_cast<float>(rng.next_symmetric());
    auto l = conv_layer(3, 3, 1, 1, Activation::Tanh, w);

    Tensor3 x = random_input(701, {6, 6, 1}, 0.2);
    Tensor3 ext(9, 6, 1);
    std::copy(x.values.begin(), x.values.end(), ext.values.begin());

    auto fx = layer_forward(l, x);   // 4 rows
    auto fe = layer_forward(l, ext); // 7 rows
    for (int r = 0; r < fx.shape.rows; ++r)
        for (int c = 0; c < fx.shape.cols; ++c)
            CHECK(fe.at(r, c, 0) == fx.at(r, c, 0));
    // the row whose window covers only the zero extension is exactly zero
    for (int c = 0; c < fe.shape.cols; ++c) CHECK(fe.at(6, c, 0) == 0.0);
}
