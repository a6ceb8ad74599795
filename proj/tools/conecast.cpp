#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "conecast/dense_ref.hpp"
#include "conecast/engine.hpp"
#include "conecast/io.hpp"
#include "conecast/metrics.hpp"
#include "conecast/model.hpp"
#include "conecast/rng.hpp"

using namespace conecast;

namespace {

// 0 success, 1 tolerance/assertion failure, 2 input/format error, 3 engine error
int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::NonzeroBias:
        case ErrorCode::UnsupportedLayer:
        case ErrorCode::TooManyRows:
        case ErrorCode::TooManyElements:
        case ErrorCode::LengthMismatch:
        case ErrorCode::NonFiniteInput:
        case ErrorCode::NotOneDimensional:
        case ErrorCode::IncompleteInput:
            return 3;
        default:
            return 2;
    }
}

PropagationMode mode_from_name(const std::string& name) {
    if (name == "per-row") return PropagationMode::PerRow;
    if (name == "per-event") return PropagationMode::PerEvent;
    throw Error(ErrorCode::FormatError, "unknown mode '" + name + "'");
}

struct RunArgs {
    std::string model, weights, input;
    std::string format = "raw32";
    std::string mode = "per-row";
    std::string trace_path;
    bool transpose = false;
    int threads = 1;
};

struct LoadedCase {
    NetworkSpec net;
    Tensor3 input;
};

LoadedCase load_case(const RunArgs& a) {
    NetworkSpec net = load_model(a.model, a.weights);
    Tensor3 in = load_input(a.input, input_format_from_name(a.format), net.input_shape);
    if (a.transpose) {
        net = transpose_network(net);
        in = transpose_tensor(in);
    }
    return {std::move(net), std::move(in)};
}

std::vector<double> input_row(const Tensor3& in, int r) {
    std::size_t per_row = static_cast<std::size_t>(in.shape.cols) * in.shape.channels;
    auto first = in.values.begin() + static_cast<std::ptrdiff_t>(r * per_row);
    return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(per_row));
}

void print_output(const std::vector<double>& out) {
    std::printf("output:");
    for (double v : out) std::printf(" %.10g", v);
    std::printf("\n");
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] > out[best]) best = i; // lowest index wins ties
    std::printf("argmax: %zu\n", best);
}

int cmd_run(const RunArgs& a) {
    LoadedCase c = load_case(a);
    Engine engine(c.net, {.mode = mode_from_name(a.mode), .threads = a.threads});
    RunTrace trace;
    std::vector<double> out;
    for (int r = 0; r < c.input.shape.rows; ++r) {
        out = engine.push_row(input_row(c.input, r));
        record(trace, engine);
    }
    out = engine.finalize();
    if (!a.trace_path.empty()) write_trace_csv(a.trace_path, trace);
    print_output(out);
    auto rep = engine.memory_report();
    std::printf("events: %lld\npeak_live_scalars: %lld\n",
                engine.counters().total_emitted(), rep.peak);
    return 0;
}

int cmd_compare(const RunArgs& a, double tol) {
    LoadedCase c = load_case(a);
    std::vector<double> dense = dense_forward(c.net, c.input);

    Engine engine(c.net, {.mode = mode_from_name(a.mode), .threads = a.threads});
    for (int r = 0; r < c.input.shape.rows; ++r) engine.push_row(input_row(c.input, r));
    std::vector<double> stream = engine.finalize();

    double max_abs = 0.0, max_rel = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        double diff = std::abs(stream[i] - dense[i]);
        max_abs = std::max(max_abs, diff);
        if (dense[i] != 0.0) max_rel = std::max(max_rel, diff / std::abs(dense[i]));
        // pass rule: |stream - dense| <= tol * max(|dense|, 1)
        if (diff > tol * std::max(std::abs(dense[i]), 1.0)) ok = false;
    }
    std::printf("max_abs_diff: %.6e\nmax_rel_diff: %.6e\n", max_abs, max_rel);
    std::printf("%s (tol %.3e)\n", ok ? "WITHIN TOLERANCE" : "TOLERANCE EXCEEDED", tol);
    return ok ? 0 : 1;
}

struct SweepEntry {
    int h, w;
    long long peak, events;
    double wall_ms;
};

double fitted_slope(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_bench(const std::string& model, const std::string& weights, const std::string& sweep,
              uint64_t seed, const std::string& mode, int threads,
              const std::string& csv_path) {
    NetworkSpec base = load_model(model, weights);

    std::vector<std::pair<int, int>> sizes;
    std::size_t pos = 0;
    while (pos < sweep.size()) {
        std::size_t comma = sweep.find(',', pos);
        std::string tok = sweep.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::size_t x = tok.find('x');
        if (x == std::string::npos)
            throw Error(ErrorCode::FormatError, "sweep entries look like HxW: '" + tok + "'");
        sizes.emplace_back(std::stoi(tok.substr(0, x)), std::stoi(tok.substr(x + 1)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (sizes.empty()) throw Error(ErrorCode::FormatError, "empty sweep");

    std::vector<SweepEntry> entries;
    std::string csv = "H,W,peak_live_scalars,total_events,wall_ms\n";
    for (auto [h, w] : sizes) {
        NetworkSpec net = base;
        net.input_shape = Shape3{h, w, base.input_shape.channels};
        net.validated = false;
        net = validate(std::move(net)); // InfeasibleShape surfaces as exit 2

        SplitMix64 rng(seed ^ (static_cast<uint64_t>(h) << 32 | static_cast<uint64_t>(w)));
        Tensor3 in(h, w, net.input_shape.channels);
        for (double& v : in.values) v = rng.next_symmetric();

        Engine engine(net, {.mode = mode_from_name(mode), .threads = threads});
        auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < h; ++r) engine.push_row(input_row(in, r));
        engine.finalize();
        auto t1 = std::chrono::steady_clock::now();

        SweepEntry e{h, w, engine.memory_report().peak,
                     engine.counters().total_emitted(),
                     std::chrono::duration<double, std::milli>(t1 - t0).count()};
        entries.push_back(e);
        char line[160];
        std::snprintf(line, sizeof line, "%d,%d,%lld,%lld,%.3f\n", e.h, e.w, e.peak, e.events,
                      e.wall_ms);
        csv += line;
    }

    if (csv_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::FILE* f = std::fopen(csv_path.c_str(), "wb");
        if (f == nullptr) throw Error(ErrorCode::Io, "cannot open " + csv_path);
        std::fputs(csv.c_str(), f);
        std::fclose(f);
    }

    // log-log growth of peak vs the varied dimension, the other held fixed
    for (bool vary_w : {true, false}) {
        std::map<int, std::vector<std::pair<double, double>>> groups;
        for (const SweepEntry& e : entries)
            if (e.peak > 0)
                groups[vary_w ? e.h : e.w].emplace_back(
                    std::log(static_cast<double>(vary_w ? e.w : e.h)),
                    std::log(static_cast<double>(e.peak)));
        for (auto& [fixed, pts] : groups) {
            std::map<double, int> distinct;
            for (auto& p : pts) ++distinct[p.first];
            if (distinct.size() < 2) continue;
            std::printf("peak ~ %c^%.2f at fixed %c=%d\n", vary_w ? 'W' : 'H',
                        fitted_slope(pts), vary_w ? 'H' : 'W', fixed);
        }
    }
    return 0;
}

int cmd_gen(uint64_t seed, const RandomNetOptions& opts, const std::string& model_path,
            const std::string& weights_path, const std::string& input_path,
            const std::string& input_format, double zero_fraction) {
    NetworkSpec net = random_network(seed, opts);
    save_model(net, model_path, weights_path);
    std::printf("wrote %s and %s (input %dx%dx%d, %zu layers)\n", model_path.c_str(),
                weights_path.c_str(), net.input_shape.rows, net.input_shape.cols,
                net.input_shape.channels, net.layers.size());
    if (!input_path.empty()) {
        SplitMix64 rng(seed + 1);
        Tensor3 in(net.input_shape.rows, net.input_shape.cols, net.input_shape.channels);
        for (double& v : in.values)
            v = rng.next_unit() < zero_fraction ? 0.0 : rng.next_symmetric();
        write_input(input_path, input_format_from_name(input_format), in);
        std::printf("wrote %s\n", input_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conecast: streaming event-driven CNN inference"};
    app.require_subcommand(1);

    RunArgs ra;
    double tol = 1e-6;

    auto add_io_flags = [&](CLI::App* cmd, bool with_input) {
        cmd->add_option("--model", ra.model, "model manifest (JSON)")->required();
        cmd->add_option("--weights", ra.weights, "weight blob (binary32 LE)")->required();
        if (with_input) {
            cmd->add_option("--input", ra.input, "input sample")->required();
            cmd->add_option("--format", ra.format, "idx|csv|raw32 (default raw32)");
            cmd->add_flag("--transpose", ra.transpose, "stream columns instead of rows");
        }
        cmd->add_option("--mode", ra.mode, "per-row|per-event (default per-row)");
        cmd->add_option("--threads", ra.threads,
                        "threads for the per-row apply kernel (default 1)");
    };

    CLI::App* run = app.add_subcommand("run", "stream one input and write a trace");
    add_io_flags(run, true);
    run->add_option("--trace", ra.trace_path, "trace CSV output path");

    CLI::App* compare =
        app.add_subcommand("compare", "dense oracle vs streaming engine on one input");
    add_io_flags(compare, true);
    compare->add_option("--tol", tol, "pass threshold (default 1e-6)");

    CLI::App* bench = app.add_subcommand("bench", "memory/event sweep over input sizes");
    std::string sweep, bench_csv;
    uint64_t bench_seed = 1;
    add_io_flags(bench, false);
    bench->add_option("--sweep", sweep, "comma-separated HxW list, e.g. 128x8,128x16")
        ->required();
    bench->add_option("--seed", bench_seed, "input seed (default 1)");
    bench->add_option("--csv", bench_csv, "write sweep CSV here instead of stdout");

    CLI::App* gen = app.add_subcommand("gen", "generate a random zero-bias model");
    uint64_t gen_seed = 1;
    RandomNetOptions opts;
    std::string gen_model, gen_weights, gen_input, gen_input_format = "raw32",
                            gen_activation = "mixed";
    double gen_zero_fraction = 0.3;
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out-model", gen_model, "manifest output path")->required();
    gen->add_option("--out-weights", gen_weights, "blob output path")->required();
    gen->add_option("--out-input", gen_input, "also write a random input here");
    gen->add_option("--input-format", gen_input_format, "csv|raw32 (default raw32)");
    gen->add_option("--input-zero-fraction", gen_zero_fraction,
                    "fraction of exactly-zero input pixels (default 0.3)");
    gen->add_option("--depth", opts.depth, "conv layers (default 2)");
    gen->add_option("--min-size", opts.min_size, "min input extent (default 6)");
    gen->add_option("--max-size", opts.max_size, "max input extent (default 16)");
    gen->add_option("--min-channels", opts.min_channels, "min channels (default 1)");
    gen->add_option("--max-channels", opts.max_channels, "max channels (default 8)");
    gen->add_option("--activation", gen_activation,
                    "mixed|identity|relu|tanh (default mixed)");
    gen->add_option("--head", opts.head, "auto|ga|ga_dense|dense (default auto)");
    gen->add_option("--dense-out", opts.dense_out, "dense head width (default 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(ra);
        if (compare->parsed()) return cmd_compare(ra, tol);
        if (bench->parsed())
            return cmd_bench(ra.model, ra.weights, sweep, bench_seed, ra.mode, ra.threads,
                             bench_csv);
        if (gen->parsed()) {
            if (gen_activation != "mixed")
                opts.activation_pool = {activation_from_name(gen_activation)};
            return cmd_gen(gen_seed, opts, gen_model, gen_weights, gen_input,
                           gen_input_format, gen_zero_fraction);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "conecast: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "conecast: %s\n", e.what());
        return 2;
    }
    return 2;
}
