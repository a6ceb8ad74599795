#pragma once

#include <utility>
#include <vector>

#include "conecast/engine.hpp"
#include "conecast/tensor.hpp"

namespace conecast {

struct StepRecord {
    int step = 0; // 1-based push index
    std::vector<double> output;
    long long events = 0;       // cumulative, all layers
    long long live_scalars = 0; // at this push boundary
};

// Per-step accumulated outputs over one streamed presentation. Record a
// snapshot immediately after each push; CSV emission is the CLI's job.
struct RunTrace {
    std::vector<StepRecord> steps;
};

void record(RunTrace& trace, const Engine& engine);

// distance(t) = ||output_t - final||_2, divided by ||final||_2 when final is
// nonzero. Throws EmptyTrace on an empty trace.
std::vector<std::pair<int, double>> convergence_curve(const RunTrace& trace,
                                                      const std::vector<double>& final_output);

struct SparsityStats {
    double nonzero_input_fraction = 0.0;
    std::vector<long long> events_per_layer;        // emitted, index 0 = input
    std::vector<long long> contributions_per_layer; // weighted adds received
    double events_per_nonzero_input = 0.0;
};

SparsityStats sparsity_stats(const RunTrace& trace, const Tensor3& input,
                             const EventCounters& counters);

} // namespace conecast
