#include "conecast/metrics.hpp"

#include <cmath>

namespace conecast {

void record(RunTrace& trace, const Engine& engine) {
    StepRecord rec;
    rec.step = static_cast<int>(trace.steps.size()) + 1;
    rec.output = engine.read_output();
    rec.events = engine.counters().total_emitted();
    rec.live_scalars = engine.memory_report().live;
    trace.steps.push_back(std::move(rec));
}

std::vector<std::pair<int, double>> convergence_curve(const RunTrace& trace,
                                                      const std::vector<double>& final_output) {
    if (trace.steps.empty())
        throw Error(ErrorCode::EmptyTrace, "convergence curve needs at least one step");

    double final_norm = 0.0;
    for (double v : final_output) final_norm += v * v;
    final_norm = std::sqrt(final_norm);

    std::vector<std::pair<int, double>> curve;
    curve.reserve(trace.steps.size());
    for (const StepRecord& s : trace.steps) {
        double d = 0.0;
        for (std::size_t i = 0; i < final_output.size(); ++i) {
            double out_i = i < s.output.size() ? s.output[i] : 0.0;
            double diff = out_i - final_output[i];
            d += diff * diff;
        }
        d = std::sqrt(d);
        if (final_norm > 0.0) d /= final_norm;
        curve.emplace_back(s.step, d);
    }
    return curve;
}

SparsityStats sparsity_stats(const RunTrace& trace, const Tensor3& input,
                             const EventCounters& counters) {
    SparsityStats st;
    std::size_t nonzero = 0;
    for (double v : input.values)
        if (v != 0.0) ++nonzero;
    st.nonzero_input_fraction =
        input.values.empty() ? 0.0 : static_cast<double>(nonzero) / input.values.size();
    st.events_per_layer = counters.emitted;
    st.contributions_per_layer = counters.contributions;
    long long total = counters.total_emitted();
    st.events_per_nonzero_input =
        nonzero == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(nonzero);
    (void)trace;
    return st;
}

} // namespace conecast
