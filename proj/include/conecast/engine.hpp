#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "conecast/error.hpp"
#include "conecast/model.hpp"
#include "conecast/tensor.hpp"

namespace conecast {

// How an input segment's effects are driven through the layers.
//
// PerRow (default): for each layer in order, apply every pending contribution
// to that layer's open states, then emit one event per changed unit
// (delta = f(c_new) - f(c_old)).
//
// PerEvent: a LIFO work queue seeded one input component at a time,
// left-to-right, channel-ascending; each state update emits immediately.
// Final states agree between the two (the deltas telescope); intermediate
// event counts do not.
enum class PropagationMode { PerRow, PerEvent };

struct EngineOptions {
    PropagationMode mode = PropagationMode::PerRow;
    // Threads for the per-row apply kernel. 1 = serial reference path,
    // 0 = all hardware threads. Results are bitwise identical either way;
    // each target unit gathers its contributions in a fixed order.
    int threads = 1;
    // Deltas with |delta| <= this are not forwarded. The default 0 suppresses
    // only exact zeros; any positive value trades accuracy for fewer events
    // and breaks exact prefix consistency.
    double suppression_epsilon = 0.0;
};

struct LayerMemory {
    int layer = 0; // 1-based, matching event counter indexing
    long long live = 0;
    long long peak = 0;
};

// Live/peak counts of state scalars (accumulators c). Convention: one scalar
// per accumulator in an open (allocated, not yet final) row, plus allocated
// head accumulators. Samples are taken at push boundaries, after propagation
// and row retirement; peak is the max over those samples.
struct MemoryReport {
    std::vector<LayerMemory> layers;
    long long live = 0;
    long long peak = 0;
};

struct EventCounters {
    // emitted[n]: events produced by layer n (0 = input events). The terminal
    // layer's output deltas are counted here too, though nothing consumes them.
    std::vector<long long> emitted;
    // contributions[n]: weighted adds received by layer n's accumulators.
    std::vector<long long> contributions;

    long long total_emitted() const {
        long long s = 0;
        for (long long e : emitted) s += e;
        return s;
    }
};

namespace detail {
struct Plan;
struct StageState;
} // namespace detail

// Streaming, event-driven evaluator. Holds only the open cone of network
// state: conv rows are line-buffered (allocated on first contribution, freed
// once every input row they depend on has been pushed) and the head
// accumulates eventwise. After all segments are pushed, finalize() equals the
// dense reference within float-reordering tolerance.
//
// The network must be validated, zero-bias, and end in a dense or
// global_average head. An instance requires exclusive access per call;
// distinct engines over one shared NetworkSpec may run in parallel.
class Engine {
  public:
    explicit Engine(NetworkSpec net, EngineOptions opts = {});

    // Pushes one full row of H*W*C-shaped input (row length W*C) and
    // propagates it depth-first. Returns read_output().
    std::vector<double> push_row(std::span<const double> row);

    // 1D mode (requires input_shape.H == 1): pushes one element (C values);
    // the stream axis is W and state is retired column by column.
    std::vector<double> push_element(std::span<const double> values);

    // f(head accumulators); non-mutating, callable between any two pushes.
    std::vector<double> read_output() const;

    // Requires the whole input to have been pushed; closes any remaining
    // state and returns the final output. Further pushes error.
    std::vector<double> finalize();

    void reset();

    MemoryReport memory_report() const;
    const EventCounters& counters() const { return counters_; }
    int segments_pushed() const { return segments_pushed_; }
    int stream_length() const;
    const NetworkSpec& network() const { return net_; }

    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

  private:
    enum class Orientation { Unset, Rows, Elements };

    void ensure_orientation(Orientation o);
    void push_segment(std::span<const double> segment);
    void retire_rows();
    void sample_memory();

    NetworkSpec net_;
    EngineOptions opts_;
    bool debug_checks_ = false;

    Orientation orientation_ = Orientation::Unset;
    std::shared_ptr<const detail::Plan> row_plan_;
    std::shared_ptr<const detail::Plan> elem_plan_;
    const detail::Plan* plan_ = nullptr;
    std::vector<detail::StageState> state_;

    int segments_pushed_ = 0;
    bool terminal_ = false;
    EventCounters counters_;
    std::vector<long long> peak_per_layer_;
    long long peak_total_ = 0;
};

} // namespace conecast
