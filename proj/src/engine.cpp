#include "conecast/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string_view>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conecast {
namespace detail {

struct SparseVal {
    int col;
    int ch;
    double delta;
};

struct RowEvents {
    int row;
    std::vector<SparseVal> vals; // ascending (col, ch)
};

// Events produced by one layer during one push; rows ascending.
using EventBatch = std::vector<RowEvents>;

enum class StageKind { Conv, GlobalAvg, Dense };

struct StagePlan {
    StageKind kind = StageKind::Conv;
    Activation act = Activation::Identity;

    // conv geometry, stream axis = rows
    int in_h = 0, in_w = 0, in_c = 0;
    int out_h = 0, out_w = 0, out_c = 0;
    int kh = 1, kw = 1, sh = 1, sw = 1;
    int pad_top = 0, pad_left = 0;
    int max_open = 0; // rows simultaneously reachable-and-unfinished (composed bound)

    // conv: [oc][ic][dy][dx]; dense: [out][in]
    std::vector<double> weights;

    double ga_scale = 0.0;
    int dense_in = 0, dense_out = 0;
    Shape3 dense_in_shape; // spatial shape events index into

    double conv_w(int oc, int ic, int dy, int dx) const {
        return weights[((static_cast<std::size_t>(oc) * in_c + ic) * kh + dy) * kw + dx];
    }
};

struct Plan {
    int stream_len = 0;  // pushes expected
    int seg_scalars = 0; // values per push
    int in_w = 0, in_c = 0;
    std::vector<StagePlan> stages;
    int output_len = 0;
};

struct StageState {
    // conv line buffer: open rows only, keyed by absolute row coordinate
    std::map<int, std::vector<double>> open;
    int final_in = 0;
    int final_out = 0;
    // GA/dense accumulators
    std::vector<double> acc;
    bool acc_allocated = false;
};

struct Ev {
    int layer; // producer: 0 = input
    int row, col, ch;
    double delta;
};

static int floor_div(int a, int b) {
    int q = a / b, r = a % b;
    return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}
static int ceil_div(int a, int b) { return -floor_div(-a, b); }

[[noreturn]] static void invariant_failed(const char* msg) {
    std::fprintf(stderr, "conecast: engine invariant violated: %s\n", msg);
    std::abort();
}

// Rows of this stage that are fully determined once `final_in` rows of its
// input are final.
static int final_rows(const StagePlan& sp, int final_in) {
    if (final_in >= sp.in_h) return sp.out_h;
    int last = floor_div(final_in - sp.kh + sp.pad_top, sp.sh) + 1;
    return std::clamp(last, 0, sp.out_h);
}

static Plan build_plan(const NetworkSpec& net) {
    Plan p;
    p.stream_len = net.input_shape.rows;
    p.in_w = net.input_shape.cols;
    p.in_c = net.input_shape.channels;
    p.seg_scalars = p.in_w * p.in_c;
    p.output_len = static_cast<int>(net.output_count());

    Shape3 cur = net.input_shape;
    // composed first/last raw-input-row dependency of each row, per conv stage
    std::vector<int> dep_a, dep_b;
    for (int r = 0; r < cur.rows; ++r) {
        dep_a.push_back(r);
        dep_b.push_back(r);
    }

    for (const LayerSpec& l : net.layers) {
        StagePlan sp;
        sp.act = l.activation;
        switch (l.kind) {
            case LayerKind::Conv: {
                sp.kind = StageKind::Conv;
                sp.in_h = cur.rows;
                sp.in_w = cur.cols;
                sp.in_c = cur.channels;
                sp.kh = l.kernel_h;
                sp.kw = l.kernel_w;
                sp.sh = l.stride_h;
                sp.sw = l.stride_w;
                sp.pad_top = conv_pad_begin(cur.rows, l.kernel_h, l.stride_h, l.padding);
                sp.pad_left = conv_pad_begin(cur.cols, l.kernel_w, l.stride_w, l.padding);
                sp.out_h = conv_out_extent(cur.rows, l.kernel_h, l.stride_h, l.padding);
                sp.out_w = conv_out_extent(cur.cols, l.kernel_w, l.stride_w, l.padding);
                sp.out_c = l.out_channels;
                sp.weights.assign(l.weights.begin(), l.weights.end());

                std::vector<int> a(sp.out_h), b(sp.out_h);
                for (int r = 0; r < sp.out_h; ++r) {
                    int lo = std::max(0, r * sp.sh - sp.pad_top);
                    int hi = std::min(sp.in_h - 1, r * sp.sh - sp.pad_top + sp.kh - 1);
                    a[r] = dep_a[lo];
                    b[r] = dep_b[hi];
                }
                // max over t of rows with a(r) <= t <= b(r); a and b are nondecreasing
                int best = 0;
                for (int t = 0; t < net.input_shape.rows; ++t) {
                    int reachable =
                        static_cast<int>(std::upper_bound(a.begin(), a.end(), t) - a.begin());
                    int finished =
                        static_cast<int>(std::lower_bound(b.begin(), b.end(), t) - b.begin());
                    best = std::max(best, reachable - finished);
                }
                sp.max_open = best;
                dep_a = std::move(a);
                dep_b = std::move(b);
                cur = Shape3{sp.out_h, sp.out_w, sp.out_c};
                break;
            }
            case LayerKind::GlobalAverage: {
                sp.kind = StageKind::GlobalAvg;
                sp.in_h = cur.rows;
                sp.in_w = cur.cols;
                sp.in_c = cur.channels;
                sp.out_c = cur.channels;
                sp.ga_scale = 1.0 / (static_cast<double>(cur.rows) * cur.cols);
                cur = Shape3{1, 1, cur.channels};
                break;
            }
            case LayerKind::Dense: {
                sp.kind = StageKind::Dense;
                sp.dense_in = l.in_channels;
                sp.dense_out = l.out_channels;
                sp.dense_in_shape = cur;
                sp.weights.assign(l.weights.begin(), l.weights.end());
                cur = Shape3{1, 1, l.out_channels};
                break;
            }
        }
        p.stages.push_back(std::move(sp));
    }
    return p;
}

struct SrcRef {
    int dy;
    const std::vector<SparseVal>* vals;
};

// Per-row coalesced apply for one conv stage: each target unit gathers its
// pending contributions in a fixed (dy, col, ch) order, so the result is
// independent of the thread count.
struct ConvApply {
    const StagePlan& sp;
    StageState& st;
    int threads;
    bool debug;
    double eps;

    long long contributions = 0;
    long long emitted = 0;

    EventBatch run(const EventBatch& in) {
        EventBatch out;
        if (in.empty()) return out;

        // affected target rows, ascending
        std::vector<int> rows;
        for (const RowEvents& re : in) {
            int lo = std::max(0, ceil_div(re.row + sp.pad_top - sp.kh + 1, sp.sh));
            int hi = std::min(sp.out_h - 1, floor_div(re.row + sp.pad_top, sp.sh));
            int start = rows.empty() ? lo : std::max(lo, rows.back() + 1);
            for (int r = start; r <= hi; ++r) rows.push_back(r);
        }

        std::vector<int> cols;
        std::vector<double> emit;
        for (int R : rows) {
            if (debug && R < st.final_out) invariant_failed("contribution to a final row");

            int win_lo = R * sp.sh - sp.pad_top;
            std::vector<SrcRef> srcs;
            for (const RowEvents& re : in)
                if (re.row >= win_lo && re.row < win_lo + sp.kh)
                    srcs.push_back({re.row - win_lo, &re.vals});
            if (srcs.empty()) continue;

            gather_cols(srcs, cols);
            if (cols.empty()) continue;

            auto [it, inserted] = st.open.try_emplace(R);
            if (inserted) {
                it->second.assign(static_cast<std::size_t>(sp.out_w) * sp.out_c, 0.0);
                if (debug && static_cast<int>(st.open.size()) > sp.max_open)
                    invariant_failed("open rows exceed the derived bound");
            }
            std::vector<double>& states = it->second;

            int n_units = static_cast<int>(cols.size()) * sp.out_c;
            emit.assign(n_units, 0.0);
            long long matched = 0;

            auto unit = [&](int u) -> long long {
                int col = cols[u / sp.out_c];
                int oc = u % sp.out_c;
                int x_lo = col * sp.sw - sp.pad_left;
                int x_hi = x_lo + sp.kw - 1;
                double sum = 0.0;
                long long m = 0;
                for (const SrcRef& s : srcs) {
                    const auto& vals = *s.vals;
                    auto ev = std::lower_bound(
                        vals.begin(), vals.end(), x_lo,
                        [](const SparseVal& v, int x) { return v.col < x; });
                    for (; ev != vals.end() && ev->col <= x_hi; ++ev) {
                        sum += sp.conv_w(oc, ev->ch, s.dy, ev->col - x_lo) * ev->delta;
                        ++m;
                    }
                }
                std::size_t si = static_cast<std::size_t>(col) * sp.out_c + oc;
                double old_h = apply_activation(sp.act, states[si]);
                states[si] += sum;
                emit[u] = apply_activation(sp.act, states[si]) - old_h;
                return m;
            };

#ifdef _OPENMP
            int nt = threads <= 0 ? omp_get_max_threads() : threads;
            if (nt > 1) {
#pragma omp parallel for schedule(static) num_threads(nt) reduction(+ : matched)
                for (int u = 0; u < n_units; ++u) matched += unit(u);
            } else
#endif
            {
                for (int u = 0; u < n_units; ++u) matched += unit(u);
            }
            contributions += matched;

            RowEvents re_out{R, {}};
            for (int u = 0; u < n_units; ++u)
                if (std::abs(emit[u]) > eps)
                    re_out.vals.push_back({cols[u / sp.out_c], u % sp.out_c, emit[u]});
            emitted += static_cast<long long>(re_out.vals.size());
            if (!re_out.vals.empty()) out.push_back(std::move(re_out));
        }
        return out;
    }

  private:
    // target columns reachable from the pending events of all source rows
    void gather_cols(const std::vector<SrcRef>& srcs, std::vector<int>& cols) {
        std::vector<std::pair<int, int>> ivals;
        for (const SrcRef& s : srcs) {
            for (const SparseVal& v : *s.vals) {
                int lo = std::max(0, ceil_div(v.col + sp.pad_left - sp.kw + 1, sp.sw));
                int hi = std::min(sp.out_w - 1, floor_div(v.col + sp.pad_left, sp.sw));
                if (lo > hi) continue;
                if (!ivals.empty() && ivals.back().first == lo)
                    ivals.back().second = std::max(ivals.back().second, hi);
                else
                    ivals.emplace_back(lo, hi);
            }
        }
        std::sort(ivals.begin(), ivals.end());
        cols.clear();
        int next = 0;
        for (auto& [lo, hi] : ivals) {
            for (int c = std::max(lo, next); c <= hi; ++c) cols.push_back(c);
            next = std::max(next, hi + 1);
        }
    }
};

} // namespace detail

using namespace detail;

Engine::Engine(NetworkSpec net, EngineOptions opts)
    : net_(validate(std::move(net))), opts_(opts) {
    if (net_.has_nonzero_bias())
        throw Error(ErrorCode::NonzeroBias,
                    "streaming requires all-zero biases (lazy state assumes f(0)=0 start)");
    if (net_.layers.back().kind == LayerKind::Conv)
        throw Error(ErrorCode::UnsupportedLayer,
                    "streaming requires a dense or global_average head");

    const char* log = std::getenv("CONECAST_LOG");
    debug_checks_ = log != nullptr && std::string_view(log) == "debug";

    counters_.emitted.assign(net_.layers.size() + 1, 0);
    counters_.contributions.assign(net_.layers.size() + 1, 0);
    peak_per_layer_.assign(net_.layers.size(), 0);
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

void Engine::ensure_orientation(Orientation o) {
    if (orientation_ == o) return;
    if (o == Orientation::Rows) {
        if (!row_plan_) row_plan_ = std::make_shared<const Plan>(build_plan(net_));
        plan_ = row_plan_.get();
    } else {
        if (!elem_plan_)
            elem_plan_ = std::make_shared<const Plan>(build_plan(transpose_network(net_)));
        plan_ = elem_plan_.get();
    }
    state_.assign(plan_->stages.size(), StageState{});
    orientation_ = o;
}

int Engine::stream_length() const {
    return plan_ != nullptr ? plan_->stream_len : net_.input_shape.rows;
}

std::vector<double> Engine::push_row(std::span<const double> row) {
    if (orientation_ == Orientation::Elements)
        throw Error(ErrorCode::TooManyRows, "engine is streaming elements");
    ensure_orientation(Orientation::Rows);
    if (segments_pushed_ >= plan_->stream_len)
        throw Error(ErrorCode::TooManyRows,
                    "all " + std::to_string(plan_->stream_len) + " rows already pushed");
    if (static_cast<int>(row.size()) != plan_->seg_scalars)
        throw Error(ErrorCode::LengthMismatch,
                    "row has " + std::to_string(row.size()) + " values, expected " +
                        std::to_string(plan_->seg_scalars));
    push_segment(row);
    return read_output();
}

std::vector<double> Engine::push_element(std::span<const double> values) {
    if (net_.input_shape.rows != 1)
        throw Error(ErrorCode::NotOneDimensional,
                    "push_element requires input_shape H == 1");
    if (orientation_ == Orientation::Rows)
        throw Error(ErrorCode::NotOneDimensional, "engine is already streaming rows");
    ensure_orientation(Orientation::Elements);
    if (segments_pushed_ >= plan_->stream_len)
        throw Error(ErrorCode::TooManyElements,
                    "all " + std::to_string(plan_->stream_len) + " elements already pushed");
    if (static_cast<int>(values.size()) != plan_->seg_scalars)
        throw Error(ErrorCode::LengthMismatch,
                    "element has " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(plan_->seg_scalars));
    push_segment(values);
    return read_output();
}

void Engine::push_segment(std::span<const double> segment) {
    for (double v : segment)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFiniteInput, "input contains NaN or infinity");

    int t = segments_pushed_;
    RowEvents seed{t, {}};
    for (int col = 0; col < plan_->in_w; ++col)
        for (int ch = 0; ch < plan_->in_c; ++ch) {
            double v = segment[static_cast<std::size_t>(col) * plan_->in_c + ch];
            if (v != 0.0) seed.vals.push_back({col, ch, v});
        }
    counters_.emitted[0] += static_cast<long long>(seed.vals.size());

    const auto& stages = plan_->stages;
    int last = static_cast<int>(stages.size()) - 1;

    if (opts_.mode == PropagationMode::PerRow) {
        EventBatch batch;
        if (!seed.vals.empty()) batch.push_back(std::move(seed));
        for (int s = 0; s <= last && !batch.empty(); ++s) {
            const StagePlan& sp = stages[s];
            StageState& st = state_[s];
            EventBatch next;
            switch (sp.kind) {
                case StageKind::Conv: {
                    ConvApply apply{sp, st, opts_.threads, debug_checks_, opts_.suppression_epsilon};
                    next = apply.run(batch);
                    counters_.contributions[s + 1] += apply.contributions;
                    counters_.emitted[s + 1] += apply.emitted;
                    break;
                }
                case StageKind::GlobalAvg: {
                    if (!st.acc_allocated) {
                        st.acc.assign(sp.out_c, 0.0);
                        st.acc_allocated = true;
                    }
                    std::vector<double> old = st.acc;
                    for (const RowEvents& re : batch)
                        for (const SparseVal& v : re.vals) {
                            st.acc[v.ch] += v.delta * sp.ga_scale;
                            ++counters_.contributions[s + 1];
                        }
                    RowEvents out{0, {}};
                    for (int ch = 0; ch < sp.out_c; ++ch) {
                        double d = st.acc[ch] - old[ch];
                        if (std::abs(d) > opts_.suppression_epsilon)
                            out.vals.push_back({0, ch, d});
                    }
                    counters_.emitted[s + 1] += static_cast<long long>(out.vals.size());
                    if (!out.vals.empty()) next.push_back(std::move(out));
                    break;
                }
                case StageKind::Dense: {
                    if (!st.acc_allocated) {
                        st.acc.assign(sp.dense_out, 0.0);
                        st.acc_allocated = true;
                    }
                    std::vector<double> old = st.acc;
                    const Shape3& ish = sp.dense_in_shape;
                    for (const RowEvents& re : batch)
                        for (const SparseVal& v : re.vals) {
                            std::size_t flat =
                                (static_cast<std::size_t>(re.row) * ish.cols + v.col) *
                                    ish.channels + v.ch;
                            for (int o = 0; o < sp.dense_out; ++o) {
                                st.acc[o] +=
                                    sp.weights[static_cast<std::size_t>(o) * sp.dense_in + flat] *
                                    v.delta;
                                ++counters_.contributions[s + 1];
                            }
                        }
                    RowEvents out{0, {}};
                    for (int o = 0; o < sp.dense_out; ++o) {
                        double d = apply_activation(sp.act, st.acc[o]) -
                                   apply_activation(sp.act, old[o]);
                        if (std::abs(d) > opts_.suppression_epsilon)
                            out.vals.push_back({0, o, d});
                    }
                    counters_.emitted[s + 1] += static_cast<long long>(out.vals.size());
                    if (!out.vals.empty()) next.push_back(std::move(out));
                    break;
                }
            }
            batch = std::move(next);
        }
    } else {
        // per-event: one input component at a time, LIFO depth-first
        std::vector<Ev> stack;
        for (const SparseVal& v : seed.vals) {
            stack.push_back({0, t, v.col, v.ch, v.delta});
            while (!stack.empty()) {
                Ev ev = stack.back();
                stack.pop_back();
                int s = ev.layer;
                const StagePlan& sp = stages[s];
                StageState& st = state_[s];
                bool terminal = s == last;
                switch (sp.kind) {
                    case StageKind::Conv: {
                        int rlo = std::max(0, ceil_div(ev.row + sp.pad_top - sp.kh + 1, sp.sh));
                        int rhi = std::min(sp.out_h - 1, floor_div(ev.row + sp.pad_top, sp.sh));
                        int clo = std::max(0, ceil_div(ev.col + sp.pad_left - sp.kw + 1, sp.sw));
                        int chi = std::min(sp.out_w - 1, floor_div(ev.col + sp.pad_left, sp.sw));
                        for (int R = rlo; R <= rhi; ++R) {
                            if (debug_checks_ && R < st.final_out)
                                invariant_failed("contribution to a final row");
                            auto [it, inserted] = st.open.try_emplace(R);
                            if (inserted) {
                                it->second.assign(
                                    static_cast<std::size_t>(sp.out_w) * sp.out_c, 0.0);
                                if (debug_checks_ &&
                                    static_cast<int>(st.open.size()) > sp.max_open)
                                    invariant_failed("open rows exceed the derived bound");
                            }
                            std::vector<double>& states = it->second;
                            int dy = ev.row - (R * sp.sh - sp.pad_top);
                            for (int col = clo; col <= chi; ++col) {
                                int dx = ev.col - (col * sp.sw - sp.pad_left);
                                for (int oc = 0; oc < sp.out_c; ++oc) {
                                    std::size_t si =
                                        static_cast<std::size_t>(col) * sp.out_c + oc;
                                    double old_h = apply_activation(sp.act, states[si]);
                                    states[si] += sp.conv_w(oc, ev.ch, dy, dx) * ev.delta;
                                    ++counters_.contributions[s + 1];
                                    double d = apply_activation(sp.act, states[si]) - old_h;
                                    if (std::abs(d) > opts_.suppression_epsilon) {
                                        ++counters_.emitted[s + 1];
                                        if (!terminal) stack.push_back({s + 1, R, col, oc, d});
                                    }
                                }
                            }
                        }
                        break;
                    }
                    case StageKind::GlobalAvg: {
                        if (!st.acc_allocated) {
                            st.acc.assign(sp.out_c, 0.0);
                            st.acc_allocated = true;
                        }
                        double d = ev.delta * sp.ga_scale;
                        st.acc[ev.ch] += d;
                        ++counters_.contributions[s + 1];
                        if (std::abs(d) > opts_.suppression_epsilon) {
                            ++counters_.emitted[s + 1];
                            if (!terminal) stack.push_back({s + 1, 0, 0, ev.ch, d});
                        }
                        break;
                    }
                    case StageKind::Dense: {
                        if (!st.acc_allocated) {
                            st.acc.assign(sp.dense_out, 0.0);
                            st.acc_allocated = true;
                        }
                        const Shape3& ish = sp.dense_in_shape;
                        std::size_t flat =
                            (static_cast<std::size_t>(ev.row) * ish.cols + ev.col) *
                                ish.channels + ev.ch;
                        for (int o = 0; o < sp.dense_out; ++o) {
                            double old_h = apply_activation(sp.act, st.acc[o]);
                            st.acc[o] +=
                                sp.weights[static_cast<std::size_t>(o) * sp.dense_in + flat] *
                                ev.delta;
                            ++counters_.contributions[s + 1];
                            double d = apply_activation(sp.act, st.acc[o]) - old_h;
                            if (std::abs(d) > opts_.suppression_epsilon) {
                                ++counters_.emitted[s + 1];
                                if (!terminal) stack.push_back({s + 1, 0, 0, o, d});
                            }
                        }
                        break;
                    }
                }
            }
        }
    }

    ++segments_pushed_;
    retire_rows();
    sample_memory();
}

void Engine::retire_rows() {
    int fin = segments_pushed_;
    for (std::size_t s = 0; s < plan_->stages.size(); ++s) {
        const StagePlan& sp = plan_->stages[s];
        if (sp.kind != StageKind::Conv) break; // head accumulators live until reset
        StageState& st = state_[s];
        st.final_in = fin;
        int new_final = final_rows(sp, fin);
        while (!st.open.empty() && st.open.begin()->first < new_final)
            st.open.erase(st.open.begin());
        st.final_out = new_final;
        if (debug_checks_ && static_cast<int>(st.open.size()) > sp.max_open)
            invariant_failed("open rows exceed the derived bound after retirement");
        fin = new_final;
    }
}

void Engine::sample_memory() {
    long long total = 0;
    for (std::size_t s = 0; s < plan_->stages.size(); ++s) {
        const StagePlan& sp = plan_->stages[s];
        const StageState& st = state_[s];
        long long live = 0;
        if (sp.kind == StageKind::Conv)
            live = static_cast<long long>(st.open.size()) * sp.out_w * sp.out_c;
        else if (st.acc_allocated)
            live = static_cast<long long>(st.acc.size());
        peak_per_layer_[s] = std::max(peak_per_layer_[s], live);
        total += live;
    }
    peak_total_ = std::max(peak_total_, total);
}

MemoryReport Engine::memory_report() const {
    MemoryReport rep;
    rep.layers.resize(net_.layers.size());
    for (std::size_t s = 0; s < net_.layers.size(); ++s) {
        rep.layers[s].layer = static_cast<int>(s) + 1;
        rep.layers[s].peak = peak_per_layer_[s];
        long long live = 0;
        if (plan_ != nullptr) {
            const StagePlan& sp = plan_->stages[s];
            const StageState& st = state_[s];
            if (sp.kind == StageKind::Conv)
                live = static_cast<long long>(st.open.size()) * sp.out_w * sp.out_c;
            else if (st.acc_allocated)
                live = static_cast<long long>(st.acc.size());
        }
        rep.layers[s].live = live;
        rep.live += live;
    }
    rep.peak = peak_total_;
    return rep;
}

std::vector<double> Engine::read_output() const {
    std::vector<double> out(static_cast<std::size_t>(net_.output_count()), 0.0);
    if (plan_ == nullptr) return out;
    const StagePlan& sp = plan_->stages.back();
    const StageState& st = state_.back();
    if (!st.acc_allocated) return out;
    for (std::size_t i = 0; i < st.acc.size(); ++i)
        out[i] = sp.kind == StageKind::GlobalAvg ? st.acc[i]
                                                 : apply_activation(sp.act, st.acc[i]);
    return out;
}

std::vector<double> Engine::finalize() {
    int expected = stream_length();
    if (segments_pushed_ < expected)
        throw Error(ErrorCode::IncompleteInput,
                    std::to_string(segments_pushed_) + " of " + std::to_string(expected) +
                        " segments pushed");
    if (debug_checks_ && plan_ != nullptr)
        for (std::size_t s = 0; s < plan_->stages.size(); ++s)
            if (plan_->stages[s].kind == StageKind::Conv && !state_[s].open.empty())
                invariant_failed("open rows remain after the full input");
    return read_output();
}

void Engine::reset() {
    orientation_ = Orientation::Unset;
    plan_ = nullptr;
    state_.clear();
    segments_pushed_ = 0;
    std::fill(counters_.emitted.begin(), counters_.emitted.end(), 0);
    std::fill(counters_.contributions.begin(), counters_.contributions.end(), 0);
    std::fill(peak_per_layer_.begin(), peak_per_layer_.end(), 0);
    peak_total_ = 0;
}

} // namespace conecast
