#include "heptapile/waves.hpp"

#include "heptapile/closed_form.hpp"
#include "heptapile/error.hpp"

namespace heptapile {

namespace {

WaveStep fire(const State& state, VertexId p, VertexId v) {
    State kicked = state;
    topple_in_place(kicked, p);
    topple_in_place(kicked, v);
    auto r = relax(kicked);
    r.odometer[p] += 1;
    r.odometer[v] += 1;
    return {std::move(r.state), std::move(r.odometer), true};
}

std::vector<VertexId> support(const Odometer& odometer) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < odometer.size(); ++v)
        if (odometer[v] > 0) out.push_back(v);
    return out;
}

} // namespace

WaveStep wave_step(const State& state, VertexId p, WaveOptions options) {
    const Ball& ball = state.ball();
    if (p >= ball.size()) throw Error(ErrorCode::InvalidArgument, "wave source outside the ball");
    for (auto g : state.grains()) {
        if (g < 0 || g >= kThreshold) throw Error(ErrorCode::Unstable, "waves act on stable nonnegative states only");
    }

    WaveStep unchanged{state, Odometer(state.ball_ptr()), false};
    if (state[p] != kMaxStableGrains) return unchanged;

    const auto nb = ball.neighbors(p);
    const VertexId* first = nullptr;
    const VertexId* last = nullptr;
    for (const VertexId& u : nb) {
        if (state[u] != kMaxStableGrains) continue;
        if (!first) first = &u;
        last = &u;
    }
    if (!first) return unchanged;

    auto step = fire(state, p, *first);
    if (options.check_neighbor_choice && last != first) {
        const auto other = fire(state, p, *last);
        if (!(other.state == step.state) || !(other.toppled == step.toppled))
            throw Error(ErrorCode::Invariant, "wave from " + std::to_string(p) + " depends on the neighbor choice (" +
                                                  std::to_string(*first) + " vs " + std::to_string(*last) + ")");
    }
    return step;
}

State wave(const State& state, VertexId p, WaveOptions options) { return wave_step(state, p, options).state; }

WaveRelaxation wave_relax(BallPtr ball, std::span<const VertexId> vertices) {
    const auto set = normalize_set(*ball, vertices);
    const Level s = set_level(*ball, set);
    VertexId source = set.front();
    for (VertexId v : set) {
        if (ball->level(v) == s) {
            source = v;
            break;
        }
    }

    WaveRelaxation out{max_stable(ball), Odometer(ball), 0, {}, 0};
    for (;;) {
        auto step = wave_step(out.state, source);
        if (!step.fired) break;
        out.state = std::move(step.state);
        out.odometer += step.toppled;
        out.fronts.push_back(support(step.toppled));
        ++out.wave_count;
    }

    out.state[source] += 1;
    if (out.state[source] >= kThreshold) {
        // Source is maximal but none of its neighbors is: one last toppling.
        topple_in_place(out.state, source);
        out.odometer[source] += 1;
        out.fronts.push_back({source});
        ++out.wave_count;
    }

    for (VertexId v : set)
        if (v != source) out.state[v] += 1;
    auto rest = relax(out.state);
    out.residual_topplings = rest.stats.topplings;
    out.state = std::move(rest.state);
    out.odometer += rest.odometer;
    return out;
}

WaveRelaxation wave_relax(BallPtr ball, VertexId p) {
    const VertexId single[] = {p};
    return wave_relax(std::move(ball), single);
}

} // namespace heptapile
