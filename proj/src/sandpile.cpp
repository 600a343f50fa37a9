#include "heptapile/sandpile.hpp"

#include <algorithm>
#include <numeric>

#include "checked.hpp"
#include "heptapile/error.hpp"

namespace heptapile {

using detail::checked_add;
using detail::checked_mul;

namespace {

void require_member(const Ball& ball, VertexId v) {
    if (v >= ball.size())
        throw Error(ErrorCode::InvalidArgument,
                    "vertex " + std::to_string(v) + " is outside a ball of " + std::to_string(ball.size()) + " vertices");
}

void require_same_ball(const Ball& a, const Ball& b) {
    if (!same_ball(a, b)) throw Error(ErrorCode::Mismatch, "operands live on different balls");
}

} // namespace

bool same_ball(const Ball& a, const Ball& b) { return &a == &b || a == b; }

State::State(BallPtr ball, std::int64_t fill) : ball_(std::move(ball)), grains_(ball_->size(), fill) {}

State::State(BallPtr ball, std::vector<std::int64_t> grains) : ball_(std::move(ball)), grains_(std::move(grains)) {
    if (grains_.size() != ball_->size())
        throw Error(ErrorCode::Mismatch, "grain vector length differs from the ball size");
}

bool operator==(const State& a, const State& b) {
    return a.grains_ == b.grains_ && same_ball(*a.ball_, *b.ball_);
}

Odometer::Odometer(BallPtr ball, std::uint64_t fill) : ball_(std::move(ball)), counts_(ball_->size(), fill) {}

Odometer::Odometer(BallPtr ball, std::vector<std::uint64_t> counts)
    : ball_(std::move(ball)), counts_(std::move(counts)) {
    if (counts_.size() != ball_->size())
        throw Error(ErrorCode::Mismatch, "odometer length differs from the ball size");
}

std::uint64_t Odometer::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts_) sum = checked_add(sum, c, "odometer total");
    return sum;
}

Odometer& Odometer::operator+=(const Odometer& other) {
    require_same_ball(*ball_, *other.ball_);
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] = checked_add(counts_[i], other.counts_[i], "odometer");
    return *this;
}

bool operator==(const Odometer& a, const Odometer& b) {
    return a.counts_ == b.counts_ && same_ball(*a.ball_, *b.ball_);
}

std::vector<GrainDelta> laplacian_delta(const Ball& ball, VertexId v) {
    require_member(ball, v);
    std::vector<GrainDelta> out;
    out.push_back({v, -kThreshold});
    for (VertexId u : ball.neighbors(v)) out.push_back({u, 1});
    return out;
}

void topple_in_place(State& state, VertexId v, std::int64_t times) {
    const Ball& ball = state.ball();
    require_member(ball, v);
    state[v] -= kThreshold * times;
    for (VertexId u : ball.neighbors(v)) state[u] += times;
}

State topple(State state, VertexId v) {
    topple_in_place(state, v);
    return state;
}

bool is_legal(const State& state, VertexId v) {
    require_member(state.ball(), v);
    return state[v] >= kThreshold;
}

bool is_stable(const State& state) {
    return std::ranges::none_of(state.grains(), [](std::int64_t g) { return g >= kThreshold; });
}

Relaxation relax(const State& input, RelaxOptions options) {
    const Ball& ball = input.ball();
    const auto n = ball.size();
    for (VertexId v = 0; v < n; ++v) {
        if (input[v] < 0)
            throw Error(ErrorCode::InvalidArgument, "relax needs a nonnegative state; vertex " + std::to_string(v) +
                                                        " holds " + std::to_string(input[v]));
    }

    std::uint64_t budget = options.max_dequeues;
    if (budget == 0) {
        const auto heft = checked_add<std::uint64_t>(n, static_cast<std::uint64_t>(mass(input)), "relax budget");
        budget = checked_mul<std::uint64_t>(checked_mul<std::uint64_t>(heft, 64, "relax budget"),
                                            ball.radius() + 2, "relax budget");
    }

    Relaxation out{input, Odometer(input.ball_ptr()), {}};
    auto grains = out.state.grains();

    // Ring buffer: each vertex is queued at most once at a time.
    std::vector<VertexId> queue(n);
    std::vector<char> queued(n, 0);
    std::uint64_t head = 0;
    std::uint64_t pending = 0;
    auto push = [&](VertexId v) {
        queue[(head + pending) % n] = v;
        queued[v] = 1;
        ++pending;
    };
    for (VertexId v = 0; v < n; ++v)
        if (grains[v] >= kThreshold) push(v);

    const bool batch = options.method == RelaxMethod::MultiTopple;
    while (pending > 0) {
        if (out.stats.dequeues == budget)
            throw Error(ErrorCode::Budget, "relaxation exceeded " + std::to_string(budget) + " dequeues");
        const VertexId v = queue[head];
        head = (head + 1) % n;
        --pending;
        queued[v] = 0;
        ++out.stats.dequeues;

        const std::int64_t times = batch ? grains[v] / kThreshold : 1;
        grains[v] -= kThreshold * times;
        out.odometer[v] += static_cast<std::uint64_t>(times);
        out.stats.topplings += static_cast<std::uint64_t>(times);
        for (VertexId u : ball.neighbors(v)) {
            grains[u] += times;
            if (grains[u] >= kThreshold && !queued[u]) push(u);
        }
        if (grains[v] >= kThreshold) push(v);
    }
    return out;
}

std::int64_t mass(const State& state) {
    std::int64_t total = 0;
    for (auto g : state.grains()) total = checked_add(total, g, "mass");
    return total;
}

State apply_odometer(const State& state, const Odometer& odometer) {
    require_same_ball(state.ball(), odometer.ball());
    const Ball& ball = state.ball();
    State out = state;
    for (VertexId v = 0; v < ball.size(); ++v) {
        const auto times = static_cast<std::int64_t>(odometer[v]);
        if (times == 0) continue;
        out[v] = detail::checked_sub(out[v], checked_mul(kThreshold, times, "apply_odometer"), "apply_odometer");
        for (VertexId u : ball.neighbors(v)) out[u] = checked_add(out[u], times, "apply_odometer");
    }
    return out;
}

std::uint64_t boundary_outflow(const Odometer& odometer) {
    const Ball& ball = odometer.ball();
    std::uint64_t total = 0;
    for (VertexId v = 0; v < ball.size(); ++v) {
        const auto deficit = static_cast<std::uint64_t>(ball.boundary_deficit(v));
        total = checked_add(total, checked_mul(odometer[v], deficit, "outflow"), "outflow");
    }
    return total;
}

State max_stable(BallPtr ball) { return State(std::move(ball), kMaxStableGrains); }

std::vector<VertexId> normalize_set(const Ball& ball, std::span<const VertexId> vertices) {
    std::vector<VertexId> out(vertices.begin(), vertices.end());
    for (VertexId v : out) require_member(ball, v);
    std::ranges::sort(out);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

State perturb(State state, std::span<const VertexId> vertices) {
    for (VertexId v : normalize_set(state.ball(), vertices)) state[v] += 1;
    return state;
}

} // namespace heptapile
