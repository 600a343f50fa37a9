#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heptapile/ball.hpp"

namespace heptapile {

inline constexpr std::int64_t kThreshold = kDegree;
inline constexpr std::int64_t kMaxStableGrains = kThreshold - 1;

/// Signed grain count per vertex. Ordinary sandpile states are nonnegative;
/// negative entries are allowed for bookkeeping functions such as the
/// universal state with -1 at the origin.
class State {
public:
    explicit State(BallPtr ball, std::int64_t fill = 0);
    State(BallPtr ball, std::vector<std::int64_t> grains);

    const Ball& ball() const noexcept { return *ball_; }
    const BallPtr& ball_ptr() const noexcept { return ball_; }
    std::uint64_t size() const noexcept { return grains_.size(); }

    std::int64_t operator[](VertexId v) const { return grains_[v]; }
    std::int64_t& operator[](VertexId v) { return grains_[v]; }
    std::span<const std::int64_t> grains() const noexcept { return grains_; }
    std::span<std::int64_t> grains() noexcept { return grains_; }

    friend bool operator==(const State& a, const State& b);

private:
    BallPtr ball_;
    std::vector<std::int64_t> grains_;
};

/// Number of topplings per vertex.
class Odometer {
public:
    explicit Odometer(BallPtr ball, std::uint64_t fill = 0);
    Odometer(BallPtr ball, std::vector<std::uint64_t> counts);

    const Ball& ball() const noexcept { return *ball_; }
    const BallPtr& ball_ptr() const noexcept { return ball_; }
    std::uint64_t size() const noexcept { return counts_.size(); }

    std::uint64_t operator[](VertexId v) const { return counts_[v]; }
    std::uint64_t& operator[](VertexId v) { return counts_[v]; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }

    std::uint64_t total() const;

    Odometer& operator+=(const Odometer& other);
    friend bool operator==(const Odometer& a, const Odometer& b);

private:
    BallPtr ball_;
    std::vector<std::uint64_t> counts_;
};

bool same_ball(const Ball& a, const Ball& b);

struct GrainDelta {
    VertexId vertex;
    std::int64_t delta;

    friend bool operator==(const GrainDelta&, const GrainDelta&) = default;
};

/// The increment of one toppling at v: -7 at v, +1 on each stored neighbor.
/// Grains sent to neighbors outside the ball are lost.
std::vector<GrainDelta> laplacian_delta(const Ball& ball, VertexId v);

/// Topples v `times` times in place; legality is not checked.
void topple_in_place(State& state, VertexId v, std::int64_t times = 1);
State topple(State state, VertexId v);

bool is_legal(const State& state, VertexId v);
bool is_stable(const State& state);

enum class RelaxMethod {
    Fifo,        // one toppling per dequeue
    MultiTopple, // floor(grains / 7) topplings per dequeue
};

struct RelaxOptions {
    RelaxMethod method = RelaxMethod::Fifo;
    // 0 picks a bound from the ball size and the input mass. Hitting it means
    // the relaxation loop is broken, not that the input is hard.
    std::uint64_t max_dequeues = 0;
};

struct RelaxStats {
    std::uint64_t topplings = 0;
    std::uint64_t dequeues = 0;
};

struct Relaxation {
    State state;
    Odometer odometer;
    RelaxStats stats;
};

/// Stabilizes a nonnegative state. A negative entry raises InvalidArgument;
/// an exhausted dequeue budget raises Budget.
Relaxation relax(const State& state, RelaxOptions options = {});

/// Exact sum of grains; throws ErrorCode::Overflow if it leaves int64.
std::int64_t mass(const State& state);

/// state + Laplacian(odometer), computed with overflow checks.
State apply_odometer(const State& state, const Odometer& odometer);

/// Grains that leave through the boundary: sum of odometer(v) * deficit(v).
std::uint64_t boundary_outflow(const Odometer& odometer);

State max_stable(BallPtr ball);

/// Sorts and deduplicates a vertex set, rejecting ids outside the ball.
std::vector<VertexId> normalize_set(const Ball& ball, std::span<const VertexId> vertices);

/// Adds one grain at every vertex of the set. Empty sets are the identity.
State perturb(State state, std::span<const VertexId> vertices);

// Text formats. States list only entries that differ from `default=`, which
// is chosen as the most frequent value (smallest on ties).
std::string serialize_state(const State& state);
State deserialize_state(BallPtr ball, std::string_view text);
std::string serialize_odometer(const Odometer& odometer);
Odometer deserialize_odometer(BallPtr ball, std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace heptapile
