#include "heptapile/ball.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <new>

#include "heptapile/closed_form.hpp"
#include "heptapile/error.hpp"

namespace heptapile {

std::uint64_t max_vertices_limit() {
    if (const char* env = std::getenv("HEPTAPILE_MAX_VERTICES")) {
        std::uint64_t value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc{} && ptr == end && value > 0) return value;
    }
    return kDefaultMaxVertices;
}

VertexId Ball::ring_next(VertexId v) const {
    const Level l = levels_[v];
    return v + 1 == level_end(l) ? level_begin(l) : v + 1;
}

VertexId Ball::ring_prev(VertexId v) const {
    const Level l = levels_[v];
    return v == level_begin(l) ? level_end(l) - 1 : v - 1;
}

std::pair<std::uint64_t, std::uint64_t> Ball::type_tally(Level l) const {
    std::uint64_t first = 0;
    std::uint64_t second = 0;
    for (VertexId v = level_begin(l); v < level_end(l); ++v) {
        if (types_[v] == VertexType::First) ++first;
        if (types_[v] == VertexType::Second) ++second;
    }
    return {first, second};
}

Ball Ball::from_parts(Level radius, std::vector<Level> levels, std::vector<VertexType> types,
                      const std::vector<std::vector<VertexId>>& adjacency) {
    if (levels.size() != types.size() || levels.size() != adjacency.size())
        throw Error(ErrorCode::InvalidArgument, "ball parts have inconsistent lengths");
    std::vector<std::uint64_t> offsets{0};
    std::vector<VertexId> flat;
    for (const auto& list : adjacency) {
        flat.insert(flat.end(), list.begin(), list.end());
        offsets.push_back(flat.size());
    }
    return from_csr(radius, std::move(levels), std::move(types), std::move(offsets), std::move(flat));
}

Ball Ball::from_csr(Level radius, std::vector<Level> levels, std::vector<VertexType> types,
                    std::vector<std::uint64_t> offsets, std::vector<VertexId> adjacency) {
    if (levels.empty()) throw InvariantError("single-origin", "ball has no vertices");
    if (levels.size() != types.size() || offsets.size() != levels.size() + 1 ||
        offsets.back() != adjacency.size())
        throw Error(ErrorCode::InvalidArgument, "ball parts have inconsistent lengths");

    Ball ball;
    ball.radius_ = radius;
    ball.levels_ = std::move(levels);
    ball.types_ = std::move(types);
    ball.offsets_ = std::move(offsets);
    ball.adjacency_ = std::move(adjacency);
    for (std::size_t v = 0; v + 1 < ball.offsets_.size(); ++v) {
        if (ball.offsets_[v + 1] < ball.offsets_[v])
            throw Error(ErrorCode::InvalidArgument, "adjacency offsets are not monotone");
        if (ball.offsets_[v + 1] - ball.offsets_[v] > kDegree)
            throw InvariantError("degree-bound", "vertex " + std::to_string(v) + " has more than 7 neighbors");
        std::sort(ball.adjacency_.begin() + static_cast<std::ptrdiff_t>(ball.offsets_[v]),
                  ball.adjacency_.begin() + static_cast<std::ptrdiff_t>(ball.offsets_[v + 1]));
    }

    // Level table; levels must be non-decreasing in id for level_begin/end.
    const auto n = ball.levels_.size();
    for (std::size_t v = 1; v < n; ++v) {
        if (ball.levels_[v] < ball.levels_[v - 1])
            throw InvariantError("level-major", "vertex " + std::to_string(v) + " breaks level-major numbering");
    }
    if (ball.levels_.back() != radius)
        throw InvariantError("level-major", "outermost level differs from the radius");
    ball.level_start_.assign(radius + 2, 0);
    for (std::size_t v = 0; v < n; ++v) ball.level_start_[ball.levels_[v] + 1] = v + 1;
    for (Level l = 1; l <= radius + 1; ++l) {
        if (ball.level_start_[l] == 0 && l <= radius)
            throw InvariantError("level-major", "level " + std::to_string(l - 1) + " is empty");
        ball.level_start_[l] = std::max(ball.level_start_[l], ball.level_start_[l - 1]);
    }

    ball.validate();
    return ball;
}

void Ball::validate() const {
    const auto n = size();
    auto where = [](VertexId v) { return "vertex " + std::to_string(v); };

    if (levels_[0] != 0 || types_[0] != VertexType::Zeroth || ring_length(0) != 1)
        throw InvariantError("single-origin", "vertex 0 must be the unique level-0 vertex of type 0");

    for (VertexId v = 0; v < n; ++v) {
        const auto nb = neighbors(v);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const VertexId u = nb[i];
            if (u >= n) throw InvariantError("symmetry", where(v) + " lists out-of-range neighbor");
            if (u == v) throw InvariantError("symmetry", where(v) + " is adjacent to itself");
            if (i > 0 && nb[i - 1] == u) throw InvariantError("symmetry", where(v) + " lists a duplicate neighbor");
            const auto back = neighbors(u);
            if (!std::binary_search(back.begin(), back.end(), v))
                throw InvariantError("symmetry", where(v) + " -> " + std::to_string(u) + " has no reverse edge");
            const auto lv = levels_[v];
            const auto lu = levels_[u];
            if ((lv > lu ? lv - lu : lu - lv) > 1)
                throw InvariantError("level-step", where(v) + " has a neighbor two or more levels away");
        }
        if (levels_[v] < radius_ && degree(v) != kDegree)
            throw InvariantError("interior-deficit", where(v) + " is interior but has degree " +
                                                         std::to_string(degree(v)));
        if (v == 0) continue;

        int down = 0;
        int side = 0;
        for (VertexId u : nb) {
            if (levels_[u] + 1 == levels_[v]) ++down;
            if (levels_[u] == levels_[v]) ++side;
        }
        const bool type_ok = (types_[v] == VertexType::First && down == 1) ||
                             (types_[v] == VertexType::Second && down == 2);
        if (!type_ok) throw InvariantError("vertex-type", where(v) + " has " + std::to_string(down) +
                                                              " lower neighbors but type " +
                                                              std::to_string(static_cast<int>(types_[v])));
        if (side != 2) throw InvariantError("ring-cycle", where(v) + " has " + std::to_string(side) +
                                                              " same-level neighbors");
    }

    for (Level l = 1; l <= radius_; ++l) {
        for (VertexId v = level_begin(l); v < level_end(l); ++v) {
            const auto nb = neighbors(v);
            if (!std::binary_search(nb.begin(), nb.end(), ring_next(v)))
                throw InvariantError("ring-cycle", where(v) + " is not adjacent to its ring successor");
        }
        const auto expected = level_counts(l);
        if (type_tally(l) != std::pair{expected.first_type, expected.second_type})
            throw InvariantError("level-counts", "level " + std::to_string(l) +
                                                     " type counts differ from the Fibonacci formula");
    }

    const auto dist = distance_profile(*this);
    for (VertexId v = 0; v < n; ++v) {
        if (dist[v] != levels_[v])
            throw InvariantError("bfs-levels", where(v) + " stored level " + std::to_string(levels_[v]) +
                                                   " but BFS distance " + std::to_string(dist[v]));
    }
}

std::vector<Level> distance_profile(const Ball& ball) {
    constexpr Level unseen = std::numeric_limits<Level>::max();
    std::vector<Level> dist(ball.size(), unseen);
    std::vector<VertexId> frontier{kOrigin};
    dist[kOrigin] = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const VertexId v = frontier[head];
        for (VertexId u : ball.neighbors(v)) {
            if (dist[u] == unseen) {
                dist[u] = dist[v] + 1;
                frontier.push_back(u);
            }
        }
    }
    return dist;
}

namespace {

struct Builder {
    std::vector<Level> levels;
    std::vector<VertexType> types;
    std::vector<std::array<VertexId, kDegree>> slots;
    std::vector<std::uint8_t> count;

    explicit Builder(std::uint64_t n) {
        levels.reserve(n);
        types.reserve(n);
        slots.reserve(n);
        count.reserve(n);
    }

    VertexId add(Level l, VertexType t) {
        levels.push_back(l);
        types.push_back(t);
        slots.emplace_back();
        count.push_back(0);
        return levels.size() - 1;
    }

    void link(VertexId a, VertexId b) {
        if (count[a] == kDegree || count[b] == kDegree)
            throw Error(ErrorCode::Invariant, "ring growth exceeded the degree budget");
        slots[a][count[a]++] = b;
        slots[b][count[b]++] = a;
    }
};

} // namespace

BallPtr build_ball(Level radius) {
    std::uint64_t n = 0;
    try {
        n = ball_size(radius);
    } catch (const Error&) {
        throw Error(ErrorCode::Capacity, "ball of radius " + std::to_string(radius) +
                                             " exceeds the 64-bit vertex index range");
    }
    if (n > max_vertices_limit())
        throw Error(ErrorCode::Capacity, "ball of radius " + std::to_string(radius) + " has " +
                                             std::to_string(n) + " vertices, above the limit of " +
                                             std::to_string(max_vertices_limit()));

    try {
        Builder b(n);
        b.add(0, VertexType::Zeroth);
        std::vector<VertexId> level_start{0, 1};
        if (radius >= 1) {
            for (int i = 0; i < kDegree; ++i) b.link(kOrigin, b.add(1, VertexType::First));
            for (VertexId v = 1; v <= kDegree; ++v) b.link(v, v % kDegree + 1);
            level_start.push_back(1 + kDegree);
        }
        for (Level l = 1; l < radius; ++l) {
            const VertexId begin = level_start[l];
            const VertexId end = level_start[l + 1];
            const VertexId anchor = end;
            VertexId previous = anchor;
            auto append = [&](VertexType t) {
                const VertexId c = b.add(l + 1, t);
                if (c != anchor) b.link(previous, c);
                previous = c;
                return c;
            };
            for (VertexId p = begin; p < end; ++p) {
                const VertexId successor = p + 1 == end ? begin : p + 1;
                const int own = b.types[p] == VertexType::Second ? 1 : 2;
                for (int j = 0; j < own; ++j) b.link(p, append(VertexType::First));
                const VertexId shared = append(VertexType::Second);
                b.link(p, shared);
                b.link(successor, shared);
            }
            b.link(previous, anchor);
            level_start.push_back(b.levels.size());
        }

        if (b.levels.size() != n)
            throw Error(ErrorCode::Invariant, "ring growth produced " + std::to_string(b.levels.size()) +
                                                  " vertices, expected " + std::to_string(n));

        std::vector<std::uint64_t> offsets(n + 1, 0);
        for (VertexId v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + b.count[v];
        std::vector<VertexId> flat(offsets[n]);
        for (VertexId v = 0; v < n; ++v)
            std::copy_n(b.slots[v].begin(), b.count[v], flat.begin() + static_cast<std::ptrdiff_t>(offsets[v]));
        b.slots = {};
        return std::make_shared<const Ball>(Ball::from_csr(radius, std::move(b.levels), std::move(b.types),
                                                           std::move(offsets), std::move(flat)));
    } catch (const std::bad_alloc&) {
        throw Error(ErrorCode::Capacity, "out of memory building ball of radius " + std::to_string(radius));
    }
}

} // namespace heptapile
