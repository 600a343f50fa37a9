#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace heptapile {

using VertexId = std::uint64_t;
using Level = std::uint32_t;

inline constexpr int kDegree = 7;
inline constexpr VertexId kOrigin = 0;

enum class VertexType : std::uint8_t { Zeroth = 0, First = 1, Second = 2 };

// Default ceiling on the number of vertices build_ball will allocate.
// Overridable through the HEPTAPILE_MAX_VERTICES environment variable.
inline constexpr std::uint64_t kDefaultMaxVertices = 64'000'000;

std::uint64_t max_vertices_limit();

class Ball;
using BallPtr = std::shared_ptr<const Ball>;
BallPtr build_ball(Level radius);

/// The ball of radius m around the origin in the order-7 triangular tiling.
///
/// Vertices are numbered level-major; inside a level the ids run along the
/// ring (counter-clockwise around the origin), so level l occupies the id
/// range [level_begin(l), level_end(l)). Neighbors outside the ball are not
/// stored, only counted in boundary_deficit.
///
/// A Ball is immutable once constructed and is shared through BallPtr.
class Ball {
public:
    /// Assembles a ball from raw parts and runs validate(). Adjacency lists
    /// may come in any order; they are stored ascending.
    static Ball from_parts(Level radius, std::vector<Level> levels, std::vector<VertexType> types,
                           const std::vector<std::vector<VertexId>>& adjacency);

    Level radius() const noexcept { return radius_; }
    std::uint64_t size() const noexcept { return levels_.size(); }

    Level level(VertexId v) const { return levels_[v]; }
    VertexType type(VertexId v) const { return types_[v]; }
    std::span<const VertexId> neighbors(VertexId v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    int degree(VertexId v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }
    int boundary_deficit(VertexId v) const { return kDegree - degree(v); }

    VertexId level_begin(Level l) const { return level_start_[l]; }
    VertexId level_end(Level l) const { return level_start_[l + 1]; }
    std::uint64_t ring_length(Level l) const { return level_end(l) - level_begin(l); }

    // Ring neighbors along the cycle of level l >= 1.
    VertexId ring_next(VertexId v) const;
    VertexId ring_prev(VertexId v) const;

    std::uint64_t edge_count() const noexcept { return adjacency_.size() / 2; }

    /// Counts (First, Second) vertices on a level.
    std::pair<std::uint64_t, std::uint64_t> type_tally(Level l) const;

    /// Checks every structural invariant; throws InvariantError naming the
    /// first failing rule.
    void validate() const;

    friend bool operator==(const Ball&, const Ball&) = default;

private:
    friend BallPtr build_ball(Level radius);

    Ball() = default;

    // Sorts each adjacency list, derives the level table, and validates.
    static Ball from_csr(Level radius, std::vector<Level> levels, std::vector<VertexType> types,
                         std::vector<std::uint64_t> offsets, std::vector<VertexId> adjacency);

    Level radius_ = 0;
    std::vector<Level> levels_;
    std::vector<VertexType> types_;
    std::vector<std::uint64_t> offsets_;
    std::vector<VertexId> adjacency_;
    std::vector<VertexId> level_start_;
};

/// Grows the ball ring by ring. Each parent contributes its own children
/// (two for First, one for Second) followed by the Second child it shares
/// with its ring successor. Throws ErrorCode::Capacity when the ball would
/// exceed max_vertices_limit() or the 64-bit index range.
BallPtr build_ball(Level radius);

/// BFS distance from the origin through stored edges.
std::vector<Level> distance_profile(const Ball& ball);

std::string serialize_ball(const Ball& ball);
void write_ball(std::ostream& out, const Ball& ball);
BallPtr deserialize_ball(std::string_view text);
BallPtr read_ball_file(const std::string& path);
void write_ball_file(const std::string& path, const Ball& ball);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace heptapile
