#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "heptapile/ball.hpp"

namespace heptapile {

/// Point on the upper sheet x^2 + y^2 - z^2 = -1 of the hyperboloid.
struct HPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;
};

struct KleinPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Bilinear form of signature (+, +, -).
double minkowski(const HPoint& a, const HPoint& b);
double hyperbolic_distance(const HPoint& a, const HPoint& b);
inline KleinPoint klein(const HPoint& p) { return {p.x / p.z, p.y / p.z}; }

/// Image of p under the isometry that carries `focus` to the apex (0, 0, 1)
/// by a translation along the geodesic through both, with no extra turn.
HPoint recenter(const HPoint& focus, const HPoint& p);

/// cosh of the side of the equilateral triangle with angles 2pi/7:
/// cos(2pi/7) / (1 - cos(2pi/7)).
double edge_cosh();
double edge_length();

inline constexpr VertexId kOutside = std::numeric_limits<VertexId>::max();

/// The seven neighbors of v in counter-clockwise order, kOutside for those
/// beyond the ball. For v != O the order is: ring predecessor, the upper
/// neighbors along the next ring, ring successor, then the lower neighbors
/// against ring direction.
std::array<VertexId, kDegree> ccw_neighbors(const Ball& ball, VertexId v);

struct Embedding {
    BallPtr ball;
    std::vector<HPoint> vertex_pos;
    // Corner j of the dual heptagon of v is the center of the triangle formed
    // by v and its counter-clockwise neighbors j and j + 1.
    std::vector<std::array<HPoint, kDegree>> cells;
    // Largest |G^T J G - J| entry seen before re-orthonormalizing a frame.
    double max_frame_residual = 0.0;
};

/// Places O at the apex and carries a Lorentz frame along one parent edge per
/// vertex. Throws ErrorCode::Invariant if a frame drifts beyond repair.
Embedding build_embedding(BallPtr ball);

struct EmbeddingReport {
    double max_edge_error = 0.0;
    double max_angle_error = 0.0;
    double max_form_residual = 0.0;
    double max_klein_radius = 0.0;
    std::uint64_t interior_vertices = 0;
    std::uint64_t nearest_neighbor_mismatches = 0;
    bool nearest_neighbors_checked = false;
};

/// Measures the embedding against the tiling: edge lengths, angles at
/// interior vertices, the hyperboloid equation, and (when requested, O(n^2))
/// that the 7 closest points of every interior vertex are its graph neighbors.
EmbeddingReport check_embedding(const Embedding& embedding, bool nearest_neighbors = true);

} // namespace heptapile
