#include "heptapile/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heptapile/error.hpp"

namespace heptapile {

namespace {

constexpr double kTurn = 2.0 * std::numbers::pi / kDegree;
constexpr double kFrameTolerance = 1e-6;

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    return out;
}

HPoint act(const Mat3& m, const HPoint& p) {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z, m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
}

Mat3 rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

// Translation along the x axis taking O to distance `length`.
Mat3 boost(double length) {
    const double c = std::cosh(length);
    const double s = std::sinh(length);
    return {{{c, 0.0, s}, {0.0, 1.0, 0.0}, {s, 0.0, c}}};
}

HPoint column(const Mat3& m, int j) { return {m[0][j], m[1][j], m[2][j]}; }

void set_column(Mat3& m, int j, const HPoint& p) {
    m[0][j] = p.x;
    m[1][j] = p.y;
    m[2][j] = p.z;
}

HPoint axpy(double a, const HPoint& x, const HPoint& y) { return {a * x.x + y.x, a * x.y + y.y, a * x.z + y.z}; }

HPoint scaled(const HPoint& p, double s) { return {p.x * s, p.y * s, p.z * s}; }

// Max deviation of the columns from a Lorentz-orthonormal basis; then
// Gram-Schmidt w.r.t. diag(1, 1, -1), starting from the timelike column.
double reorthonormalize(Mat3& m) {
    HPoint e0 = column(m, 0);
    HPoint e1 = column(m, 1);
    HPoint e2 = column(m, 2);
    const double residual =
        std::max({std::abs(minkowski(e0, e0) - 1.0), std::abs(minkowski(e1, e1) - 1.0),
                  std::abs(minkowski(e2, e2) + 1.0), std::abs(minkowski(e0, e1)), std::abs(minkowski(e0, e2)),
                  std::abs(minkowski(e1, e2))});

    e2 = scaled(e2, 1.0 / std::sqrt(-minkowski(e2, e2)));
    e0 = axpy(minkowski(e0, e2), e2, e0);
    e0 = scaled(e0, 1.0 / std::sqrt(minkowski(e0, e0)));
    e1 = axpy(minkowski(e1, e2), e2, e1);
    e1 = axpy(-minkowski(e1, e0), e0, e1);
    e1 = scaled(e1, 1.0 / std::sqrt(minkowski(e1, e1)));
    set_column(m, 0, e0);
    set_column(m, 1, e1);
    set_column(m, 2, e2);
    return residual;
}

// Up neighbors of v in ring order of the next level.
std::vector<VertexId> upper_neighbors(const Ball& ball, VertexId v) {
    const Level l = ball.level(v);
    std::vector<VertexId> up;
    for (VertexId u : ball.neighbors(v))
        if (ball.level(u) == l + 1) up.push_back(u);
    if (up.empty()) return up;
    auto contains = [&](VertexId u) { return std::ranges::find(up, u) != up.end(); };
    VertexId start = up.front();
    for (VertexId u : up) {
        if (!contains(ball.ring_prev(u))) {
            start = u;
            break;
        }
    }
    std::vector<VertexId> ordered{start};
    while (ordered.size() < up.size()) ordered.push_back(ball.ring_next(ordered.back()));
    return ordered;
}

int slot_of(const std::array<VertexId, kDegree>& slots, VertexId u) {
    for (int j = 0; j < kDegree; ++j)
        if (slots[j] == u) return j;
    throw Error(ErrorCode::Invariant, "vertex " + std::to_string(u) + " missing from a neighbor cycle");
}

int upper_slot_count(VertexType t) { return t == VertexType::First ? 4 : 3; }

} // namespace

HPoint recenter(const HPoint& focus, const HPoint& p) {
    const double theta = std::atan2(focus.y, focus.x);
    const double r = std::acosh(std::max(1.0, focus.z));
    return act(multiply(multiply(rotation(theta), boost(-r)), rotation(-theta)), p);
}

double minkowski(const HPoint& a, const HPoint& b) { return a.x * b.x + a.y * b.y - a.z * b.z; }

double hyperbolic_distance(const HPoint& a, const HPoint& b) {
    return std::acosh(std::max(1.0, -minkowski(a, b)));
}

double edge_cosh() {
    const double c = std::cos(kTurn);
    return c / (1.0 - c);
}

double edge_length() { return std::acosh(edge_cosh()); }

std::array<VertexId, kDegree> ccw_neighbors(const Ball& ball, VertexId v) {
    std::array<VertexId, kDegree> slots;
    slots.fill(kOutside);
    if (v == kOrigin) {
        if (ball.radius() >= 1)
            for (int j = 0; j < kDegree; ++j) slots[j] = ball.level_begin(1) + static_cast<VertexId>(j);
        return slots;
    }

    const int up = upper_slot_count(ball.type(v));
    slots[0] = ball.ring_prev(v);
    const auto upper = upper_neighbors(ball, v);
    for (std::size_t i = 0; i < upper.size(); ++i) slots[1 + i] = upper[i];
    slots[up + 1] = ball.ring_next(v);

    std::vector<VertexId> lower;
    for (VertexId u : ball.neighbors(v))
        if (ball.level(u) + 1 == ball.level(v)) lower.push_back(u);
    if (lower.size() == 2 && ball.ring_next(lower[1]) == lower[0]) std::swap(lower[0], lower[1]);
    // lower is now in ring order; it is laid out against ring direction.
    for (std::size_t i = 0; i < lower.size(); ++i) slots[kDegree - 1 - i] = lower[i];
    return slots;
}

Embedding build_embedding(BallPtr ball) {
    const auto n = ball->size();
    const double length = edge_length();
    const Mat3 step_out = multiply(boost(length), rotation(std::numbers::pi));

    std::array<Mat3, kDegree> turn;
    for (int j = 0; j < kDegree; ++j) turn[j] = rotation(kTurn * j);

    const HPoint origin{0.0, 0.0, 1.0};
    const HPoint n0 = act(boost(length), origin);
    const HPoint n1 = act(turn[1], n0);
    HPoint center{origin.x + n0.x + n1.x, origin.y + n0.y + n1.y, origin.z + n0.z + n1.z};
    center = scaled(center, 1.0 / std::sqrt(-minkowski(center, center)));
    std::array<HPoint, kDegree> corners;
    for (int j = 0; j < kDegree; ++j) corners[j] = act(turn[j], center);

    Embedding out{ball, std::vector<HPoint>(n), std::vector<std::array<HPoint, kDegree>>(n), 0.0};
    std::vector<Mat3> frames(n);
    frames[kOrigin] = rotation(0.0);

    std::vector<std::array<VertexId, kDegree>> slots(n);
    for (VertexId v = 0; v < n; ++v) slots[v] = ccw_neighbors(*ball, v);

    for (VertexId v = 1; v < n; ++v) {
        // Reference parent: the lower neighbor that comes first in ring order.
        const VertexId parent = slots[v][kDegree - 1];
        const int out_slot = slot_of(slots[parent], v);
        const int in_slot = kDegree - 1;
        Mat3 frame = multiply(multiply(frames[parent], turn[out_slot]), step_out);
        frame = multiply(frame, turn[(kDegree - in_slot) % kDegree]);
        const double residual = reorthonormalize(frame);
        out.max_frame_residual = std::max(out.max_frame_residual, residual);
        if (!(residual < kFrameTolerance))
            throw Error(ErrorCode::Invariant, "frame drift " + std::to_string(residual) + " at vertex " + std::to_string(v));
        frames[v] = frame;
    }

    for (VertexId v = 0; v < n; ++v) {
        out.vertex_pos[v] = column(frames[v], 2);
        for (int j = 0; j < kDegree; ++j) out.cells[v][j] = act(frames[v], corners[j]);
    }
    return out;
}

EmbeddingReport check_embedding(const Embedding& embedding, bool nearest_neighbors) {
    const Ball& ball = *embedding.ball;
    const auto& pos = embedding.vertex_pos;
    const auto n = ball.size();
    const double length = edge_length();
    EmbeddingReport report;

    for (VertexId v = 0; v < n; ++v) {
        const HPoint& p = pos[v];
        report.max_form_residual = std::max(report.max_form_residual, std::abs(minkowski(p, p) + 1.0));
        const auto k = klein(p);
        report.max_klein_radius = std::max(report.max_klein_radius, std::hypot(k.x, k.y));
        for (VertexId u : ball.neighbors(v)) {
            if (u < v) continue;
            report.max_edge_error = std::max(report.max_edge_error, std::abs(hyperbolic_distance(p, pos[u]) - length));
        }
    }

    auto tangent = [&](const HPoint& at, const HPoint& toward) { return axpy(minkowski(at, toward), at, toward); };
    for (VertexId v = 0; v < n; ++v) {
        if (ball.level(v) >= ball.radius()) continue;
        ++report.interior_vertices;
        const auto slots = ccw_neighbors(ball, v);
        for (int j = 0; j < kDegree; ++j) {
            const HPoint a = tangent(pos[v], pos[slots[j]]);
            const HPoint b = tangent(pos[v], pos[slots[(j + 1) % kDegree]]);
            // Signed angle from a to b in the tangent plane, oriented by the
            // surface normal at pos[v].
            const double cosine = minkowski(a, b) / std::sqrt(minkowski(a, a) * minkowski(b, b));
            const HPoint& q = pos[v];
            const double cross_z = a.x * b.y - a.y * b.x;
            const double cross_x = a.y * b.z - a.z * b.y;
            const double cross_y = a.z * b.x - a.x * b.z;
            const double orientation = cross_x * q.x + cross_y * q.y + cross_z * q.z;
            double angle = std::acos(std::clamp(cosine, -1.0, 1.0));
            if (orientation < 0) angle = 2.0 * std::numbers::pi - angle;
            report.max_angle_error = std::max(report.max_angle_error, std::abs(angle - kTurn));
        }
    }

    if (nearest_neighbors) {
        report.nearest_neighbors_checked = true;
        std::vector<std::pair<double, VertexId>> dist;
        dist.reserve(n);
        for (VertexId v = 0; v < n; ++v) {
            if (ball.level(v) >= ball.radius()) continue;
            dist.clear();
            for (VertexId u = 0; u < n; ++u)
                if (u != v) dist.emplace_back(-minkowski(pos[v], pos[u]), u);
            const auto k = std::min<std::size_t>(kDegree, dist.size());
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
            std::vector<VertexId> closest;
            for (std::size_t i = 0; i < k; ++i) closest.push_back(dist[i].second);
            std::ranges::sort(closest);
            const auto nb = ball.neighbors(v);
            if (!std::ranges::equal(closest, nb)) ++report.nearest_neighbor_mismatches;
        }
    }
    return report;
}

} // namespace heptapile
