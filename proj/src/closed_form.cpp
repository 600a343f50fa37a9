#include "heptapile/closed_form.hpp"

#include <algorithm>
#include <numeric>

#include "checked.hpp"
#include "heptapile/error.hpp"

namespace heptapile {

using detail::checked_add;
using detail::checked_mul;

std::uint64_t fib(std::uint32_t n) {
    std::uint64_t prev = 0;
    std::uint64_t cur = 1;
    if (n == 0) return 0;
    for (std::uint32_t i = 1; i < n; ++i) {
        const std::uint64_t next = checked_add(prev, cur, "fib");
        prev = cur;
        cur = next;
    }
    return cur;
}

LevelCounts level_counts(Level m) {
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "level counts are defined for m >= 1");
    return {checked_mul<std::uint64_t>(7, fib(2 * m - 1), "level_counts"),
            checked_mul<std::uint64_t>(7, fib(2 * m - 2), "level_counts")};
}

std::uint64_t ball_size(Level m) {
    return checked_mul<std::uint64_t>(7, fib(2 * m + 1), "ball_size") - 6;
}

MassLossForms mass_loss_forms(Level m) {
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "mass loss is defined for m >= 1");
    const auto fibonacci =
        checked_mul<std::uint64_t>(7, checked_add(fib(2 * m), fib(2 * m + 2), "mass_loss"), "mass_loss");
    const auto counts = level_counts(m);
    const auto boundary = checked_add(checked_mul<std::uint64_t>(4, counts.first_type, "mass_loss"),
                                      checked_mul<std::uint64_t>(3, counts.second_type, "mass_loss"), "mass_loss");
    return {fibonacci, boundary};
}

std::uint64_t mass_loss(Level m) {
    const auto forms = mass_loss_forms(m);
    if (forms.fibonacci != forms.boundary)
        throw Error(ErrorCode::Invariant, "7(u_2m + u_2m+2) and 4a_m + 3b_m disagree at m = " + std::to_string(m));
    return forms.fibonacci;
}

Ratio mass_loss_ratio(Level m) {
    const auto num = mass_loss(m);
    const auto den = ball_size(m);
    const auto g = std::gcd(num, den);
    return {num / g, den / g, static_cast<double>(num) / static_cast<double>(den)};
}

bool within_sqrt5(const Ratio& r, std::uint64_t tolerance_denominator) {
    __extension__ typedef unsigned __int128 u128;
    // |a/b - sqrt5| < 1/T  <=>  aT - b < bT sqrt5 < aT + b
    const u128 a = r.numerator;
    const u128 b = r.denominator;
    const u128 t = tolerance_denominator;
    const u128 at = checked_mul(a, t, "within_sqrt5");
    const u128 bt = checked_mul(b, t, "within_sqrt5");
    const u128 target = checked_mul<u128>(5, checked_mul(bt, bt, "within_sqrt5"), "within_sqrt5");
    const u128 upper = checked_add(at, b, "within_sqrt5");
    if (!(target < checked_mul(upper, upper, "within_sqrt5"))) return false;
    if (at <= b) return true;
    const u128 lower = at - b;
    return checked_mul(lower, lower, "within_sqrt5") < target;
}

std::uint64_t origin_total_topplings(Level m) {
    std::uint64_t total = m + 1; // the origin topples m + 1 times
    for (Level l = 1; l <= m; ++l)
        total = checked_add(total, checked_mul<std::uint64_t>(m + 1 - l, level_counts(l).total(), "topplings"),
                            "topplings");
    return total;
}

Level set_level(const Ball& ball, std::span<const VertexId> vertices) {
    if (vertices.empty()) throw Error(ErrorCode::InvalidArgument, "perturbation set P must be non-empty");
    Level best = ball.radius();
    for (VertexId v : vertices) {
        if (v >= ball.size())
            throw Error(ErrorCode::InvalidArgument, "vertex " + std::to_string(v) + " is outside the ball");
        best = std::min(best, ball.level(v));
    }
    return best;
}

State alpha(Level s, BallPtr ball) {
    State out(ball);
    for (VertexId v = 0; v < ball->size(); ++v) {
        const Level l = ball->level(v);
        const bool second = ball->type(v) == VertexType::Second;
        std::int64_t value;
        if (s == 0)
            value = l == 0 ? -1 : (second ? 5 : 3);
        else if (l < s)
            value = 6;
        else if (l == s)
            value = second ? 3 : 2;
        else
            value = second ? 5 : 3;
        out[v] = value;
    }
    return out;
}

State predicted_beta(BallPtr ball, std::span<const VertexId> vertices) {
    const Level s = set_level(*ball, vertices);
    return perturb(alpha(s, std::move(ball)), vertices);
}

Odometer predicted_odometer(BallPtr ball, std::span<const VertexId> vertices) {
    const Level s = set_level(*ball, vertices);
    const Level m = ball->radius();
    Odometer out(ball);
    for (VertexId v = 0; v < ball->size(); ++v) out[v] = m + 1 - std::max(ball->level(v), s);
    return out;
}

} // namespace heptapile
