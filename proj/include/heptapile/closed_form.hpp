#pragma once

#include <cstdint>
#include <span>

#include "heptapile/ball.hpp"
#include "heptapile/sandpile.hpp"

// Closed formulas for the perturbed maximal stable state. Everything here is
// evaluated from levels and vertex types alone, never by toppling, so it can
// serve as an oracle for the simulators.
namespace heptapile {

/// u_n with u_0 = 0, u_1 = 1. Throws ErrorCode::Overflow past u_93.
std::uint64_t fib(std::uint32_t n);

struct LevelCounts {
    std::uint64_t first_type = 0;
    std::uint64_t second_type = 0;

    std::uint64_t total() const { return first_type + second_type; }
    friend bool operator==(const LevelCounts&, const LevelCounts&) = default;
};

/// (a_m, b_m) = (7 u_{2m-1}, 7 u_{2m-2}) for m >= 1.
LevelCounts level_counts(Level m);

/// |Gamma_m| = 7 u_{2m+1} - 6.
std::uint64_t ball_size(Level m);

struct MassLossForms {
    std::uint64_t fibonacci;     // 7 (u_{2m} + u_{2m+2})
    std::uint64_t boundary;      // 4 a_m + 3 b_m
};

MassLossForms mass_loss_forms(Level m);

/// C_m; throws ErrorCode::Invariant if the two forms ever disagree.
std::uint64_t mass_loss(Level m);

struct Ratio {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;
    double value = 0.0;
};

/// C_m / |Gamma_m| reduced to lowest terms.
Ratio mass_loss_ratio(Level m);

/// Exact test of |r - sqrt(5)| < 1 / tolerance_denominator.
bool within_sqrt5(const Ratio& r, std::uint64_t tolerance_denominator);

/// Total topplings for P = {O}: sum over levels of (m + 1 - l) |level l|.
std::uint64_t origin_total_topplings(Level m);

/// L(P) = min over P of the level.
Level set_level(const Ball& ball, std::span<const VertexId> vertices);

/// The universal state alpha_s restricted to the ball.
State alpha(Level s, BallPtr ball);

/// alpha_{L(P)} plus one grain on each point of P. Rejects an empty P.
State predicted_beta(BallPtr ball, std::span<const VertexId> vertices);

/// min(m + 1 - L(v), m + 1 - L(P)) at every vertex. Rejects an empty P.
Odometer predicted_odometer(BallPtr ball, std::span<const VertexId> vertices);

} // namespace heptapile
