#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "heptapile/sandpile.hpp"

namespace heptapile {

struct WaveOptions {
    // Recompute the wave through a second qualifying neighbor and throw
    // ErrorCode::Invariant if the results differ.
    bool check_neighbor_choice = false;
};

struct WaveStep {
    State state;
    Odometer toppled; // topplings performed by this wave, 0 or 1 per vertex
    bool fired = false;
};

/// One wave from p on a stable state: when p and some neighbor v both hold
/// 6, the result is relax(T_v T_p state) with v the lowest-index such
/// neighbor; otherwise the state comes back unchanged and `fired` is false.
/// Throws ErrorCode::Unstable when the input is not stable and nonnegative.
WaveStep wave_step(const State& state, VertexId p, WaveOptions options = {});

State wave(const State& state, VertexId p, WaveOptions options = {});

struct WaveRelaxation {
    State state;
    Odometer odometer;
    // Number of times the wave source toppled: one per fired wave plus the
    // final single toppling when the source is left maximal but isolated.
    std::uint64_t wave_count = 0;
    // Vertices toppled by each wave, ascending ids, in wave order.
    std::vector<std::vector<VertexId>> fronts;
    // Topplings needed after the remaining points of P were added. The
    // closed-form description predicts zero.
    std::uint64_t residual_topplings = 0;
};

/// Relaxation of the maximal stable state plus one grain on each point of P,
/// decomposed into waves from the lowest-index minimizer of the level over P.
WaveRelaxation wave_relax(BallPtr ball, std::span<const VertexId> vertices);
WaveRelaxation wave_relax(BallPtr ball, VertexId p);

} // namespace heptapile
