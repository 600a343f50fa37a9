#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heptapile/sandpile.hpp"

// Experiment drivers shared by the CLI (through the C API) and the test
// suites.
namespace heptapile::harness {

/// k uniform draws over the vertex ids, deduplicated and sorted. k >= 1, so
/// the result is never empty.
std::vector<VertexId> random_subset(const Ball& ball, std::size_t k, std::mt19937_64& rng);

/// Worker count: HEPTAPILE_THREADS if set, else hardware concurrency; capped
/// by `requested` when that is nonzero.
unsigned worker_count(unsigned requested = 0);

struct NamedSet {
    std::string family;
    std::vector<VertexId> vertices;
};

/// Perturbation sets for one radius. The first entries cover the fixed
/// families ({O}, a point on the boundary level, five random points, several
/// minimizers of the level, O plus others, a dense half, the whole ball, one
/// point per level from a random start outward); the rest are random draws of
/// random size.
std::vector<NamedSet> trial_sets(const Ball& ball, unsigned trials, std::uint64_t seed);

struct TrialCheck {
    bool odometer = false;      // relax odometer equals the closed formula
    bool state = false;         // relax state equals predicted_beta
    bool mass_loss = false;     // loss equals C_m
    bool identity = false;      // final = initial + Laplacian(odometer)
    bool outflow = false;       // loss equals boundary outflow
    bool multitopple = false;   // batched relaxation agrees exactly
    bool waves = false;         // wave decomposition agrees exactly
    std::uint64_t loss = 0;

    bool passed() const { return odometer && state && mass_loss && identity && outflow && multitopple && waves; }
    std::string failures() const;
};

TrialCheck check_trial(const BallPtr& ball, std::span<const VertexId> vertices);

struct VerifyConfig {
    Level m_lo = 1;
    Level m_hi = 6;
    unsigned trials = 10;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    BallPtr ball; // when set, verify this ball instead of building m_lo..m_hi
};

using LineSink = std::function<void(std::string_view)>;

/// Runs the verification matrix, writing a line-oriented report. Returns
/// true iff every check passed.
bool run_verify(const VerifyConfig& config, const LineSink& sink);

enum class BenchMethod { Naive, MultiTopple, Wave, Closed };

const char* to_string(BenchMethod method);
BenchMethod parse_bench_method(std::string_view name);

struct BenchRow {
    BenchMethod method = BenchMethod::Naive;
    double seconds = 0.0;
    std::uint64_t topplings = 0;  // topplings performed (0 for the closed form)
    std::uint64_t dequeues = 0;
    std::uint64_t predicted_topplings = 0; // odometer total of the output
    std::string output;           // serialized state + odometer
};

struct BenchReport {
    Level m = 0;
    std::uint64_t vertices = 0;
    std::uint64_t expected_topplings = 0; // closed sum over levels
    std::vector<BenchRow> rows;
    bool outputs_agree = false;
    bool totals_match = false;
};

/// Times each method on the maximal stable state plus one grain at O.
BenchReport run_bench(Level m, std::span<const BenchMethod> methods, unsigned repeats = 1);

} // namespace heptapile::harness
