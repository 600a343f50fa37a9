#include "heptapile/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <charconv>
#include <optional>
#include <thread>

#include "heptapile/closed_form.hpp"
#include "heptapile/error.hpp"
#include "heptapile/waves.hpp"

namespace heptapile::harness {

namespace {

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

VertexId uniform_in(VertexId lo, VertexId hi, std::mt19937_64& rng) {
    return std::uniform_int_distribution<VertexId>(lo, hi)(rng);
}

VertexId uniform_on_level(const Ball& ball, Level l, std::mt19937_64& rng) {
    return uniform_in(ball.level_begin(l), ball.level_end(l) - 1, rng);
}

template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    }
}

std::string describe(const NamedSet& set, const Ball& ball) {
    return format("[%s] |P|=%zu L(P)=%u", set.family.c_str(), set.vertices.size(),
                  static_cast<unsigned>(set_level(ball, set.vertices)));
}

} // namespace

std::vector<VertexId> random_subset(const Ball& ball, std::size_t k, std::mt19937_64& rng) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "random perturbation sets need k >= 1");
    std::vector<VertexId> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(uniform_in(0, ball.size() - 1, rng));
    return normalize_set(ball, out);
}

unsigned worker_count(unsigned requested) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HEPTAPILE_THREADS")) {
        unsigned cap = 0;
        const char* end = env + std::char_traits<char>::length(env);
        auto [ptr, ec] = std::from_chars(env, end, cap);
        if (ec == std::errc{} && ptr == end && cap > 0) n = cap;
    }
    if (requested > 0) n = std::min(n, requested);
    return n;
}

std::vector<NamedSet> trial_sets(const Ball& ball, unsigned trials, std::uint64_t seed) {
    const Level m = ball.radius();
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "trial sets need a ball of radius >= 1");
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (m + 1)));
    std::vector<NamedSet> out;

    for (unsigned t = 0; t < trials; ++t) {
        NamedSet set;
        switch (t) {
        case 0:
            set = {"origin", {kOrigin}};
            break;
        case 1:
            set = {"boundary-point", {uniform_on_level(ball, m, rng)}};
            break;
        case 2: {
            set.family = "five-points";
            const auto want = std::min<std::uint64_t>(5, ball.size());
            while (set.vertices.size() < want) {
                set.vertices.push_back(uniform_in(0, ball.size() - 1, rng));
                set.vertices = normalize_set(ball, set.vertices);
            }
            break;
        }
        case 3: {
            set.family = "tied-minimizers";
            const auto l = static_cast<Level>(uniform_in(1, m, rng));
            const VertexId a = uniform_on_level(ball, l, rng);
            const VertexId b = ball.level_begin(l) + (a - ball.level_begin(l) + 1 + uniform_in(0, ball.ring_length(l) - 2, rng)) % ball.ring_length(l);
            set.vertices = {a, b, uniform_in(ball.level_begin(l), ball.size() - 1, rng)};
            break;
        }
        case 4: {
            set.family = "origin-plus";
            set.vertices = random_subset(ball, 3, rng);
            set.vertices.push_back(kOrigin);
            break;
        }
        case 5: {
            set.family = "dense-half";
            std::bernoulli_distribution coin(0.5);
            for (VertexId v = 0; v < ball.size(); ++v)
                if (coin(rng)) set.vertices.push_back(v);
            if (set.vertices.empty()) set.vertices.push_back(kOrigin);
            break;
        }
        case 6:
            set.family = "whole-ball";
            set.vertices.resize(ball.size());
            for (VertexId v = 0; v < ball.size(); ++v) set.vertices[v] = v;
            break;
        case 7: {
            set.family = "level-ladder";
            const auto from = static_cast<Level>(uniform_in(0, m, rng));
            for (Level l = from; l <= m; ++l) set.vertices.push_back(uniform_on_level(ball, l, rng));
            break;
        }
        default:
            if (t % 2 == 0) {
                const Level l = t / 2 % (m + 1);
                set = {"singleton-level-" + std::to_string(l), {uniform_on_level(ball, l, rng)}};
            } else {
                set.family = "random";
                set.vertices = random_subset(ball, static_cast<std::size_t>(uniform_in(1, 8, rng)), rng);
            }
            break;
        }
        set.vertices = normalize_set(ball, set.vertices);
        out.push_back(std::move(set));
    }
    return out;
}

std::string TrialCheck::failures() const {
    std::string out;
    auto note = [&](bool ok, const char* name) {
        if (ok) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    note(odometer, "odometer");
    note(state, "final-state");
    note(mass_loss, "mass-loss");
    note(identity, "laplacian-identity");
    note(outflow, "boundary-outflow");
    note(multitopple, "multitopple");
    note(waves, "waves");
    return out;
}

TrialCheck check_trial(const BallPtr& ball, std::span<const VertexId> vertices) {
    const State start = perturb(max_stable(ball), vertices);
    const auto fifo = relax(start);
    TrialCheck check;
    check.odometer = fifo.odometer == predicted_odometer(ball, vertices);
    check.state = fifo.state == predicted_beta(ball, vertices);
    const auto loss = mass(start) - mass(fifo.state);
    check.loss = static_cast<std::uint64_t>(loss);
    check.mass_loss = loss >= 0 && static_cast<std::uint64_t>(loss) == mass_loss(ball->radius());
    check.identity = apply_odometer(start, fifo.odometer) == fifo.state;
    check.outflow = loss >= 0 && boundary_outflow(fifo.odometer) == static_cast<std::uint64_t>(loss);
    const auto batched = relax(start, {RelaxMethod::MultiTopple});
    check.multitopple = batched.state == fifo.state && batched.odometer == fifo.odometer;
    const auto waves = wave_relax(ball, vertices);
    check.waves = waves.state == fifo.state && waves.odometer == fifo.odometer;
    return check;
}

bool run_verify(const VerifyConfig& config, const LineSink& sink) {
    std::vector<BallPtr> balls;
    if (config.ball) {
        balls.push_back(config.ball);
    } else {
        if (config.m_lo == 0 || config.m_lo > config.m_hi)
            throw Error(ErrorCode::InvalidArgument, "verify needs 1 <= m_lo <= m_hi");
        for (Level m = config.m_lo; m <= config.m_hi; ++m) balls.push_back(build_ball(m));
    }
    if (balls.front()->radius() == 0) throw Error(ErrorCode::InvalidArgument, "verify needs radius >= 1");

    sink(format("# heptapile verify m=%u..%u trials=%u seed=%llu", balls.front()->radius(), balls.back()->radius(),
                config.trials, static_cast<unsigned long long>(config.seed)));
    bool all = true;
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
    auto record = [&](bool ok, const std::string& line) {
        ++checks;
        if (!ok) {
            ++failures;
            all = false;
        }
        sink(line + (ok ? " PASS" : " FAIL"));
    };

    for (const auto& ball : balls) {
        const Level m = ball->radius();
        try {
            ball->validate();
            record(true, format("m=%u structure: ball invariants hold (%llu vertices)", m,
                                static_cast<unsigned long long>(ball->size())));
        } catch (const InvariantError& e) {
            record(false, format("m=%u structure: invariant '%s' violated: %s", m, e.invariant().c_str(), e.what()));
            continue;
        }

        bool counts_ok = ball->size() == ball_size(m);
        for (Level l = 1; l <= m; ++l) {
            const auto [a, b] = ball->type_tally(l);
            counts_ok = counts_ok && LevelCounts{a, b} == level_counts(l);
        }
        record(counts_ok, format("m=%u combinatorics: level counts and |Gamma_m| = %llu match the Fibonacci formulas", m,
                                 static_cast<unsigned long long>(ball_size(m))));

        const auto first_wave = wave(max_stable(ball), kOrigin);
        record(first_wave == alpha(m, ball), format("m=%u wave: W_O phi_m = 6 inside, 2 on first type, 3 on second type", m));
        if (m >= 2) {
            const auto second_wave = wave(first_wave, kOrigin);
            const auto smaller = build_ball(m - 1);
            const auto reference = wave(max_stable(smaller), kOrigin);
            bool same = true;
            for (VertexId v = 0; v < smaller->size(); ++v) same = same && second_wave[v] == reference[v];
            record(same, format("m=%u wave: W_O^2 phi_m = W_O phi_{m-1} on Gamma_{m-1}", m));
        }

        const auto sets = trial_sets(*ball, config.trials, config.seed);
        std::vector<TrialCheck> results(sets.size());
        std::vector<std::string> errors(sets.size());
        parallel_for(sets.size(), worker_count(config.threads), [&](std::size_t i) {
            try {
                results[i] = check_trial(ball, sets[i].vertices);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const auto head = format("m=%u trial %zu ", m, i) + describe(sets[i], *ball);
            if (!errors[i].empty()) {
                record(false, head + " error: " + errors[i]);
                continue;
            }
            const auto& r = results[i];
            record(r.passed(), head + format(" loss=%llu", static_cast<unsigned long long>(r.loss)) +
                                   (r.passed() ? "" : " mismatch: " + r.failures()));
        }
    }

    sink("# m |Gamma_m| C_m C_m/|Gamma_m| |ratio-sqrt5|");
    for (const auto& ball : balls) {
        const Level m = ball->radius();
        const auto r = mass_loss_ratio(m);
        sink(format("%u %llu %llu %.9f %.3e", m, static_cast<unsigned long long>(ball_size(m)),
                    static_cast<unsigned long long>(mass_loss(m)), r.value, std::abs(r.value - std::sqrt(5.0))));
    }
    sink(format("# summary: %llu checks, %llu failures: %s", static_cast<unsigned long long>(checks),
                static_cast<unsigned long long>(failures), all ? "PASS" : "FAIL"));
    return all;
}

const char* to_string(BenchMethod method) {
    switch (method) {
    case BenchMethod::Naive: return "naive";
    case BenchMethod::MultiTopple: return "multitopple";
    case BenchMethod::Wave: return "wave";
    case BenchMethod::Closed: return "closed";
    }
    return "?";
}

BenchMethod parse_bench_method(std::string_view name) {
    for (auto m : {BenchMethod::Naive, BenchMethod::MultiTopple, BenchMethod::Wave, BenchMethod::Closed})
        if (name == to_string(m)) return m;
    throw Error(ErrorCode::InvalidArgument, "unknown bench method '" + std::string(name) + "'");
}

BenchReport run_bench(Level m, std::span<const BenchMethod> methods, unsigned repeats) {
    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.m = m;
    const auto ball = build_ball(m);
    report.vertices = ball->size();
    report.expected_topplings = origin_total_topplings(m);
    const VertexId origin[] = {kOrigin};
    const State start = perturb(max_stable(ball), origin);

    for (const auto method : methods) {
        BenchRow row;
        row.method = method;
        row.seconds = 1e300;
        for (unsigned rep = 0; rep < std::max(1u, repeats); ++rep) {
            std::optional<State> state;
            std::optional<Odometer> odometer;
            RelaxStats stats;
            const auto t0 = clock::now();
            switch (method) {
            case BenchMethod::Naive:
            case BenchMethod::MultiTopple: {
                auto r = relax(start, {method == BenchMethod::Naive ? RelaxMethod::Fifo : RelaxMethod::MultiTopple});
                stats = r.stats;
                state.emplace(std::move(r.state));
                odometer.emplace(std::move(r.odometer));
                break;
            }
            case BenchMethod::Wave: {
                auto r = wave_relax(ball, kOrigin);
                stats.topplings = r.odometer.total();
                state.emplace(std::move(r.state));
                odometer.emplace(std::move(r.odometer));
                break;
            }
            case BenchMethod::Closed:
                state.emplace(predicted_beta(ball, origin));
                odometer.emplace(predicted_odometer(ball, origin));
                break;
            }
            const std::chrono::duration<double> elapsed = clock::now() - t0;
            row.seconds = std::min(row.seconds, elapsed.count());
            row.topplings = stats.topplings;
            row.dequeues = stats.dequeues;
            row.predicted_topplings = odometer->total();
            row.output = serialize_state(*state) + serialize_odometer(*odometer);
        }
        report.rows.push_back(std::move(row));
    }

    report.outputs_agree = std::ranges::all_of(report.rows, [&](const BenchRow& r) { return r.output == report.rows.front().output; });
    report.totals_match = std::ranges::all_of(report.rows, [&](const BenchRow& r) {
        return r.predicted_topplings == report.expected_topplings &&
               (r.method == BenchMethod::Closed || r.topplings == report.expected_topplings);
    });
    return report;
}

} // namespace heptapile::harness
