#include "heptapile/heptapile.h"

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "heptapile/closed_form.hpp"
#include "heptapile/error.hpp"
#include "heptapile/geometry.hpp"
#include "heptapile/harness.hpp"
#include "heptapile/render.hpp"
#include "heptapile/sandpile.hpp"
#include "heptapile/waves.hpp"

using namespace heptapile;

struct hp_ball {
    BallPtr ball;
};

struct hp_state {
    State state;
};

struct hp_odometer {
    Odometer odometer;
};

struct hp_embedding {
    Embedding embedding;
};

namespace {

thread_local std::string last_error;

hp_status to_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return HP_E_INVALID_ARGUMENT;
    case ErrorCode::Capacity: return HP_E_CAPACITY;
    case ErrorCode::Parse: return HP_E_PARSE;
    case ErrorCode::Checksum: return HP_E_CHECKSUM;
    case ErrorCode::Invariant: return HP_E_INVARIANT;
    case ErrorCode::Io: return HP_E_IO;
    case ErrorCode::Unstable: return HP_E_UNSTABLE;
    case ErrorCode::Overflow: return HP_E_OVERFLOW;
    case ErrorCode::Mismatch: return HP_E_MISMATCH;
    case ErrorCode::Budget: return HP_E_BUDGET;
    }
    return HP_E_INTERNAL;
}

template <typename Body>
hp_status guarded(Body&& body) {
    last_error.clear();
    try {
        body();
        return HP_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HP_E_CAPACITY;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HP_E_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return HP_E_INTERNAL;
    }
}

template <typename... Ptrs>
void require(Ptrs... ptrs) {
    if (((ptrs == nullptr) || ...)) throw Error(ErrorCode::InvalidArgument, "null argument");
}

std::span<const VertexId> id_span(const uint64_t* ids, size_t count) {
    if (count > 0 && ids == nullptr) throw Error(ErrorCode::InvalidArgument, "null id array");
    return {ids, count};
}

void require_vertex(const Ball& ball, uint64_t v) {
    if (v >= ball.size()) throw Error(ErrorCode::InvalidArgument, "vertex " + std::to_string(v) + " is outside the ball");
}

} // namespace

extern "C" {

const char* hp_version(void) { return "1.0.0"; }

const char* hp_status_name(hp_status status) {
    switch (status) {
    case HP_OK: return "ok";
    case HP_E_INVALID_ARGUMENT: return "invalid-argument";
    case HP_E_CAPACITY: return "capacity";
    case HP_E_PARSE: return "parse";
    case HP_E_CHECKSUM: return "checksum";
    case HP_E_INVARIANT: return "invariant";
    case HP_E_IO: return "io";
    case HP_E_UNSTABLE: return "unstable";
    case HP_E_OVERFLOW: return "overflow";
    case HP_E_MISMATCH: return "mismatch";
    case HP_E_BUDGET: return "budget";
    case HP_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* hp_last_error(void) { return last_error.c_str(); }

hp_status hp_fib(uint32_t n, uint64_t* out) {
    return guarded([&] {
        require(out);
        *out = fib(n);
    });
}

hp_status hp_level_counts(uint32_t m, uint64_t* first, uint64_t* second) {
    return guarded([&] {
        require(first, second);
        const auto c = level_counts(m);
        *first = c.first_type;
        *second = c.second_type;
    });
}

hp_status hp_ball_size_formula(uint32_t m, uint64_t* out) {
    return guarded([&] {
        require(out);
        *out = ball_size(m);
    });
}

hp_status hp_mass_loss(uint32_t m, uint64_t* out) {
    return guarded([&] {
        require(out);
        *out = mass_loss(m);
    });
}

hp_status hp_mass_loss_ratio(uint32_t m, uint64_t* numerator, uint64_t* denominator, double* value) {
    return guarded([&] {
        require(numerator, denominator, value);
        const auto r = mass_loss_ratio(m);
        *numerator = r.numerator;
        *denominator = r.denominator;
        *value = r.value;
    });
}

hp_status hp_origin_total_topplings(uint32_t m, uint64_t* out) {
    return guarded([&] {
        require(out);
        *out = origin_total_topplings(m);
    });
}

hp_status hp_ball_build(uint32_t m, hp_ball** out) {
    return guarded([&] {
        require(out);
        *out = nullptr;
        *out = new hp_ball{build_ball(m)};
    });
}

hp_status hp_ball_load(const char* path, hp_ball** out) {
    return guarded([&] {
        require(path, out);
        *out = nullptr;
        *out = new hp_ball{read_ball_file(path)};
    });
}

hp_status hp_ball_parse(const char* text, size_t length, hp_ball** out) {
    return guarded([&] {
        require(text, out);
        *out = nullptr;
        *out = new hp_ball{deserialize_ball(std::string_view(text, length))};
    });
}

hp_status hp_ball_save(const hp_ball* ball, const char* path) {
    return guarded([&] {
        require(ball, path);
        write_ball_file(path, *ball->ball);
    });
}

void hp_ball_free(hp_ball* ball) { delete ball; }

uint32_t hp_ball_radius(const hp_ball* ball) { return ball ? ball->ball->radius() : 0; }

uint64_t hp_ball_size(const hp_ball* ball) { return ball ? ball->ball->size() : 0; }

hp_status hp_ball_vertex(const hp_ball* ball, uint64_t v, hp_vertex_info* out) {
    return guarded([&] {
        require(ball, out);
        const Ball& b = *ball->ball;
        require_vertex(b, v);
        out->level = b.level(v);
        out->type = static_cast<uint32_t>(b.type(v));
        out->degree = static_cast<uint32_t>(b.degree(v));
        out->boundary_deficit = static_cast<uint32_t>(b.boundary_deficit(v));
    });
}

hp_status hp_ball_neighbors(const hp_ball* ball, uint64_t v, uint64_t* ids, size_t capacity, size_t* count) {
    return guarded([&] {
        require(ball, count);
        const Ball& b = *ball->ball;
        require_vertex(b, v);
        const auto nb = b.neighbors(v);
        if (capacity > 0) require(ids);
        for (size_t i = 0; i < nb.size() && i < capacity; ++i) ids[i] = nb[i];
        *count = nb.size();
    });
}

hp_status hp_ball_level_range(const hp_ball* ball, uint32_t level, uint64_t* begin, uint64_t* end) {
    return guarded([&] {
        require(ball, begin, end);
        if (level > ball->ball->radius()) throw Error(ErrorCode::InvalidArgument, "level beyond the radius");
        *begin = ball->ball->level_begin(level);
        *end = ball->ball->level_end(level);
    });
}

hp_status hp_ball_type_tally(const hp_ball* ball, uint32_t level, uint64_t* first, uint64_t* second) {
    return guarded([&] {
        require(ball, first, second);
        if (level > ball->ball->radius()) throw Error(ErrorCode::InvalidArgument, "level beyond the radius");
        const auto [a, b] = ball->ball->type_tally(level);
        *first = a;
        *second = b;
    });
}

hp_status hp_ball_validate(const hp_ball* ball) {
    return guarded([&] {
        require(ball);
        ball->ball->validate();
    });
}

hp_status hp_state_max_stable(const hp_ball* ball, hp_state** out) {
    return guarded([&] {
        require(ball, out);
        *out = nullptr;
        *out = new hp_state{max_stable(ball->ball)};
    });
}

hp_status hp_state_load(const hp_ball* ball, const char* path, hp_state** out) {
    return guarded([&] {
        require(ball, path, out);
        *out = nullptr;
        *out = new hp_state{deserialize_state(ball->ball, read_text_file(path))};
    });
}

hp_status hp_state_save(const hp_state* state, const char* path) {
    return guarded([&] {
        require(state, path);
        write_text_file(path, serialize_state(state->state));
    });
}

hp_status hp_state_clone(const hp_state* state, hp_state** out) {
    return guarded([&] {
        require(state, out);
        *out = nullptr;
        *out = new hp_state{state->state};
    });
}

void hp_state_free(hp_state* state) { delete state; }

hp_status hp_state_get(const hp_state* state, uint64_t v, int64_t* out) {
    return guarded([&] {
        require(state, out);
        require_vertex(state->state.ball(), v);
        *out = state->state[v];
    });
}

hp_status hp_state_set(hp_state* state, uint64_t v, int64_t grains) {
    return guarded([&] {
        require(state);
        require_vertex(state->state.ball(), v);
        state->state[v] = grains;
    });
}

hp_status hp_state_perturb(hp_state* state, const uint64_t* ids, size_t count) {
    return guarded([&] {
        require(state);
        state->state = perturb(std::move(state->state), id_span(ids, count));
    });
}

hp_status hp_state_mass(const hp_state* state, int64_t* out) {
    return guarded([&] {
        require(state, out);
        *out = mass(state->state);
    });
}

hp_status hp_state_is_stable(const hp_state* state, int* out) {
    return guarded([&] {
        require(state, out);
        *out = is_stable(state->state) ? 1 : 0;
    });
}

hp_status hp_state_equal(const hp_state* a, const hp_state* b, int* out) {
    return guarded([&] {
        require(a, b, out);
        *out = a->state == b->state ? 1 : 0;
    });
}

hp_status hp_odometer_save(const hp_odometer* odometer, const char* path) {
    return guarded([&] {
        require(odometer, path);
        write_text_file(path, serialize_odometer(odometer->odometer));
    });
}

void hp_odometer_free(hp_odometer* odometer) { delete odometer; }

hp_status hp_odometer_get(const hp_odometer* odometer, uint64_t v, uint64_t* out) {
    return guarded([&] {
        require(odometer, out);
        require_vertex(odometer->odometer.ball(), v);
        *out = odometer->odometer[v];
    });
}

hp_status hp_odometer_total(const hp_odometer* odometer, uint64_t* out) {
    return guarded([&] {
        require(odometer, out);
        *out = odometer->odometer.total();
    });
}

hp_status hp_odometer_equal(const hp_odometer* a, const hp_odometer* b, int* out) {
    return guarded([&] {
        require(a, b, out);
        *out = a->odometer == b->odometer ? 1 : 0;
    });
}

hp_status hp_relax(const hp_state* state, hp_relax_method method, hp_state** out_state, hp_odometer** out_odometer,
                   hp_relax_stats* stats) {
    return guarded([&] {
        require(state);
        if (method != HP_RELAX_FIFO && method != HP_RELAX_MULTITOPPLE)
            throw Error(ErrorCode::InvalidArgument, "unknown relax method");
        auto r = relax(state->state, {method == HP_RELAX_FIFO ? RelaxMethod::Fifo : RelaxMethod::MultiTopple});
        auto s = std::make_unique<hp_state>(hp_state{std::move(r.state)});
        auto o = std::make_unique<hp_odometer>(hp_odometer{std::move(r.odometer)});
        if (stats) *stats = {r.stats.topplings, r.stats.dequeues};
        if (out_state) *out_state = s.release();
        if (out_odometer) *out_odometer = o.release();
    });
}

hp_status hp_wave(const hp_state* state, uint64_t source, hp_state** out) {
    return guarded([&] {
        require(state, out);
        *out = nullptr;
        *out = new hp_state{wave(state->state, source)};
    });
}

hp_status hp_wave_relax(const hp_ball* ball, const uint64_t* ids, size_t count, hp_state** out_state,
                        hp_odometer** out_odometer, uint64_t* wave_count) {
    return guarded([&] {
        require(ball);
        auto r = wave_relax(ball->ball, id_span(ids, count));
        auto s = std::make_unique<hp_state>(hp_state{std::move(r.state)});
        auto o = std::make_unique<hp_odometer>(hp_odometer{std::move(r.odometer)});
        if (wave_count) *wave_count = r.wave_count;
        if (out_state) *out_state = s.release();
        if (out_odometer) *out_odometer = o.release();
    });
}

hp_status hp_alpha(const hp_ball* ball, uint32_t s, hp_state** out) {
    return guarded([&] {
        require(ball, out);
        *out = nullptr;
        *out = new hp_state{alpha(s, ball->ball)};
    });
}

hp_status hp_predict_beta(const hp_ball* ball, const uint64_t* ids, size_t count, hp_state** out) {
    return guarded([&] {
        require(ball, out);
        *out = nullptr;
        *out = new hp_state{predicted_beta(ball->ball, id_span(ids, count))};
    });
}

hp_status hp_predict_odometer(const hp_ball* ball, const uint64_t* ids, size_t count, hp_odometer** out) {
    return guarded([&] {
        require(ball, out);
        *out = nullptr;
        *out = new hp_odometer{predicted_odometer(ball->ball, id_span(ids, count))};
    });
}

hp_status hp_random_subset(const hp_ball* ball, size_t k, uint64_t seed, uint64_t* ids, size_t* count) {
    return guarded([&] {
        require(ball, ids, count);
        std::mt19937_64 rng(seed);
        const auto set = harness::random_subset(*ball->ball, k, rng);
        std::copy(set.begin(), set.end(), ids);
        *count = set.size();
    });
}

hp_status hp_embedding_build(const hp_ball* ball, hp_embedding** out) {
    return guarded([&] {
        require(ball, out);
        *out = nullptr;
        *out = new hp_embedding{build_embedding(ball->ball)};
    });
}

void hp_embedding_free(hp_embedding* embedding) { delete embedding; }

hp_status hp_embedding_check(const hp_embedding* embedding, int nearest_neighbors, hp_embedding_report* out) {
    return guarded([&] {
        require(embedding, out);
        const auto r = check_embedding(embedding->embedding, nearest_neighbors != 0);
        *out = {r.max_edge_error,    r.max_angle_error,   r.max_form_residual,
                r.max_klein_radius,  r.interior_vertices, r.nearest_neighbor_mismatches};
    });
}

hp_status hp_embedding_klein(const hp_embedding* embedding, uint64_t v, double* x, double* y) {
    return guarded([&] {
        require(embedding, x, y);
        require_vertex(*embedding->embedding.ball, v);
        const auto k = klein(embedding->embedding.vertex_pos[v]);
        *x = k.x;
        *y = k.y;
    });
}

hp_status hp_embedding_point(const hp_embedding* embedding, uint64_t v, double* x, double* y, double* z) {
    return guarded([&] {
        require(embedding, x, y, z);
        require_vertex(*embedding->embedding.ball, v);
        const auto& p = embedding->embedding.vertex_pos[v];
        *x = p.x;
        *y = p.y;
        *z = p.z;
    });
}

void hp_render_options_init(hp_render_options* options) {
    if (!options) return;
    const RenderOptions defaults;
    *options = {defaults.size_px,        0.0,
                defaults.zoom,           defaults.center_x,
                defaults.center_y,       defaults.draw_primal,
                defaults.draw_dual,      defaults.skip_rim_cells,
                defaults.rim_cutoff,     nullptr,
                0,                       0};
}

hp_status hp_render_svg(const hp_embedding* embedding, const hp_state* state, const hp_render_options* options,
                        const char* path, uint64_t* sentinel_cells) {
    return guarded([&] {
        require(embedding, state, path);
        RenderOptions opts;
        if (options) {
            opts.size_px = options->size_px;
            if (options->homothety < 0.0) throw Error(ErrorCode::InvalidArgument, "homothety ratio must be positive");
            if (options->homothety > 0.0) {
                opts.projection = Projection::Homothety;
                opts.homothety = options->homothety;
            }
            opts.zoom = options->zoom;
            opts.center_x = options->center_x;
            opts.center_y = options->center_y;
            opts.draw_primal = options->draw_primal != 0;
            opts.draw_dual = options->draw_dual != 0;
            opts.skip_rim_cells = options->skip_rim_cells != 0;
            opts.rim_cutoff = options->rim_cutoff;
            if (options->palette_path) opts.palette = Palette::parse(read_text_file(options->palette_path));
            if (options->use_focus) {
                require_vertex(*embedding->embedding.ball, options->focus_vertex);
                opts.focus = embedding->embedding.vertex_pos[options->focus_vertex];
            }
        }
        const auto result = render_state(state->state, embedding->embedding, opts);
        write_text_file(path, result.svg);
        if (sentinel_cells) *sentinel_cells = result.sentinel_cells;
    });
}

hp_status hp_verify_run(const hp_ball* ball, uint32_t m_lo, uint32_t m_hi, uint32_t trials, uint64_t seed,
                        uint32_t threads, hp_line_callback sink, void* user, int* passed) {
    return guarded([&] {
        require(passed);
        harness::VerifyConfig config{m_lo, m_hi, trials, seed, threads, ball ? ball->ball : nullptr};
        *passed = harness::run_verify(config, [&](std::string_view line) {
                      if (!sink) return;
                      const std::string copy(line);
                      sink(copy.c_str(), user);
                  })
                      ? 1
                      : 0;
    });
}

hp_status hp_bench_run(uint32_t m, const hp_bench_method* methods, size_t count, uint32_t repeats, hp_bench_row* rows,
                       hp_bench_summary* summary) {
    return guarded([&] {
        require(summary);
        if (count > 0) require(methods, rows);
        std::vector<harness::BenchMethod> list;
        for (size_t i = 0; i < count; ++i) {
            if (methods[i] < HP_BENCH_NAIVE || methods[i] > HP_BENCH_CLOSED)
                throw Error(ErrorCode::InvalidArgument, "unknown bench method");
            list.push_back(static_cast<harness::BenchMethod>(methods[i]));
        }
        const auto report = harness::run_bench(m, list, repeats);
        for (size_t i = 0; i < count; ++i) {
            const auto& r = report.rows[i];
            rows[i] = {methods[i], r.seconds, r.topplings, r.dequeues, r.predicted_topplings};
        }
        *summary = {report.vertices, report.expected_topplings, report.outputs_agree ? 1 : 0,
                    report.totals_match ? 1 : 0};
    });
}

} // extern "C"
