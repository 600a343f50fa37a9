/*
 * heptapile C API.
 *
 * Opaque handles own their data and are released with the matching *_free
 * function; freeing NULL is a no-op. Every fallible call returns an
 * hp_status; on failure, hp_last_error() describes the problem for the
 * calling thread until its next API call.
 *
 * States and odometers keep a reference to their ball, so a ball may be freed
 * while states built on it are still alive.
 */
#ifndef HEPTAPILE_H
#define HEPTAPILE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HEPTAPILE_BUILDING)
#    define HP_API __declspec(dllexport)
#  else
#    define HP_API __declspec(dllimport)
#  endif
#else
#  define HP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hp_status {
    HP_OK = 0,
    HP_E_INVALID_ARGUMENT = 1,
    HP_E_CAPACITY = 2,
    HP_E_PARSE = 3,
    HP_E_CHECKSUM = 4,
    HP_E_INVARIANT = 5,
    HP_E_IO = 6,
    HP_E_UNSTABLE = 7,
    HP_E_OVERFLOW = 8,
    HP_E_MISMATCH = 9,
    HP_E_BUDGET = 10,
    HP_E_INTERNAL = 99
} hp_status;

typedef struct hp_ball hp_ball;
typedef struct hp_state hp_state;
typedef struct hp_odometer hp_odometer;
typedef struct hp_embedding hp_embedding;

HP_API const char* hp_version(void);
HP_API const char* hp_status_name(hp_status status);
HP_API const char* hp_last_error(void);

/* ---- closed forms ------------------------------------------------------ */

HP_API hp_status hp_fib(uint32_t n, uint64_t* out);
/* first = 7 u_{2m-1}, second = 7 u_{2m-2}; m >= 1 */
HP_API hp_status hp_level_counts(uint32_t m, uint64_t* first, uint64_t* second);
HP_API hp_status hp_ball_size_formula(uint32_t m, uint64_t* out);
HP_API hp_status hp_mass_loss(uint32_t m, uint64_t* out);
/* C_m / |Gamma_m| in lowest terms plus its double value */
HP_API hp_status hp_mass_loss_ratio(uint32_t m, uint64_t* numerator, uint64_t* denominator, double* value);
HP_API hp_status hp_origin_total_topplings(uint32_t m, uint64_t* out);

/* ---- balls ------------------------------------------------------------- */

typedef struct hp_vertex_info {
    uint32_t level;
    uint32_t type; /* 0 origin, 1 first, 2 second */
    uint32_t degree;
    uint32_t boundary_deficit;
} hp_vertex_info;

HP_API hp_status hp_ball_build(uint32_t m, hp_ball** out);
HP_API hp_status hp_ball_load(const char* path, hp_ball** out);
HP_API hp_status hp_ball_parse(const char* text, size_t length, hp_ball** out);
HP_API hp_status hp_ball_save(const hp_ball* ball, const char* path);
HP_API void hp_ball_free(hp_ball* ball);

HP_API uint32_t hp_ball_radius(const hp_ball* ball);
HP_API uint64_t hp_ball_size(const hp_ball* ball);
HP_API hp_status hp_ball_vertex(const hp_ball* ball, uint64_t v, hp_vertex_info* out);
/* Writes up to `capacity` ascending neighbor ids; *count gets the degree. */
HP_API hp_status hp_ball_neighbors(const hp_ball* ball, uint64_t v, uint64_t* ids, size_t capacity, size_t* count);
/* Ids of one level form the contiguous range [begin, end), in ring order. */
HP_API hp_status hp_ball_level_range(const hp_ball* ball, uint32_t level, uint64_t* begin, uint64_t* end);
HP_API hp_status hp_ball_type_tally(const hp_ball* ball, uint32_t level, uint64_t* first, uint64_t* second);
/* Re-runs every structural check; the error text names the broken invariant. */
HP_API hp_status hp_ball_validate(const hp_ball* ball);

/* ---- states and odometers ---------------------------------------------- */

HP_API hp_status hp_state_max_stable(const hp_ball* ball, hp_state** out);
HP_API hp_status hp_state_load(const hp_ball* ball, const char* path, hp_state** out);
HP_API hp_status hp_state_save(const hp_state* state, const char* path);
HP_API hp_status hp_state_clone(const hp_state* state, hp_state** out);
HP_API void hp_state_free(hp_state* state);
HP_API hp_status hp_state_get(const hp_state* state, uint64_t v, int64_t* out);
HP_API hp_status hp_state_set(hp_state* state, uint64_t v, int64_t grains);
/* Adds one grain on each listed vertex (duplicates count once). */
HP_API hp_status hp_state_perturb(hp_state* state, const uint64_t* ids, size_t count);
HP_API hp_status hp_state_mass(const hp_state* state, int64_t* out);
HP_API hp_status hp_state_is_stable(const hp_state* state, int* out);
HP_API hp_status hp_state_equal(const hp_state* a, const hp_state* b, int* out);

HP_API hp_status hp_odometer_save(const hp_odometer* odometer, const char* path);
HP_API void hp_odometer_free(hp_odometer* odometer);
HP_API hp_status hp_odometer_get(const hp_odometer* odometer, uint64_t v, uint64_t* out);
HP_API hp_status hp_odometer_total(const hp_odometer* odometer, uint64_t* out);
HP_API hp_status hp_odometer_equal(const hp_odometer* a, const hp_odometer* b, int* out);

/* ---- dynamics ---------------------------------------------------------- */

typedef enum hp_relax_method { HP_RELAX_FIFO = 0, HP_RELAX_MULTITOPPLE = 1 } hp_relax_method;

typedef struct hp_relax_stats {
    uint64_t topplings;
    uint64_t dequeues;
} hp_relax_stats;

/* Either output pointer may be NULL if the caller does not want it. */
HP_API hp_status hp_relax(const hp_state* state, hp_relax_method method, hp_state** out_state,
                          hp_odometer** out_odometer, hp_relax_stats* stats);
HP_API hp_status hp_wave(const hp_state* state, uint64_t source, hp_state** out);
HP_API hp_status hp_wave_relax(const hp_ball* ball, const uint64_t* ids, size_t count, hp_state** out_state,
                               hp_odometer** out_odometer, uint64_t* wave_count);

/* ---- closed-form predictions ------------------------------------------- */

HP_API hp_status hp_alpha(const hp_ball* ball, uint32_t s, hp_state** out);
HP_API hp_status hp_predict_beta(const hp_ball* ball, const uint64_t* ids, size_t count, hp_state** out);
HP_API hp_status hp_predict_odometer(const hp_ball* ball, const uint64_t* ids, size_t count, hp_odometer** out);

/* k uniform draws over vertex ids, deduplicated and sorted. `ids` must hold
 * k entries; *count receives the number kept. */
HP_API hp_status hp_random_subset(const hp_ball* ball, size_t k, uint64_t seed, uint64_t* ids, size_t* count);

/* ---- geometry and rendering -------------------------------------------- */

typedef struct hp_embedding_report {
    double max_edge_error;
    double max_angle_error;
    double max_form_residual;
    double max_klein_radius;
    uint64_t interior_vertices;
    uint64_t nearest_neighbor_mismatches;
} hp_embedding_report;

HP_API hp_status hp_embedding_build(const hp_ball* ball, hp_embedding** out);
HP_API void hp_embedding_free(hp_embedding* embedding);
HP_API hp_status hp_embedding_check(const hp_embedding* embedding, int nearest_neighbors, hp_embedding_report* out);
/* Klein-disk coordinates of vertex v. */
HP_API hp_status hp_embedding_klein(const hp_embedding* embedding, uint64_t v, double* x, double* y);
/* Hyperboloid coordinates of vertex v (x^2 + y^2 - z^2 = -1, z > 0). */
HP_API hp_status hp_embedding_point(const hp_embedding* embedding, uint64_t v, double* x, double* y, double* z);

typedef struct hp_render_options {
    uint32_t size_px;
    double homothety;     /* 0 for the Klein model; else draw homothety * (x, y) of the hyperboloid */
    double zoom;          /* magnification of the viewport around the center */
    double center_x;
    double center_y;
    int draw_primal;
    int draw_dual;
    int skip_rim_cells;
    double rim_cutoff;
    const char* palette_path; /* NULL for the standard palette */
    int use_focus;            /* nonzero: move focus_vertex to the disk center before projecting */
    uint64_t focus_vertex;
} hp_render_options;

HP_API void hp_render_options_init(hp_render_options* options);
/* Writes the SVG to `path`; *sentinel_cells (optional) counts cells whose
 * value fell outside the palette. */
HP_API hp_status hp_render_svg(const hp_embedding* embedding, const hp_state* state, const hp_render_options* options,
                               const char* path, uint64_t* sentinel_cells);

/* ---- experiment drivers ------------------------------------------------ */

typedef void (*hp_line_callback)(const char* line, void* user);

/* ball may be NULL to build every radius in [m_lo, m_hi]. *passed is 1 iff
 * every check passed. */
HP_API hp_status hp_verify_run(const hp_ball* ball, uint32_t m_lo, uint32_t m_hi, uint32_t trials, uint64_t seed,
                               uint32_t threads, hp_line_callback sink, void* user, int* passed);

typedef enum hp_bench_method {
    HP_BENCH_NAIVE = 0,
    HP_BENCH_MULTITOPPLE = 1,
    HP_BENCH_WAVE = 2,
    HP_BENCH_CLOSED = 3
} hp_bench_method;

typedef struct hp_bench_row {
    hp_bench_method method;
    double seconds;
    uint64_t topplings;
    uint64_t dequeues;
    uint64_t output_topplings; /* odometer total of the method's output */
} hp_bench_row;

typedef struct hp_bench_summary {
    uint64_t vertices;
    uint64_t expected_topplings;
    int outputs_agree;
    int totals_match;
} hp_bench_summary;

/* rows must hold `count` entries, filled in the order of `methods`. */
HP_API hp_status hp_bench_run(uint32_t m, const hp_bench_method* methods, size_t count, uint32_t repeats,
                              hp_bench_row* rows, hp_bench_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* HEPTAPILE_H */
