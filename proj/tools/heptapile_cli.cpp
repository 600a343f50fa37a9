// heptapile command-line front end. Talks to the library only through the C
// API in heptapile.h.
#include <heptapile/heptapile.h>

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(hp_status status, const char* what) {
    if (status != HP_OK)
        throw Failure(std::string(what) + ": " + hp_status_name(status) + ": " + hp_last_error());
}

struct BallFree {
    void operator()(hp_ball* p) const { hp_ball_free(p); }
};
struct StateFree {
    void operator()(hp_state* p) const { hp_state_free(p); }
};
struct OdometerFree {
    void operator()(hp_odometer* p) const { hp_odometer_free(p); }
};
struct EmbeddingFree {
    void operator()(hp_embedding* p) const { hp_embedding_free(p); }
};
using Ball = std::unique_ptr<hp_ball, BallFree>;
using State = std::unique_ptr<hp_state, StateFree>;
using Odometer = std::unique_ptr<hp_odometer, OdometerFree>;
using Embedding = std::unique_ptr<hp_embedding, EmbeddingFree>;

// Either -m or --ball picks the graph.
struct BallSource {
    std::optional<uint32_t> m;
    std::string path;

    void attach(CLI::App* cmd) {
        auto* mo = cmd->add_option("-m,--radius", m, "Build the ball of this radius");
        auto* bo = cmd->add_option("--ball", path, "Load a HEPTABALL file instead");
        mo->excludes(bo);
    }

    Ball load() const {
        hp_ball* raw = nullptr;
        if (!path.empty())
            check(hp_ball_load(path.c_str(), &raw), "loading ball");
        else if (m)
            check(hp_ball_build(*m, &raw), "building ball");
        else
            throw Failure("either -m or --ball is required");
        return Ball(raw);
    }
};

std::vector<uint64_t> parse_id_list(const std::string& text) {
    std::vector<uint64_t> ids;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto token = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (token.empty()) throw Failure("empty entry in vertex list '" + text + "'");
        std::size_t used = 0;
        unsigned long long value = 0;
        try {
            value = std::stoull(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || token.front() == '-') throw Failure("bad vertex id '" + token + "'");
        ids.push_back(value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ids;
}

// "a..b" or a single radius.
std::pair<uint32_t, uint32_t> parse_range(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || s.front() == '-' || value > UINT32_MAX)
            throw Failure("bad radius range '" + text + "'");
        return static_cast<uint32_t>(value);
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const auto m = number(text);
        return {m, m};
    }
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (lo > hi) throw Failure("empty radius range '" + text + "'");
    return {lo, hi};
}

std::pair<double, double> parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Failure("expected x,y but got '" + text + "'");
    try {
        std::size_t a = 0, b = 0;
        const double x = std::stod(text.substr(0, comma), &a);
        const double y = std::stod(text.substr(comma + 1), &b);
        if (a != comma || b != text.size() - comma - 1) throw std::invalid_argument("trailing");
        return {x, y};
    } catch (const std::exception&) {
        throw Failure("expected x,y but got '" + text + "'");
    }
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
    uint32_t m = 0;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    hp_ball* raw = nullptr;
    check(hp_ball_build(a.m, &raw), "building ball");
    Ball ball(raw);
    const std::string out = a.out.empty() ? "gamma_" + std::to_string(a.m) + ".hball" : a.out;
    check(hp_ball_save(ball.get(), out.c_str()), "writing ball");

    bool ok = true;
    std::printf("# gen m=%" PRIu32 " vertices=%" PRIu64 " file=%s\n", a.m, hp_ball_size(ball.get()), out.c_str());
    std::printf("%5s %12s %12s %12s %12s %s\n", "level", "first", "second", "7u(2l-1)", "7u(2l-2)", "match");
    for (uint32_t l = 1; l <= a.m; ++l) {
        uint64_t f = 0, s = 0, ef = 0, es = 0;
        check(hp_ball_type_tally(ball.get(), l, &f, &s), "type tally");
        check(hp_level_counts(l, &ef, &es), "level counts");
        const bool match = f == ef && s == es;
        ok = ok && match;
        std::printf("%5" PRIu32 " %12" PRIu64 " %12" PRIu64 " %12" PRIu64 " %12" PRIu64 " %s\n", l, f, s, ef, es,
                    match ? "yes" : "NO");
    }
    uint64_t expected = 0;
    check(hp_ball_size_formula(a.m, &expected), "ball size");
    ok = ok && expected == hp_ball_size(ball.get());
    std::printf("total %" PRIu64 " (7u(2m+1)-6 = %" PRIu64 ") %s\n", hp_ball_size(ball.get()), expected,
                ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

// ---- relax ----------------------------------------------------------------

struct RelaxArgs {
    BallSource source;
    std::optional<std::string> p;
    std::optional<std::size_t> p_random;
    bool p_origin = false;
    uint64_t seed = 1;
    std::string method = "fifo";
    bool verify = false;
    std::string state_out;
    std::string odometer_out;
};

std::vector<uint64_t> perturbation(const RelaxArgs& a, const hp_ball* ball) {
    if (a.p_origin) return {0};
    if (a.p_random) {
        if (*a.p_random == 0) throw Failure("--p-random needs k >= 1");
        std::vector<uint64_t> ids(*a.p_random);
        std::size_t count = 0;
        check(hp_random_subset(ball, ids.size(), a.seed, ids.data(), &count), "drawing P");
        ids.resize(count);
        return ids;
    }
    if (!a.p) throw Failure("one of --p, --p-random or --p-origin is required");
    if (a.p->empty()) throw Failure("the perturbation set P must be non-empty");
    return parse_id_list(*a.p);
}

int cmd_relax(const RelaxArgs& a) {
    Ball ball = a.source.load();
    const auto ids = perturbation(a, ball.get());
    const uint32_t m = hp_ball_radius(ball.get());
    const uint64_t n = hp_ball_size(ball.get());

    hp_state* raw = nullptr;
    check(hp_state_max_stable(ball.get(), &raw), "building the maximal stable state");
    State initial(raw);
    check(hp_state_perturb(initial.get(), ids.data(), ids.size()), "perturbing");

    hp_relax_method method = HP_RELAX_FIFO;
    if (a.method == "multitopple")
        method = HP_RELAX_MULTITOPPLE;
    else if (a.method != "fifo")
        throw Failure("unknown relax method '" + a.method + "'");

    hp_state* out_state = nullptr;
    hp_odometer* out_odo = nullptr;
    hp_relax_stats stats{};
    check(hp_relax(initial.get(), method, &out_state, &out_odo, &stats), "relaxing");
    State final_state(out_state);
    Odometer odometer(out_odo);

    int64_t before = 0, after = 0;
    check(hp_state_mass(initial.get(), &before), "mass");
    check(hp_state_mass(final_state.get(), &after), "mass");
    const int64_t loss = before - after;

    const std::string state_path = a.state_out.empty() ? "relaxed_m" + std::to_string(m) + ".hs" : a.state_out;
    const std::string odo_path = a.odometer_out.empty() ? "odometer_m" + std::to_string(m) + ".ho" : a.odometer_out;
    check(hp_state_save(final_state.get(), state_path.c_str()), "writing state");
    check(hp_odometer_save(odometer.get(), odo_path.c_str()), "writing odometer");

    std::printf("# relax m=%" PRIu32 " vertices=%" PRIu64 " method=%s seed=%" PRIu64 " |P|=%zu\n", m, n,
                a.method.c_str(), a.seed, ids.size());
    std::printf("P =");
    for (std::size_t i = 0; i < ids.size() && i < 32; ++i) std::printf(" %" PRIu64, ids[i]);
    std::printf(ids.size() > 32 ? " ...\n" : "\n");
    std::printf("mass before   %" PRId64 "\n", before);
    std::printf("mass after    %" PRId64 "\n", after);
    std::printf("loss          %" PRId64 "\n", loss);
    std::printf("loss/|Gamma|  %.9f\n", static_cast<double>(loss) / static_cast<double>(n));
    std::printf("topplings     %" PRIu64 " (dequeues %" PRIu64 ")\n", stats.topplings, stats.dequeues);
    std::printf("state -> %s\nodometer -> %s\n", state_path.c_str(), odo_path.c_str());

    if (!a.verify) return 0;

    hp_odometer* predicted_odo = nullptr;
    hp_state* predicted_state = nullptr;
    check(hp_predict_odometer(ball.get(), ids.data(), ids.size(), &predicted_odo), "predicting odometer");
    Odometer po(predicted_odo);
    check(hp_predict_beta(ball.get(), ids.data(), ids.size(), &predicted_state), "predicting final state");
    State ps(predicted_state);
    uint64_t expected_loss = 0;
    check(hp_mass_loss(m, &expected_loss), "mass loss formula");

    int odo_ok = 0, state_ok = 0;
    check(hp_odometer_equal(odometer.get(), po.get(), &odo_ok), "comparing odometers");
    check(hp_state_equal(final_state.get(), ps.get(), &state_ok), "comparing states");
    const bool loss_ok = loss >= 0 && static_cast<uint64_t>(loss) == expected_loss;
    std::printf("odometer vs formula   %s\n", odo_ok ? "PASS" : "FAIL");
    std::printf("state vs alpha        %s\n", state_ok ? "PASS" : "FAIL");
    std::printf("loss vs C_m=%-9" PRIu64 " %s\n", expected_loss, loss_ok ? "PASS" : "FAIL");
    const bool ok = odo_ok && state_ok && loss_ok;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
    std::string range = "1..6";
    std::string ball_path;
    uint32_t trials = 10;
    uint64_t seed = 7;
    uint32_t threads = 0;
};

int cmd_verify(const VerifyArgs& a) {
    Ball ball;
    uint32_t lo = 0, hi = 0;
    if (!a.ball_path.empty()) {
        hp_ball* raw = nullptr;
        const hp_status st = hp_ball_load(a.ball_path.c_str(), &raw);
        if (st != HP_OK) {
            std::printf("# verify ball=%s seed=%" PRIu64 "\n", a.ball_path.c_str(), a.seed);
            std::printf("load: FAIL (%s: %s)\n", hp_status_name(st), hp_last_error());
            std::printf("FAIL\n");
            return 1;
        }
        ball.reset(raw);
    } else {
        std::tie(lo, hi) = parse_range(a.range);
    }

    int passed = 0;
    auto sink = [](const char* line, void*) { std::printf("%s\n", line); };
    check(hp_verify_run(ball.get(), lo, hi, a.trials, a.seed, a.threads, sink, nullptr, &passed), "verify");
    std::fflush(stdout);
    return passed ? 0 : 1;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string range = "10";
    std::string methods = "naive,multitopple,wave,closed";
    uint32_t repeats = 1;
    bool csv = false;
};

hp_bench_method parse_method(const std::string& name) {
    if (name == "naive") return HP_BENCH_NAIVE;
    if (name == "multitopple") return HP_BENCH_MULTITOPPLE;
    if (name == "wave") return HP_BENCH_WAVE;
    if (name == "closed") return HP_BENCH_CLOSED;
    throw Failure("unknown bench method '" + name + "'");
}

const char* method_name(hp_bench_method m) {
    switch (m) {
    case HP_BENCH_NAIVE: return "naive";
    case HP_BENCH_MULTITOPPLE: return "multitopple";
    case HP_BENCH_WAVE: return "wave";
    case HP_BENCH_CLOSED: return "closed";
    }
    return "?";
}

int cmd_bench(const BenchArgs& a) {
    const auto [lo, hi] = parse_range(a.range);
    std::vector<hp_bench_method> methods;
    std::size_t pos = 0;
    while (true) {
        const auto comma = a.methods.find(',', pos);
        methods.push_back(parse_method(a.methods.substr(pos, comma == std::string::npos ? comma : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }

    bool ok = true;
    if (a.csv) std::printf("m,vertices,method,seconds,topplings,dequeues,output_topplings,expected_topplings\n");
    for (uint32_t m = lo; m <= hi; ++m) {
        std::vector<hp_bench_row> rows(methods.size());
        hp_bench_summary summary{};
        check(hp_bench_run(m, methods.data(), methods.size(), a.repeats, rows.data(), &summary), "bench");
        if (!summary.outputs_agree || !summary.totals_match) {
            std::fprintf(stderr, "bench m=%" PRIu32 ": methods disagree (outputs %s, totals %s); no timings reported\n",
                         m, summary.outputs_agree ? "agree" : "differ", summary.totals_match ? "match" : "differ");
            ok = false;
            continue;
        }
        if (a.csv) {
            for (const auto& r : rows)
                std::printf("%" PRIu32 ",%" PRIu64 ",%s,%.6f,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n", m,
                            summary.vertices, method_name(r.method), r.seconds, r.topplings, r.dequeues,
                            r.output_topplings, summary.expected_topplings);
            continue;
        }
        std::printf("# bench m=%" PRIu32 " vertices=%" PRIu64 " input=phi+delta_O repeats=%" PRIu32
                    " expected_topplings=%" PRIu64 "\n",
                    m, summary.vertices, a.repeats, summary.expected_topplings);
        std::printf("%-12s %14s %14s %14s %16s\n", "method", "seconds", "topplings", "dequeues", "odometer_total");
        for (const auto& r : rows)
            std::printf("%-12s %14.6f %14" PRIu64 " %14" PRIu64 " %16" PRIu64 "\n", method_name(r.method), r.seconds,
                        r.topplings, r.dequeues, r.output_topplings);
        std::printf("outputs byte-identical: yes; totals match closed sum: yes\n");
    }
    return ok ? 0 : 1;
}

// ---- render ---------------------------------------------------------------

struct RenderArgs {
    BallSource source;
    std::string state_path;
    bool beta_origin = false;
    std::optional<uint32_t> wave;
    std::optional<uint32_t> alpha;
    std::optional<double> homothety;
    double zoom = 1.0;
    std::string center;
    std::optional<uint64_t> center_vertex;
    std::optional<uint64_t> focus;
    std::string palette;
    bool primal = false;
    bool no_dual = false;
    bool skip_rim = false;
    uint32_t size = 800;
    std::string out;
    std::string save_state;
};

int cmd_render(const RenderArgs& a) {
    Ball ball = a.source.load();
    const uint32_t m = hp_ball_radius(ball.get());

    State state;
    hp_state* raw = nullptr;
    std::string label;
    if (!a.state_path.empty()) {
        check(hp_state_load(ball.get(), a.state_path.c_str(), &raw), "loading state");
        state.reset(raw);
        label = a.state_path;
    } else if (a.beta_origin) {
        const uint64_t origin = 0;
        check(hp_predict_beta(ball.get(), &origin, 1, &raw), "predicting final state");
        state.reset(raw);
        label = "beta_O";
    } else if (a.wave) {
        check(hp_state_max_stable(ball.get(), &raw), "maximal stable state");
        state.reset(raw);
        for (uint32_t k = 0; k < *a.wave; ++k) {
            hp_state* next = nullptr;
            check(hp_wave(state.get(), 0, &next), "wave");
            state.reset(next);
        }
        label = "W_O^" + std::to_string(*a.wave) + " phi";
    } else if (a.alpha) {
        check(hp_alpha(ball.get(), *a.alpha, &raw), "alpha");
        state.reset(raw);
        label = "alpha_" + std::to_string(*a.alpha);
    } else {
        check(hp_state_max_stable(ball.get(), &raw), "maximal stable state");
        state.reset(raw);
        label = "phi";
    }
    if (!a.save_state.empty()) check(hp_state_save(state.get(), a.save_state.c_str()), "writing state");

    hp_embedding* emb_raw = nullptr;
    check(hp_embedding_build(ball.get(), &emb_raw), "embedding");
    Embedding embedding(emb_raw);

    hp_render_options options;
    hp_render_options_init(&options);
    options.size_px = a.size;
    options.homothety = a.homothety ? *a.homothety : 0.0;
    options.zoom = a.zoom;
    options.draw_primal = a.primal ? 1 : 0;
    options.draw_dual = a.no_dual ? 0 : 1;
    options.skip_rim_cells = a.skip_rim ? 1 : 0;
    options.palette_path = a.palette.empty() ? nullptr : a.palette.c_str();
    if (a.focus) {
        options.use_focus = 1;
        options.focus_vertex = *a.focus;
    }
    if (!a.center.empty()) {
        std::tie(options.center_x, options.center_y) = parse_point(a.center);
    } else if (a.center_vertex) {
        double x = 0, y = 0, z = 1;
        check(hp_embedding_point(embedding.get(), *a.center_vertex, &x, &y, &z), "center vertex");
        if (a.homothety) {
            options.center_x = *a.homothety * x;
            options.center_y = *a.homothety * y;
        } else {
            options.center_x = x / z;
            options.center_y = y / z;
        }
    }

    const std::string out = a.out.empty() ? "render_m" + std::to_string(m) + ".svg" : a.out;
    uint64_t sentinel = 0;
    check(hp_render_svg(embedding.get(), state.get(), &options, out.c_str(), &sentinel), "rendering");
    const std::string projection = a.homothety ? "homothety " + std::to_string(*a.homothety) : "klein";
    const std::string focus = a.focus ? " focus=v" + std::to_string(*a.focus) : "";
    std::printf("# render m=%" PRIu32 " state=%s projection=%s%s zoom=%g center=%.6f,%.6f -> %s\n", m, label.c_str(),
                projection.c_str(), focus.c_str(), a.zoom, options.center_x, options.center_y, out.c_str());
    if (sentinel > 0)
        std::fprintf(stderr, "warning: %" PRIu64 " cells hold values outside [-1, 7]; drawn in the sentinel color\n",
                     sentinel);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sandpiles on the order-7 triangular tiling of the hyperbolic plane"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hp_version()));

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Build a ball and write it as a HEPTABALL file");
    g->add_option("-m,--radius", gen.m, "Radius")->required();
    g->add_option("-o,--out", gen.out, "Output path (default gamma_<m>.hball)");

    RelaxArgs relax;
    auto* r = app.add_subcommand("relax", "Relax the maximal stable state plus one grain on each vertex of P");
    relax.source.attach(r);
    auto* p_list = r->add_option("--p", relax.p, "Comma-separated vertex ids");
    auto* p_rand = r->add_option("--p-random", relax.p_random, "Draw P from k uniform ids");
    auto* p_orig = r->add_flag("--p-origin", relax.p_origin, "P = {O}");
    p_list->excludes(p_rand)->excludes(p_orig);
    p_rand->excludes(p_orig);
    r->add_option("--seed", relax.seed, "Seed for --p-random")->capture_default_str();
    r->add_option("--method", relax.method, "fifo or multitopple")->capture_default_str();
    r->add_flag("--verify", relax.verify, "Compare against the closed-form predictions");
    r->add_option("--state-out", relax.state_out, "Final state path");
    r->add_option("--odometer-out", relax.odometer_out, "Odometer path");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check every closed form against brute-force relaxation");
    auto* vm = v->add_option("-m,--m", verify.range, "Radius or range a..b")->capture_default_str();
    v->add_option("--ball", verify.ball_path, "Verify this HEPTABALL file instead")->excludes(vm);
    v->add_option("--trials", verify.trials, "Perturbation sets per radius")->capture_default_str();
    v->add_option("--seed", verify.seed, "Seed")->capture_default_str();
    v->add_option("--threads", verify.threads, "Worker cap (0 = HEPTAPILE_THREADS or all cores)");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Time relaxation methods on the maximal stable state plus a grain at O");
    b->add_option("-m,--m", bench.range, "Radius or range a..b")->capture_default_str();
    b->add_option("--method", bench.methods, "Comma list of naive, multitopple, wave, closed")->capture_default_str();
    b->add_option("--repeats", bench.repeats, "Timing repeats (best is reported)")->capture_default_str();
    b->add_flag("--csv", bench.csv, "CSV output");

    RenderArgs render;
    auto* d = app.add_subcommand("render", "Draw a state on the dual heptagonal tiling as SVG");
    render.source.attach(d);
    auto* s_file = d->add_option("--state", render.state_path, "HEPTASTATE file");
    auto* s_beta = d->add_flag("--beta-origin", render.beta_origin, "Predicted final state for P = {O}");
    auto* s_wave = d->add_option("--wave", render.wave, "k waves from O applied to the maximal stable state");
    auto* s_alpha = d->add_option("--alpha", render.alpha, "Universal state alpha_s");
    s_file->excludes(s_beta)->excludes(s_wave)->excludes(s_alpha);
    s_beta->excludes(s_wave)->excludes(s_alpha);
    s_wave->excludes(s_alpha);
    d->add_option("--homothety", render.homothety,
                  "Draw ratio * (x, y) of the hyperboloid instead of the Klein disk")
        ->check(CLI::PositiveNumber);
    d->add_option("--zoom", render.zoom, "Magnify the picture around the center")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* c_pt = d->add_option("--center", render.center, "Center x,y of the viewport in picture coordinates");
    auto* c_v = d->add_option("--center-vertex", render.center_vertex, "Center the zoom on this vertex")->excludes(c_pt);
    d->add_option("--focus", render.focus, "Move this vertex to the disk center by an isometry, then project")
        ->excludes(c_pt)
        ->excludes(c_v);
    d->add_option("--palette", render.palette, "Palette file of value=#rrggbb lines");
    d->add_flag("--primal", render.primal, "Draw the triangulation edges");
    d->add_flag("--no-dual", render.no_dual, "Omit heptagon outlines");
    d->add_flag("--skip-rim", render.skip_rim, "Skip sub-pixel cells near the ideal boundary");
    d->add_option("--size", render.size, "Width and height in pixels")->capture_default_str();
    d->add_option("-o,--out", render.out, "Output path (default render_m<m>.svg)");
    d->add_option("--save-state", render.save_state, "Also write the rendered state");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) return cmd_gen(gen);
        if (*r) return cmd_relax(relax);
        if (*v) return cmd_verify(verify);
        if (*b) return cmd_bench(bench);
        if (*d) return cmd_render(render);
    } catch (const Failure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
