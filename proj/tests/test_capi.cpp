#include <doctest.h>

#include <heptapile/heptapile.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string temp_path(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / "heptapile_test_capi";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("closed forms through the C API") {
    uint64_t a = 0, b = 0;
    CHECK(hp_fib(10, &a) == HP_OK);
    CHECK(a == 55);
    CHECK(hp_level_counts(3, &a, &b) == HP_OK);
    CHECK(a == 7 * 5);
    CHECK(b == 7 * 3);
    CHECK(hp_ball_size_formula(10, &a) == HP_OK);
    CHECK(a == 76616);
    CHECK(hp_mass_loss(1, &a) == HP_OK);
    CHECK(a == 28);
    double value = 0;
    CHECK(hp_mass_loss_ratio(10, &a, &b, &value) == HP_OK);
    CHECK(value == doctest::Approx(171332.0 / 76616.0));
    CHECK(hp_origin_total_topplings(10, &a) == HP_OK);
    CHECK(a == 123911);
}

TEST_CASE("errors carry a status and a message") {
    hp_ball* ball = reinterpret_cast<hp_ball*>(1);
    CHECK(hp_ball_build(64, &ball) == HP_E_CAPACITY);
    CHECK(ball == nullptr);
    CHECK(std::strlen(hp_last_error()) > 0);
    CHECK(std::string(hp_status_name(HP_E_CAPACITY)) == "capacity");

    uint64_t x = 0;
    CHECK(hp_fib(94, &x) == HP_E_OVERFLOW);
    CHECK(hp_fib(3, nullptr) == HP_E_INVALID_ARGUMENT);
    CHECK(hp_fib(3, &x) == HP_OK);
    CHECK(std::string(hp_last_error()).empty());
    CHECK(hp_ball_load(temp_path("nope.hball").c_str(), &ball) == HP_E_IO);

    hp_ball_free(nullptr);
    hp_state_free(nullptr);
    hp_odometer_free(nullptr);
    hp_embedding_free(nullptr);
}

TEST_CASE("balls, states and relaxation") {
    hp_ball* ball = nullptr;
    REQUIRE(hp_ball_build(2, &ball) == HP_OK);
    CHECK(hp_ball_radius(ball) == 2);
    CHECK(hp_ball_size(ball) == 29);
    CHECK(hp_ball_validate(ball) == HP_OK);

    hp_vertex_info info{};
    CHECK(hp_ball_vertex(ball, 28, &info) == HP_OK);
    CHECK(info.level == 2);
    CHECK(info.type == 2);
    CHECK(info.degree + info.boundary_deficit == 7);
    CHECK(hp_ball_vertex(ball, 29, &info) == HP_E_INVALID_ARGUMENT);

    uint64_t ids[7];
    size_t count = 0;
    CHECK(hp_ball_neighbors(ball, 0, ids, 7, &count) == HP_OK);
    CHECK(count == 7);
    CHECK(ids[6] == 7);
    uint64_t begin = 0, end = 0;
    CHECK(hp_ball_level_range(ball, 2, &begin, &end) == HP_OK);
    CHECK(begin == 8);
    CHECK(end == 29);

    hp_state* phi = nullptr;
    REQUIRE(hp_state_max_stable(ball, &phi) == HP_OK);
    const uint64_t origin = 0;
    CHECK(hp_state_perturb(phi, &origin, 1) == HP_OK);
    int64_t mass = 0;
    CHECK(hp_state_mass(phi, &mass) == HP_OK);
    CHECK(mass == 29 * 6 + 1);

    hp_state* final_state = nullptr;
    hp_odometer* odo = nullptr;
    hp_relax_stats stats{};
    REQUIRE(hp_relax(phi, HP_RELAX_FIFO, &final_state, &odo, &stats) == HP_OK);
    uint64_t total = 0;
    CHECK(hp_odometer_total(odo, &total) == HP_OK);
    CHECK(total == stats.topplings);
    CHECK(total == 38);

    hp_state* beta = nullptr;
    hp_odometer* predicted = nullptr;
    REQUIRE(hp_predict_beta(ball, &origin, 1, &beta) == HP_OK);
    REQUIRE(hp_predict_odometer(ball, &origin, 1, &predicted) == HP_OK);
    int same = 0;
    CHECK(hp_state_equal(final_state, beta, &same) == HP_OK);
    CHECK(same == 1);
    CHECK(hp_odometer_equal(odo, predicted, &same) == HP_OK);
    CHECK(same == 1);

    hp_state* waved = nullptr;
    hp_odometer* wodo = nullptr;
    uint64_t waves = 0;
    REQUIRE(hp_wave_relax(ball, &origin, 1, &waved, &wodo, &waves) == HP_OK);
    CHECK(waves == 3);
    CHECK(hp_state_equal(waved, beta, &same) == HP_OK);
    CHECK(same == 1);
    CHECK(hp_wave_relax(ball, nullptr, 0, &waved, &wodo, &waves) == HP_E_INVALID_ARGUMENT);

    int stable = 0;
    CHECK(hp_state_is_stable(phi, &stable) == HP_OK);
    CHECK(stable == 0);
    hp_state* w = nullptr;
    CHECK(hp_wave(phi, 0, &w) == HP_E_UNSTABLE);

    // The ball handle can go before the states that share it.
    hp_ball_free(ball);
    int64_t g = -1;
    CHECK(hp_state_get(final_state, 0, &g) == HP_OK);
    CHECK(g == 0);
    CHECK(hp_state_set(final_state, 0, 4) == HP_OK);
    CHECK(hp_state_get(final_state, 0, &g) == HP_OK);
    CHECK(g == 4);

    hp_state_free(phi);
    hp_state_free(final_state);
    hp_state_free(beta);
    hp_state_free(waved);
    hp_odometer_free(odo);
    hp_odometer_free(predicted);
    hp_odometer_free(wodo);
}

TEST_CASE("files through the C API") {
    hp_ball* ball = nullptr;
    REQUIRE(hp_ball_build(3, &ball) == HP_OK);
    const auto ball_path = temp_path("g3.hball");
    CHECK(hp_ball_save(ball, ball_path.c_str()) == HP_OK);
    hp_ball* back = nullptr;
    REQUIRE(hp_ball_load(ball_path.c_str(), &back) == HP_OK);
    CHECK(hp_ball_size(back) == 85);

    auto text = slurp(ball_path);
    text[text.find("\n5 1 1 0") + 1] = '6';
    hp_ball* broken = nullptr;
    CHECK(hp_ball_parse(text.data(), text.size(), &broken) != HP_OK);
    CHECK(broken == nullptr);

    hp_state* phi = nullptr;
    REQUIRE(hp_state_max_stable(back, &phi) == HP_OK);
    const auto state_path = temp_path("phi.hs");
    CHECK(hp_state_save(phi, state_path.c_str()) == HP_OK);
    CHECK(slurp(state_path) == "HEPTASTATE v1 m=3 n=85 default=6\nEND\n");
    hp_state* loaded = nullptr;
    REQUIRE(hp_state_load(ball, state_path.c_str(), &loaded) == HP_OK);
    int same = 0;
    CHECK(hp_state_equal(phi, loaded, &same) == HP_OK);
    CHECK(same == 1);

    hp_ball* small = nullptr;
    REQUIRE(hp_ball_build(2, &small) == HP_OK);
    hp_state* wrong = nullptr;
    CHECK(hp_state_load(small, state_path.c_str(), &wrong) == HP_E_MISMATCH);

    hp_embedding* emb = nullptr;
    REQUIRE(hp_embedding_build(ball, &emb) == HP_OK);
    hp_embedding_report report{};
    CHECK(hp_embedding_check(emb, 1, &report) == HP_OK);
    CHECK(report.nearest_neighbor_mismatches == 0);
    CHECK(report.max_edge_error < 1e-9);
    hp_render_options opts;
    hp_render_options_init(&opts);
    CHECK(opts.size_px == 800);
    const auto svg_path = temp_path("phi.svg");
    uint64_t sentinel = 7;
    CHECK(hp_render_svg(emb, phi, &opts, svg_path.c_str(), &sentinel) == HP_OK);
    CHECK(sentinel == 0);
    CHECK(slurp(svg_path).find("<polygon id=\"v84\"") != std::string::npos);

    double x = 0, y = 0, z = 0;
    CHECK(hp_embedding_point(emb, 1, &x, &y, &z) == HP_OK);
    CHECK(x == doctest::Approx(std::sqrt(z * z - 1.0)));
    CHECK(y == doctest::Approx(0.0));
    CHECK(z == doctest::Approx(1.65597).epsilon(1e-5));
    CHECK(hp_embedding_point(emb, 85, &x, &y, &z) == HP_E_INVALID_ARGUMENT);
    opts.use_focus = 1;
    opts.focus_vertex = 40;
    CHECK(hp_render_svg(emb, phi, &opts, svg_path.c_str(), nullptr) == HP_OK);
    CHECK(slurp(svg_path).find(" focus=") != std::string::npos);
    opts.focus_vertex = 85;
    CHECK(hp_render_svg(emb, phi, &opts, svg_path.c_str(), nullptr) == HP_E_INVALID_ARGUMENT);

    hp_embedding_free(emb);
    hp_state_free(phi);
    hp_state_free(loaded);
    hp_ball_free(ball);
    hp_ball_free(back);
    hp_ball_free(small);
    std::filesystem::remove_all(std::filesystem::temp_directory_path() / "heptapile_test_capi");
}

TEST_CASE("random subsets are reproducible") {
    hp_ball* ball = nullptr;
    REQUIRE(hp_ball_build(4, &ball) == HP_OK);
    std::vector<uint64_t> a(6), b(6);
    size_t na = 0, nb = 0;
    CHECK(hp_random_subset(ball, 6, 99, a.data(), &na) == HP_OK);
    CHECK(hp_random_subset(ball, 6, 99, b.data(), &nb) == HP_OK);
    CHECK(na == nb);
    CHECK(na >= 1);
    CHECK(std::vector<uint64_t>(a.begin(), a.begin() + na) == std::vector<uint64_t>(b.begin(), b.begin() + nb));
    for (size_t i = 1; i < na; ++i) CHECK(a[i - 1] < a[i]);
    hp_ball_free(ball);
}

TEST_CASE("verify and bench drivers") {
    std::vector<std::string> lines;
    int passed = 0;
    auto sink = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); };
    REQUIRE(hp_verify_run(nullptr, 1, 3, 4, 7, 1, sink, &lines, &passed) == HP_OK);
    CHECK(passed == 1);
    REQUIRE(!lines.empty());
    CHECK(lines.front().find("seed=7") != std::string::npos);
    CHECK(lines.back().find("PASS") != std::string::npos);

    const hp_bench_method methods[] = {HP_BENCH_NAIVE, HP_BENCH_MULTITOPPLE, HP_BENCH_WAVE, HP_BENCH_CLOSED};
    hp_bench_row rows[4];
    hp_bench_summary summary{};
    REQUIRE(hp_bench_run(5, methods, 4, 1, rows, &summary) == HP_OK);
    CHECK(summary.outputs_agree == 1);
    CHECK(summary.totals_match == 1);
    CHECK(summary.vertices == 617);
    CHECK(rows[3].topplings == 0);
    CHECK(rows[1].dequeues <= rows[0].dequeues);
    for (const auto& r : rows) CHECK(r.output_topplings == summary.expected_topplings);
}
