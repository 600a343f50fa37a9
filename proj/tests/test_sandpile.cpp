#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include "heptapile/error.hpp"
#include "heptapile/sandpile.hpp"
#include "oracles.hpp"

using namespace heptapile;

namespace {

ErrorCode code_of(auto&& body) {
    try {
        body();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

State random_state(const BallPtr& ball, std::mt19937_64& rng, std::int64_t hi) {
    std::uniform_int_distribution<std::int64_t> g(0, hi);
    State s(ball);
    for (VertexId v = 0; v < ball->size(); ++v) s[v] = g(rng);
    return s;
}

} // namespace

TEST_CASE("hand example on the radius-1 ball") {
    const auto ball = build_ball(1);
    const VertexId origin = 0;
    const State start = perturb(max_stable(ball), {&origin, 1});
    CHECK(mass(start) == 49);

    const auto r = relax(start);
    CHECK(r.state[0] == 0);
    for (VertexId v = 1; v <= 7; ++v) {
        CHECK(r.state[v] == 3);
        CHECK(r.odometer[v] == 1);
    }
    CHECK(r.odometer[0] == 2);
    CHECK(mass(r.state) == 21);
    CHECK(mass(start) - mass(r.state) == 28);
    CHECK(r.stats.topplings == 9);
}

TEST_CASE("radius-2 odometer from the origin is 3, 2, 1 by level") {
    const auto ball = build_ball(2);
    const VertexId origin = 0;
    const auto r = relax(perturb(max_stable(ball), {&origin, 1}));
    for (VertexId v = 0; v < ball->size(); ++v) CHECK(r.odometer[v] == 3 - ball->level(v));
    CHECK(mass(perturb(max_stable(ball), {&origin, 1})) - mass(r.state) == 77);
}

TEST_CASE("relax agrees with an independent sweep relaxation") {
    std::mt19937_64 rng(11);
    for (Level m : {2u, 3u, 4u}) {
        const auto ball = build_ball(m);
        for (int trial = 0; trial < 8; ++trial) {
            const auto s = random_state(ball, rng, trial % 2 ? 13 : 40);
            const auto ref = oracle::sweep_relax(*ball, {s.grains().begin(), s.grains().end()});
            for (auto method : {RelaxMethod::Fifo, RelaxMethod::MultiTopple}) {
                const auto r = relax(s, {method});
                CHECK(std::equal(ref.grains.begin(), ref.grains.end(), r.state.grains().begin()));
                CHECK(std::equal(ref.odometer.begin(), ref.odometer.end(), r.odometer.counts().begin()));
                CHECK(is_stable(r.state));
                CHECK(r.stats.topplings == r.odometer.total());
                CHECK(apply_odometer(s, r.odometer) == r.state);
                CHECK(static_cast<std::uint64_t>(mass(s) - mass(r.state)) == boundary_outflow(r.odometer));
            }
            CHECK(relax(s, {RelaxMethod::MultiTopple}).stats.dequeues <= relax(s).stats.dequeues);
        }
    }
}

TEST_CASE("toppling primitives") {
    const auto ball = build_ball(1);
    const auto delta = laplacian_delta(*ball, 0);
    REQUIRE(delta.size() == 8);
    CHECK(delta.front() == GrainDelta{0, -7});
    std::int64_t net = 0;
    for (const auto& d : delta) net += d.delta;
    CHECK(net == 0); // origin has all 7 neighbors inside
    // A boundary vertex loses grains through its deficit.
    net = 0;
    for (const auto& d : laplacian_delta(*ball, 1)) net += d.delta;
    CHECK(net == -4);

    State s(ball, 6);
    CHECK(is_stable(s));
    CHECK_FALSE(is_legal(s, 0));
    s[0] = 7;
    CHECK(is_legal(s, 0));
    CHECK_FALSE(is_stable(s));
    const auto t = topple(s, 0);
    CHECK(t[0] == 0);
    CHECK(t[3] == 7);
    State u = s;
    topple_in_place(u, 0, 2);
    CHECK(u[0] == -7);
    CHECK(u[5] == 8);
}

TEST_CASE("relax rejects bad input") {
    const auto ball = build_ball(2);
    State neg(ball, 3);
    neg[4] = -1;
    CHECK(code_of([&] { relax(neg); }) == ErrorCode::InvalidArgument);

    State big(ball, 60);
    CHECK(code_of([&] { relax(big, {RelaxMethod::Fifo, 5}); }) == ErrorCode::Budget);

    State huge(ball, std::numeric_limits<std::int64_t>::max() / 2);
    CHECK(code_of([&] { mass(huge); }) == ErrorCode::Overflow);
}

TEST_CASE("vertex sets") {
    const auto ball = build_ball(2);
    const std::vector<VertexId> raw{5, 3, 5, 0};
    CHECK(normalize_set(*ball, raw) == std::vector<VertexId>{0, 3, 5});
    const std::vector<VertexId> outside{29};
    CHECK(code_of([&] { normalize_set(*ball, outside); }) == ErrorCode::InvalidArgument);
    const auto p = perturb(State(ball), raw);
    CHECK(p[5] == 1);
    CHECK(mass(p) == 3);
    CHECK(perturb(State(ball, 2), {}) == State(ball, 2));
}

TEST_CASE("state text format") {
    const auto ball = build_ball(3);
    const auto phi = serialize_state(max_stable(ball));
    CHECK(phi == "HEPTASTATE v1 m=3 n=85 default=6\nEND\n");

    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const auto s = random_state(ball, rng, 9);
        CHECK(deserialize_state(ball, serialize_state(s)) == s);
        const auto r = relax(s);
        CHECK(deserialize_odometer(ball, serialize_odometer(r.odometer)) == r.odometer);
        CHECK(serialize_odometer(r.odometer).rfind("HEPTAODOM v1 m=3 n=85 default=", 0) == 0);
    }

    State neg(ball, 0);
    neg[7] = -1;
    CHECK(deserialize_state(ball, serialize_state(neg)) == neg);

    const auto other = build_ball(2);
    CHECK(code_of([&] { deserialize_state(other, phi); }) == ErrorCode::Mismatch);
    CHECK(code_of([&] { deserialize_state(ball, "HEPTASTATE v1 m=3 n=85 default=6\n"); }) == ErrorCode::Parse);
    CHECK(code_of([&] { deserialize_state(ball, "HEPTASTATE v1 m=3 n=85 default=6\n4 1\n4 2\nEND\n"); }) ==
          ErrorCode::Parse);
    CHECK(code_of([&] { deserialize_state(ball, "HEPTASTATE v1 m=3 n=85 default=6\n85 1\nEND\n"); }) ==
          ErrorCode::Parse);
    CHECK(code_of([&] { deserialize_odometer(ball, phi); }) == ErrorCode::Parse);
}

TEST_CASE("text files") {
    const auto dir = std::filesystem::temp_directory_path() / "heptapile_test_sandpile";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "phi.hs").string();
    const auto ball = build_ball(2);
    write_text_file(path, serialize_state(max_stable(ball)));
    CHECK(deserialize_state(ball, read_text_file(path)) == max_stable(ball));
    CHECK(code_of([&] { read_text_file((dir / "missing.hs").string()); }) == ErrorCode::Io);
    CHECK(code_of([&] { write_text_file((dir / "no/such/dir/x").string(), "x"); }) == ErrorCode::Io);
    std::filesystem::remove_all(dir);
}
