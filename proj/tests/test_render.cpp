#include <doctest.h>

#include <cmath>
#include <map>
#include <regex>

#include "heptapile/closed_form.hpp"
#include "heptapile/error.hpp"
#include "heptapile/render.hpp"

using namespace heptapile;

namespace {

std::map<VertexId, std::string> fills(const std::string& svg) {
    std::map<VertexId, std::string> out;
    const std::regex poly(R"re(<polygon id="v(\d+)" fill="(#[0-9a-f]{6})")re");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it)
        out[std::stoull((*it)[1])] = (*it)[2];
    return out;
}

} // namespace

TEST_CASE("standard palette") {
    const auto p = Palette::standard();
    CHECK(p.color(0) == "#000000");
    CHECK(p.color(3) == "#808080");
    CHECK(p.color(5) == "#d5d5d5");
    CHECK(p.color(6) == "#ffffff");
    CHECK(p.color(42) == p.sentinel());
}

TEST_CASE("palette files") {
    const auto p = Palette::parse("; comment\n\n3 = #112233\n 5=#ABCDEF \n-1=#000001\n");
    CHECK(p.color(3) == "#112233");
    CHECK(p.color(5) == "#abcdef");
    CHECK(p.color(-1) == "#000001");
    CHECK(p.color(0) == "#000000");
    CHECK_THROWS_AS(Palette::parse("3 #112233\n"), Error);
    CHECK_THROWS_AS(Palette::parse("3=#1122\n"), Error);
    CHECK_THROWS_AS(Palette::parse("x=#112233\n"), Error);
    Palette q;
    CHECK_THROWS_AS(q.set(1, "red"), Error);
}

TEST_CASE("predicted final state for the origin on radius 2") {
    const auto ball = build_ball(2);
    const auto emb = build_embedding(ball);
    const VertexId origin = 0;
    const auto beta = predicted_beta(ball, {&origin, 1});
    const auto result = render_state(beta, emb);
    CHECK(result.cells_drawn == 29);
    CHECK(result.sentinel_cells == 0);
    const auto f = fills(result.svg);
    REQUIRE(f.size() == 29);
    CHECK(f.at(0) == "#000000");
    for (VertexId v = 1; v < 29; ++v)
        CHECK(f.at(v) == (ball->type(v) == VertexType::Second ? "#d5d5d5" : "#808080"));
}

TEST_CASE("uniform state renders in one color") {
    const auto ball = build_ball(3);
    const auto result = render_state(max_stable(ball), build_embedding(ball));
    for (const auto& [v, color] : fills(result.svg)) CHECK(color == "#ffffff");
}

TEST_CASE("output is deterministic and well-formed") {
    const auto ball = build_ball(3);
    const auto emb = build_embedding(ball);
    RenderOptions opts;
    opts.draw_primal = true;
    const auto a = render_state(max_stable(ball), emb, opts);
    const auto b = render_state(max_stable(ball), build_embedding(ball), opts);
    CHECK(a.svg == b.svg);
    CHECK(a.svg.rfind("<?xml", 0) == 0);
    CHECK(a.svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(a.svg.find("<line ") != std::string::npos);
    CHECK(a.svg.substr(a.svg.size() - 7) == "</svg>\n");
    // Six decimals everywhere.
    CHECK(std::regex_search(a.svg, std::regex(R"(points="\d+\.\d{6},\d+\.\d{6} )")));
}

TEST_CASE("render errors and sentinels") {
    const auto ball = build_ball(2);
    const auto emb = build_embedding(ball);
    CHECK_THROWS_AS(render_state(max_stable(build_ball(3)), emb), Error);

    State odd(ball, 6);
    odd[4] = 9;
    odd[5] = -3;
    const auto r = render_state(odd, emb);
    CHECK(r.sentinel_cells == 2);
    CHECK(fills(r.svg).at(4) == "#ff00ff");

    RenderOptions bad;
    bad.zoom = 0.0;
    CHECK_THROWS_AS(render_state(odd, emb, bad), Error);
}

TEST_CASE("zoom and homothety") {
    const auto ball = build_ball(4);
    const auto emb = build_embedding(ball);
    RenderOptions zoom;
    zoom.zoom = 20.0;
    const auto z = render_state(max_stable(ball), emb, zoom);
    CHECK(z.cells_drawn < ball->size());
    CHECK(z.cells_drawn >= 1);

    RenderOptions h;
    h.projection = Projection::Homothety;
    h.homothety = 0.5;
    const HPoint p{3.0, 4.0, std::sqrt(26.0)};
    CHECK(project(p, h).x == doctest::Approx(1.5));
    CHECK(project(p, h).y == doctest::Approx(2.0));
    CHECK(project(p, RenderOptions{}).x == doctest::Approx(3.0 / std::sqrt(26.0)));

    RenderOptions rim;
    rim.skip_rim_cells = true;
    rim.rim_cutoff = 0.05;
    CHECK(render_state(max_stable(ball), emb, rim).cells_drawn < ball->size());
}

TEST_CASE("focus moves a vertex to the middle of the picture") {
    const auto ball = build_ball(5);
    const auto emb = build_embedding(ball);
    RenderOptions opts;
    opts.focus = emb.vertex_pos[150];
    const auto p = project(emb.vertex_pos[150], opts);
    CHECK(std::hypot(p.x, p.y) < 1e-9);
    // Neighbors of the focus land at the Klein radius of an edge.
    const double r = std::tanh(edge_length());
    for (auto u : ball->neighbors(150)) {
        const auto q = project(emb.vertex_pos[u], opts);
        CHECK(std::hypot(q.x, q.y) == doctest::Approx(r).epsilon(1e-9));
    }
    const auto svg = render_state(max_stable(ball), emb, opts).svg;
    CHECK(svg.find(" focus=") != std::string::npos);
}
