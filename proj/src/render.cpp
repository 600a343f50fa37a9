#include "heptapile/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "heptapile/error.hpp"
#include "text_scan.hpp"

namespace heptapile {

namespace {

bool is_hex_color(std::string_view s) {
    return s.size() == 7 && s[0] == '#' &&
           std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string fixed6(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

} // namespace

Palette Palette::standard() {
    Palette p;
    p.colors_ = {{-1, "#0000ff"}, {0, "#000000"}, {1, "#2a2a2a"}, {2, "#555555"}, {3, "#808080"},
                 {4, "#aaaaaa"},  {5, "#d5d5d5"}, {6, "#ffffff"}, {7, "#ff0000"}};
    return p;
}

Palette Palette::parse(std::string_view text) {
    Palette p = standard();
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::Parse, "palette line " + std::to_string(line_no) + ": expected value=#rrggbb");
        const auto value = detail::parse_number<std::int64_t>(trim(line.substr(0, eq)), "palette value", line_no);
        const auto color = trim(line.substr(eq + 1));
        if (!is_hex_color(color))
            throw Error(ErrorCode::Parse, "palette line " + std::to_string(line_no) + ": bad color '" +
                                              std::string(color) + "'");
        p.set(value, std::string(color));
    }
    return p;
}

void Palette::set(std::int64_t value, std::string color) {
    if (!is_hex_color(color)) throw Error(ErrorCode::InvalidArgument, "palette color must be #rrggbb");
    std::ranges::transform(color, color.begin(), [](char c) { return static_cast<char>(std::tolower(c)); });
    colors_[value] = std::move(color);
}

const std::string& Palette::color(std::int64_t value) const {
    const auto it = colors_.find(value);
    return it == colors_.end() ? sentinel_ : it->second;
}

KleinPoint project(const HPoint& point, const RenderOptions& options) {
    const HPoint p = options.focus ? recenter(*options.focus, point) : point;
    if (options.projection == Projection::Homothety) return {options.homothety * p.x, options.homothety * p.y};
    return klein(p);
}

RenderResult render_state(const State& state, const Embedding& embedding, const RenderOptions& options) {
    if (!same_ball(state.ball(), *embedding.ball))
        throw Error(ErrorCode::Mismatch, "state and embedding belong to different balls");
    if (!(options.homothety > 0.0) || !(options.zoom > 0.0) || options.size_px == 0)
        throw Error(ErrorCode::InvalidArgument, "homothety ratio, zoom and output size must be positive");

    const Ball& ball = state.ball();
    const double half = options.size_px / 2.0;
    auto view = [&](const HPoint& p) {
        const auto k = project(p, options);
        return KleinPoint{(k.x - options.center_x) * options.zoom, (k.y - options.center_y) * options.zoom};
    };
    auto px = [&](const KleinPoint& w) { return fixed6(half * (1.0 + w.x)) + "," + fixed6(half * (1.0 - w.y)); };

    RenderResult result;
    std::string& svg = result.svg;
    const auto size = std::to_string(options.size_px);
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + size + "\" height=\"" + size +
           "\" viewBox=\"0 0 " + size + " " + size + "\">\n";
    svg += "<desc>heptapile m=" + std::to_string(ball.radius()) + " projection=" +
           (options.projection == Projection::Klein ? std::string("klein") : "homothety " + fixed6(options.homothety)) +
           " zoom=" + fixed6(options.zoom) + " center=" + fixed6(options.center_x) + "," + fixed6(options.center_y) +
           (options.focus ? " focus=" + fixed6(options.focus->x) + "," + fixed6(options.focus->y) + "," +
                                fixed6(options.focus->z)
                          : std::string()) +
           "</desc>\n";
    svg += "<defs><clipPath id=\"disk\"><circle cx=\"" + fixed6(half) + "\" cy=\"" + fixed6(half) + "\" r=\"" +
           fixed6(half) + "\"/></clipPath></defs>\n";
    svg += "<g clip-path=\"url(#disk)\"";
    if (options.draw_dual)
        svg += " stroke=\"#ffffff\" stroke-width=\"" + fixed6(std::max(0.25, options.size_px / 1600.0)) + "\"";
    else
        svg += " stroke=\"none\"";
    svg += ">\n";

    for (VertexId v = 0; v < ball.size(); ++v) {
        if (options.skip_rim_cells) {
            const auto k = klein(embedding.vertex_pos[v]);
            if (std::hypot(k.x, k.y) > 1.0 - options.rim_cutoff) continue;
        }
        std::array<KleinPoint, kDegree> corners;
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (int j = 0; j < kDegree; ++j) {
            corners[j] = view(embedding.cells[v][j]);
            lo_x = std::min(lo_x, corners[j].x);
            hi_x = std::max(hi_x, corners[j].x);
            lo_y = std::min(lo_y, corners[j].y);
            hi_y = std::max(hi_y, corners[j].y);
        }
        if (hi_x < -1.0 || lo_x > 1.0 || hi_y < -1.0 || lo_y > 1.0) continue;

        const std::int64_t value = state[v];
        const bool in_range = value >= -1 && value <= kThreshold && options.palette.has(value);
        if (!in_range) ++result.sentinel_cells;
        const std::string& fill = in_range ? options.palette.color(value) : options.palette.sentinel();

        svg += "<polygon id=\"v" + std::to_string(v) + "\" fill=\"" + fill + "\" points=\"";
        for (int j = 0; j < kDegree; ++j) {
            if (j) svg += ' ';
            svg += px(corners[j]);
        }
        svg += "\"/>\n";
        ++result.cells_drawn;
    }
    svg += "</g>\n";

    if (options.draw_primal) {
        svg += "<g clip-path=\"url(#disk)\" stroke=\"#000000\" stroke-width=\"" +
               fixed6(std::max(0.25, options.size_px / 1600.0)) + "\">\n";
        for (VertexId v = 0; v < ball.size(); ++v) {
            const auto a = view(embedding.vertex_pos[v]);
            for (VertexId u : ball.neighbors(v)) {
                if (u < v) continue;
                const auto b = view(embedding.vertex_pos[u]);
                if (std::max(a.x, b.x) < -1.0 || std::min(a.x, b.x) > 1.0 || std::max(a.y, b.y) < -1.0 ||
                    std::min(a.y, b.y) > 1.0)
                    continue;
                svg += "<line x1=\"" + fixed6(half * (1.0 + a.x)) + "\" y1=\"" + fixed6(half * (1.0 - a.y)) +
                       "\" x2=\"" + fixed6(half * (1.0 + b.x)) + "\" y2=\"" + fixed6(half * (1.0 - b.y)) + "\"/>\n";
            }
        }
        svg += "</g>\n";
    }

    svg += "<circle cx=\"" + fixed6(half) + "\" cy=\"" + fixed6(half) + "\" r=\"" + fixed6(half) +
           "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.000000\"/>\n";
    svg += "</svg>\n";
    return result;
}

} // namespace heptapile
