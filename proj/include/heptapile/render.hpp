#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "heptapile/geometry.hpp"
#include "heptapile/sandpile.hpp"

namespace heptapile {

/// Grain count -> "#rrggbb". The standard palette is a grey ramp over 0..6
/// (0 black, 3 #808080, 5 #d5d5d5, 6 white) with 7 in red and -1 in blue.
class Palette {
public:
    static Palette standard();

    /// Reads `value=#rrggbb` lines on top of the standard palette. Blank lines
    /// and lines starting with ';' are skipped.
    static Palette parse(std::string_view text);

    void set(std::int64_t value, std::string color);
    bool has(std::int64_t value) const { return colors_.contains(value); }
    const std::string& color(std::int64_t value) const;
    const std::string& sentinel() const { return sentinel_; }

private:
    std::map<std::int64_t, std::string> colors_;
    std::string sentinel_ = "#ff00ff";
};

enum class Projection {
    Klein,      // (x/z, y/z)
    Homothety,  // homothety * (x, y): the hyperboloid seen from above, rescaled
};

struct RenderOptions {
    unsigned size_px = 800;
    Projection projection = Projection::Klein;
    double homothety = 1.0; // ratio used by Projection::Homothety
    // Move this point to the apex before projecting. Gives an undistorted
    // close-up anywhere in the ball, the rim included.
    std::optional<HPoint> focus;
    // The viewport is the unit disk around (center_x, center_y) of the
    // projected picture, magnified by `zoom`.
    double zoom = 1.0;
    double center_x = 0.0;
    double center_y = 0.0;
    bool draw_primal = false; // triangle edges in black
    bool draw_dual = true;    // heptagon outlines in white
    bool skip_rim_cells = false;
    double rim_cutoff = 1e-4; // with skip_rim_cells: drop cells with Klein radius > 1 - cutoff
    Palette palette = Palette::standard();
};

struct RenderResult {
    std::string svg;
    std::uint64_t cells_drawn = 0;
    std::uint64_t sentinel_cells = 0; // values outside [-1, 7] or missing from the palette
};

/// Planar position of a hyperboloid point under the chosen projection.
KleinPoint project(const HPoint& p, const RenderOptions& options);

/// One polygon per vertex, `id="v<vertex>"`, filled by grain count.
/// Coordinates carry six decimals, so output is byte-stable for fixed input.
RenderResult render_state(const State& state, const Embedding& embedding, const RenderOptions& options = {});

} // namespace heptapile
