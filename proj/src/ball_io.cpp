#include <cinttypes>
#include <cstdio>
#include <ostream>

#include "heptapile/ball.hpp"
#include "heptapile/error.hpp"
#include "heptapile/sandpile.hpp"
#include "text_scan.hpp"

namespace heptapile {

using detail::LineScanner;
using detail::next_token;
using detail::parse_field;
using detail::parse_number;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string serialize_ball(const Ball& ball) {
    std::string out;
    out.reserve(ball.size() * 48 + 64);
    out += "HEPTABALL v1 m=" + std::to_string(ball.radius()) + " n=" + std::to_string(ball.size()) + "\n";
    for (VertexId v = 0; v < ball.size(); ++v) {
        out += std::to_string(v);
        out += ' ';
        out += std::to_string(ball.level(v));
        out += ' ';
        out += std::to_string(static_cast<int>(ball.type(v)));
        out += ' ';
        out += std::to_string(ball.boundary_deficit(v));
        for (VertexId u : ball.neighbors(v)) {
            out += ' ';
            out += std::to_string(u);
        }
        out += '\n';
    }
    char check[40];
    std::snprintf(check, sizeof check, "CHECK %016" PRIx64 "\n", fnv1a64(out));
    out += check;
    return out;
}

void write_ball(std::ostream& out, const Ball& ball) {
    const auto text = serialize_ball(ball);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

BallPtr deserialize_ball(std::string_view text) {
    LineScanner lines(text);
    auto header = lines.next_line();
    if (!header) throw Error(ErrorCode::Parse, "empty ball stream");
    std::string_view h = *header;
    if (next_token(h) != "HEPTABALL" || next_token(h) != "v1")
        throw Error(ErrorCode::Parse, "malformed header: expected 'HEPTABALL v1'");
    const auto m_tok = next_token(h);
    const auto n_tok = next_token(h);
    if (!m_tok || !n_tok || next_token(h)) throw Error(ErrorCode::Parse, "malformed header: expected m=<m> n=<count>");
    const auto radius = parse_field<Level>(*m_tok, "m", 1);
    const auto n = parse_field<std::uint64_t>(*n_tok, "n", 1);
    if (n == 0) throw Error(ErrorCode::Parse, "malformed header: n must be positive");
    if (n > max_vertices_limit()) throw Error(ErrorCode::Capacity, "ball stream declares too many vertices");

    std::vector<Level> levels(n);
    std::vector<VertexType> types(n);
    std::vector<std::vector<VertexId>> adjacency(n);
    for (VertexId v = 0; v < n; ++v) {
        auto line = lines.next_line();
        if (!line) throw Error(ErrorCode::Parse, "stream ends after " + std::to_string(v) + " vertex lines");
        const auto no = lines.line_number();
        std::string_view rest = *line;
        auto field = [&](const char* what) {
            auto tok = next_token(rest);
            if (!tok) throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": missing " + what);
            return *tok;
        };
        if (parse_number<VertexId>(field("id"), "id", no) != v)
            throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": vertex ids must be dense and ascending");
        levels[v] = parse_number<Level>(field("level"), "level", no);
        const auto type = parse_number<int>(field("type"), "type", no);
        if (type < 0 || type > 2) throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": type must be 0, 1 or 2");
        types[v] = static_cast<VertexType>(type);
        const auto deficit = parse_number<int>(field("deficit"), "deficit", no);
        while (auto tok = next_token(rest)) {
            const auto u = parse_number<VertexId>(*tok, "neighbor id", no);
            if (!adjacency[v].empty() && adjacency[v].back() >= u)
                throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": neighbor ids must be strictly ascending");
            adjacency[v].push_back(u);
            if (adjacency[v].size() > kDegree)
                throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": vertex " + std::to_string(v) +
                                                  " lists more than 7 neighbors");
        }
        if (deficit < 0 || static_cast<std::size_t>(deficit) + adjacency[v].size() != kDegree)
            throw InvariantError("degree-budget", "vertex " + std::to_string(v) + ": stored neighbors plus deficit must be 7");
    }

    const auto body_end = lines.offset();
    auto check = lines.next_line();
    if (!check) throw Error(ErrorCode::Parse, "missing CHECK trailer");
    std::string_view c = *check;
    if (next_token(c) != "CHECK") throw Error(ErrorCode::Parse, "expected CHECK trailer after vertex lines");
    const auto hex = next_token(c);
    if (!hex || hex->size() != 16 || next_token(c)) throw Error(ErrorCode::Parse, "CHECK needs 16 hex digits");
    std::uint64_t declared = 0;
    auto [ptr, ec] = std::from_chars(hex->data(), hex->data() + hex->size(), declared, 16);
    if (ec != std::errc{} || ptr != hex->data() + hex->size()) throw Error(ErrorCode::Parse, "CHECK is not hexadecimal");
    if (!lines.done()) throw Error(ErrorCode::Parse, "trailing data after CHECK");
    const auto actual = fnv1a64(text.substr(0, body_end));
    if (declared != actual) throw Error(ErrorCode::Checksum, "checksum mismatch");

    return std::make_shared<const Ball>(Ball::from_parts(radius, std::move(levels), std::move(types), adjacency));
}

BallPtr read_ball_file(const std::string& path) { return deserialize_ball(read_text_file(path)); }

void write_ball_file(const std::string& path, const Ball& ball) { write_text_file(path, serialize_ball(ball)); }

} // namespace heptapile
