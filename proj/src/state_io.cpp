#include <fstream>
#include <map>
#include <sstream>

#include "heptapile/error.hpp"
#include "heptapile/sandpile.hpp"
#include "text_scan.hpp"

namespace heptapile {

using detail::LineScanner;
using detail::next_token;
using detail::parse_field;
using detail::parse_number;

namespace {

template <typename T>
T most_frequent(std::span<const T> values) {
    std::map<T, std::uint64_t> freq;
    for (T v : values) ++freq[v];
    T best{};
    std::uint64_t best_count = 0;
    for (const auto& [value, count] : freq) {
        if (count > best_count) {
            best = value;
            best_count = count;
        }
    }
    return best;
}

template <typename T>
std::string serialize_values(std::string_view magic, const Ball& ball, std::span<const T> values) {
    const T fallback = most_frequent(values);
    std::string out;
    out += std::string(magic) + " v1 m=" + std::to_string(ball.radius()) + " n=" + std::to_string(ball.size()) +
           " default=" + std::to_string(fallback) + "\n";
    for (VertexId v = 0; v < values.size(); ++v) {
        if (values[v] == fallback) continue;
        out += std::to_string(v);
        out += ' ';
        out += std::to_string(values[v]);
        out += '\n';
    }
    out += "END\n";
    return out;
}

template <typename T>
std::vector<T> deserialize_values(std::string_view magic, const Ball& ball, std::string_view text) {
    LineScanner lines(text);
    auto header = lines.next_line();
    if (!header) throw Error(ErrorCode::Parse, "empty " + std::string(magic) + " stream");
    std::string_view h = *header;
    if (next_token(h) != magic || next_token(h) != "v1")
        throw Error(ErrorCode::Parse, "malformed header: expected '" + std::string(magic) + " v1'");
    const auto m_tok = next_token(h);
    const auto n_tok = next_token(h);
    const auto d_tok = next_token(h);
    if (!m_tok || !n_tok || !d_tok || next_token(h))
        throw Error(ErrorCode::Parse, "malformed header: expected m=<m> n=<count> default=<d>");
    const auto m = parse_field<Level>(*m_tok, "m", 1);
    const auto n = parse_field<std::uint64_t>(*n_tok, "n", 1);
    const auto fallback = parse_field<T>(*d_tok, "default", 1);
    if (m != ball.radius() || n != ball.size())
        throw Error(ErrorCode::Mismatch, "file describes m=" + std::to_string(m) + " n=" + std::to_string(n) +
                                             " but the ball has m=" + std::to_string(ball.radius()) +
                                             " n=" + std::to_string(ball.size()));

    std::vector<T> values(n, fallback);
    std::vector<char> seen(n, 0);
    for (;;) {
        auto line = lines.next_line();
        if (!line) throw Error(ErrorCode::Parse, "missing END trailer");
        if (*line == "END") break;
        const auto no = lines.line_number();
        std::string_view rest = *line;
        const auto id_tok = next_token(rest);
        const auto value_tok = next_token(rest);
        if (!id_tok || !value_tok || next_token(rest))
            throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": expected '<vertex id> <value>'");
        const auto v = parse_number<VertexId>(*id_tok, "vertex id", no);
        if (v >= n) throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": vertex id out of range");
        if (seen[v]) throw Error(ErrorCode::Parse, "line " + std::to_string(no) + ": duplicate vertex id");
        seen[v] = 1;
        values[v] = parse_number<T>(*value_tok, "value", no);
    }
    if (!lines.done()) throw Error(ErrorCode::Parse, "trailing data after END");
    return values;
}

} // namespace

std::string serialize_state(const State& state) {
    return serialize_values<std::int64_t>("HEPTASTATE", state.ball(), state.grains());
}

State deserialize_state(BallPtr ball, std::string_view text) {
    auto values = deserialize_values<std::int64_t>("HEPTASTATE", *ball, text);
    return State(std::move(ball), std::move(values));
}

std::string serialize_odometer(const Odometer& odometer) {
    return serialize_values<std::uint64_t>("HEPTAODOM", odometer.ball(), odometer.counts());
}

Odometer deserialize_odometer(BallPtr ball, std::string_view text) {
    auto values = deserialize_values<std::uint64_t>("HEPTAODOM", *ball, text);
    return Odometer(std::move(ball), std::move(values));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "read error on '" + path + "'");
    return std::move(buffer).str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::Io, "write error on '" + path + "'");
}

} // namespace heptapile
