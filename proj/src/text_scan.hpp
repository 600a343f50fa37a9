#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "heptapile/error.hpp"

namespace heptapile::detail {

// Line and token reader for the line-oriented text formats.
class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    std::size_t offset() const { return pos_; }
    std::size_t line_number() const { return line_; }

    std::optional<std::string_view> next_line() {
        if (done()) return std::nullopt;
        const auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos)
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_ + 1) + " is not newline-terminated");
        auto line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_;
        return line;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

inline std::optional<std::string_view> next_token(std::string_view& line) {
    const auto start = line.find_first_not_of(' ');
    if (start == std::string_view::npos) {
        line = {};
        return std::nullopt;
    }
    const auto end = line.find(' ', start);
    auto token = line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    line = end == std::string_view::npos ? std::string_view{} : line.substr(end);
    return token;
}

template <typename T>
T parse_number(std::string_view token, const char* what, std::size_t line_no) {
    T value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad " + what + " '" +
                                          std::string(token) + "'");
    return value;
}

// Parses `key=<number>`.
template <typename T>
T parse_field(std::string_view token, std::string_view key, std::size_t line_no) {
    if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=')
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected field '" + std::string(key) +
                                          "=', got '" + std::string(token) + "'");
    return parse_number<T>(token.substr(key.size() + 1), std::string(key).c_str(), line_no);
}

} // namespace heptapile::detail
