#pragma once

#include <cstdint>
#include <string>

#include "heptapile/error.hpp"

namespace heptapile::detail {

template <typename T>
T checked_add(T a, T b, const char* what) {
    T out;
    if (__builtin_add_overflow(a, b, &out))
        throw Error(ErrorCode::Overflow, std::string("integer overflow in ") + what);
    return out;
}

template <typename T>
T checked_sub(T a, T b, const char* what) {
    T out;
    if (__builtin_sub_overflow(a, b, &out))
        throw Error(ErrorCode::Overflow, std::string("integer overflow in ") + what);
    return out;
}

template <typename T>
T checked_mul(T a, T b, const char* what) {
    T out;
    if (__builtin_mul_overflow(a, b, &out))
        throw Error(ErrorCode::Overflow, std::string("integer overflow in ") + what);
    return out;
}

} // namespace heptapile::detail
