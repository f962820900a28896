#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ccembed {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
// 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);

// printf("%.17g"); round-trips every finite double.
std::string format_double(double value);

}  // namespace ccembed
