#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curvseg {

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Standard alphabet with padding. Whitespace is skipped; a leading
/// `data:...;base64,` prefix is accepted. Throws Error on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace curvseg
