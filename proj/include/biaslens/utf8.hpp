#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace biaslens::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at `pos`, advancing it. Invalid or
/// truncated sequences yield kReplacement and advance by one byte.
char32_t decode(std::string_view text, std::size_t& pos, bool* ok = nullptr);

void append(std::string& out, char32_t cp);

/// True when `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool valid(std::string_view text, std::size_t* error_offset = nullptr);

/// Replaces every malformed sequence with U+FFFD.
std::string sanitize(std::string_view text);

}  // namespace biaslens::utf8
