#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qurate {

// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD
// (one replacement per offending byte).
std::vector<char32_t> utf8_decode(std::string_view text);

// Encodes a single codepoint as UTF-8 and appends it to out.
void utf8_append(std::string& out, char32_t cp);

// Canonical composition (Unicode NFC).
std::string nfc(std::string_view text);

// Surface-form key used by de-duplication: trim outer whitespace, collapse
// internal whitespace runs to a single space, then NFC.
std::string normalize_surface(std::string_view text);

// True for codepoints that break tokens: whitespace, punctuation, symbols.
// Letters, digits and combining marks are token characters.
bool is_token_break(char32_t cp);

bool is_space(char32_t cp);

// Simple lowercase mapping for cased scripts; identity elsewhere.
char32_t to_lower(char32_t cp);

}  // namespace qurate
