#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drwps {

// Shared text helpers used by parsing, canonicalization and CSV output.

// Strips leading and trailing ASCII whitespace.
std::string_view trim(std::string_view s);

// ASCII lowercase copy.
std::string to_lower(std::string_view s);

// Splits on '\n'; a trailing newline does not produce an empty final line.
// '\r' before a split point is dropped so CRLF documents parse too.
std::vector<std::string_view> split_lines(std::string_view text);

// Whitespace-separated tokens.
std::vector<std::string_view> split_ws(std::string_view line);

std::optional<std::uint64_t> parse_u64(std::string_view token);
std::optional<double> parse_double(std::string_view token);

// Shortest decimal form that parses back to exactly the same double. Keeps
// CSV output byte-stable and round-trippable without printing 17 digits for
// values like 0.25.
std::string format_double(double value);

}  // namespace drwps
