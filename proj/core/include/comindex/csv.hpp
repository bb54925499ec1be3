#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace comindex::csv {

using Row = std::vector<std::string>;

// RFC 4180 style reader: comma separated, double-quoted fields may hold
// commas, quotes ("") and newlines. Accepts LF or CRLF and a UTF-8 BOM.
// Completely empty lines are skipped.
std::vector<Row> parse(std::string_view text);

// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join(const Row& fields);

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace comindex::csv
