#pragma once

#include <string>
#include <vector>

namespace cdx {

// RFC 4180 style: fields separated by commas, optionally double-quoted with
// "" as the escaped quote. Throws MalformedRow on an unterminated quote.
std::vector<std::string> split_csv_line(const std::string& line);
// Quotes the field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

} // namespace cdx
