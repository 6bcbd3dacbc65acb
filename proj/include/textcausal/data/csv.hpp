#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace textcausal::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
// newlines. CRLF and LF line endings are both accepted.
std::vector<Record> parse(std::string_view content);

// Quotes a field only when it contains a separator, quote, or line break.
std::string escape(std::string_view field);

void write_record(std::ostream& out, const Record& record);

}  // namespace textcausal::csv
