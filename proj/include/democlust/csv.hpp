#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace democlust::csv {

using Record = std::vector<std::string>;

/**
 * Parse an RFC-4180 document into records.
 *
 * Accepts LF or CRLF line endings and an optional UTF-8 byte order mark.
 * A trailing line break after the last record is optional. Every record must
 * have the same field count as the first one.
 *
 * Throws ParseError on an unterminated quoted field, a quote inside an
 * unquoted field, garbage after a closing quote, or a ragged record.
 */
std::vector<Record> parse(std::string_view document, char delimiter = ',');

/// Quote a field if it contains the delimiter, a quote, CR or LF.
std::string escape_field(std::string_view field, char delimiter = ',');

/// Append one CRLF-terminated record to `out`.
void append_record(std::string& out, const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace democlust::csv
