#include "democlust/csv.hpp"

#include "democlust/error.hpp"

namespace democlust::csv {

std::vector<Record> parse(std::string_view doc, char delimiter) {
    if (doc.size() >= 3 && static_cast<unsigned char>(doc[0]) == 0xEF &&
        static_cast<unsigned char>(doc[1]) == 0xBB && static_cast<unsigned char>(doc[2]) == 0xBF) {
        doc.remove_prefix(3);
    }

    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t row = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    const std::size_t n = doc.size();
    bool quoted = false;  // current record contains a quoted field

    auto end_record = [&] {
        if (current.empty() && field.empty() && !quoted) {
            // blank line
            ++row;
            return;
        }
        quoted = false;
        current.push_back(std::move(field));
        field.clear();
        if (!records.empty() && current.size() != records.front().size()) {
            throw ParseError(row, current.size(),
                             "expected " + std::to_string(records.front().size()) +
                                 " fields, found " + std::to_string(current.size()));
        }
        records.push_back(std::move(current));
        current.clear();
        ++row;
        col = 1;
    };

    while (i < n) {
        const char c = doc[i];
        if (c == '"') {
            if (!field.empty()) {
                throw ParseError(row, col, "quote inside unquoted field");
            }
            ++i;
            quoted = true;
            bool closed = false;
            while (i < n) {
                if (doc[i] == '"') {
                    if (i + 1 < n && doc[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                field.push_back(doc[i]);
                ++i;
            }
            if (!closed) {
                throw ParseError(row, col, "unterminated quoted field");
            }
            if (i < n && doc[i] != delimiter && doc[i] != '\n' && doc[i] != '\r') {
                throw ParseError(row, col, "unexpected character after closing quote");
            }
            continue;
        }
        if (c == delimiter) {
            current.push_back(std::move(field));
            field.clear();
            ++col;
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < n && doc[i + 1] == '\n') ++i;
            ++i;
            continue;
        }
        field.push_back(c);
        ++i;
    }
    // last record without a trailing newline
    if (!field.empty() || !current.empty() || quoted) {
        end_record();
    }
    return records;
}

std::string escape_field(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void append_record(std::string& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(delimiter);
        out += escape_field(fields[i], delimiter);
    }
    out += "\r\n";
}

}  // namespace democlust::csv
