#pragma once

// Minimal RFC 4180 reader: comma separated, optional double-quoted fields
// with "" escapes, CRLF or LF line ends, mandatory header row.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/errors.hpp"

namespace gasrank {

struct CsvRecord {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRecord> records;
};

inline CsvTable parse_csv(std::string_view text, const std::string& source = "<csv>") {
    std::vector<CsvRecord> all;
    CsvRecord rec;
    std::string field;
    std::size_t line = 1;
    rec.line = 1;
    bool quoted = false, field_started = false, any = false;
    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // Blank lines are skipped.
        if (!(rec.fields.size() == 1 && rec.fields[0].empty())) all.push_back(std::move(rec));
        rec = CsvRecord{};
        rec.line = line;
    };
    std::size_t i = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started)
                    throw DataError(source + ":" + std::to_string(line) + ": quote inside an unquoted field");
                quoted = true;
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                ++line;
                end_record();
                any = false;
                break;
            case '\n':
                ++line;
                end_record();
                any = false;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw DataError(source + ": unterminated quoted field starting on line " + std::to_string(rec.line));
    if (any || !field.empty() || !rec.fields.empty()) end_record();

    CsvTable table;
    if (all.empty()) throw DataError(source + ": missing header row");
    table.header = std::move(all.front().fields);
    for (std::size_t r = 1; r < all.size(); ++r) {
        if (all[r].fields.size() != table.header.size())
            throw DataError(source + ":" + std::to_string(all[r].line) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(all[r].fields.size()));
        table.records.push_back(std::move(all[r]));
    }
    return table;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CsvTable read_csv_file(const std::string& path) { return parse_csv(read_text_file(path), path); }

// Quotes a field when it contains a delimiter, quote or line break.
inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace gasrank
