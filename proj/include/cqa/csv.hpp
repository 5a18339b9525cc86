#pragma once

// Minimal CSV dialect: comma separator, double-quote quoting with "" escapes,
// UTF-8 passthrough, mandatory header row.  Newlines inside quoted fields are
// preserved; \r\n line endings are accepted.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "types.hpp"

namespace cqa {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    int line = 1;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (table.header.empty()) {
            table.header = row;
        } else {
            if (row.size() != table.header.size())
                throw IoError(origin + ":" + std::to_string(line) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(row.size()));
            table.rows.push_back(row);
        }
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
                if (c == '\n') ++line;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                end_field();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !field.empty() || !row.empty()) end_row();
                ++line;
                break;
            default:
                field += c;
                row_started = true;
        }
    }
    if (in_quotes) throw IoError(origin + ": unterminated quoted field");
    if (row_started || !field.empty() || !row.empty()) end_row();
    if (table.header.empty()) throw IoError(origin + ": missing header row");
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path);
}

inline std::string csv_quote(const std::string& s) {
    bool needs = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
    auto emit_row = [&](const std::vector<std::string>& row) {
        // A lone empty field would otherwise serialize as a blank line, which
        // readers (ours included) are entitled to skip.
        if (row.size() == 1 && row[0].empty()) {
            out << "\"\"\n";
            return;
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_quote(row[i]);
        }
        out << '\n';
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
}

}  // namespace cqa
