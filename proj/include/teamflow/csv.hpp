#pragma once

// Small CSV layer (RFC-4180 quoting, LF or CRLF).  Identifiers are opaque
// strings, so quoting support matters even though the synthetic data never
// needs it.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "teamflow/errors.hpp"

namespace teamflow {

using csv_row = std::vector<std::string>;

// parse a whole document; embedded newlines inside quotes are honored
inline std::vector<csv_row> parse_csv(const std::string& text) {
    std::vector<csv_row> rows;
    csv_row row;
    std::string field;
    bool quoted = false;
    bool field_open = false;  // saw any content or separator on this line
    std::size_t i = 0;
    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back(row);
        row.clear();
        field_open = false;
    };
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
            field_open = true;
        } else if (c == ',') {
            end_field();
            field_open = true;
        } else if (c == '\n') {
            if (field_open || !field.empty()) end_row();
        } else if (c == '\r') {
            // swallow; the following \n (if any) terminates the row
            if (i + 1 >= text.size() || text[i + 1] != '\n') {
                if (field_open || !field.empty()) end_row();
            }
        } else {
            field += c;
            field_open = true;
        }
        ++i;
    }
    if (quoted) throw malformed_input("unterminated quote in CSV input");
    if (field_open || !field.empty()) end_row();
    return rows;
}

inline std::string csv_escape(const std::string& field) {
    bool needs = false;
    for (char c : field)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') needs = true;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_csv_row(const csv_row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(row[i]);
    }
    out += '\n';
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw malformed_input("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path);
    out << content;
}

}  // namespace teamflow
