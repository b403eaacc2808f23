#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline bool parse_int(std::string_view text, int& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !text.empty();
}

inline bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !text.empty();
}

/// Splits one line on `delim`. Double-quoted fields may contain the
/// delimiter (Maddison comma exports quote cells like "1,204.9").
inline std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == delim && !quoted) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trimmed(std::string s) {
    auto issp = [](char c) { return c == ' ' || c == '\t'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
}

} // namespace detail

/// Parses the canonical two-column format: a `year,value` header line then
/// `<integer>,<decimal>` rows. Rows may be unsorted; the result is sorted by
/// year. Throws ParseError (with line number) or ValidationError.
inline TimeSeries parse_series_csv(std::string_view text, std::string name = "",
                                   std::string unit = "") {
    std::vector<Observation> obs;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        line = detail::strip_cr(line);
        ++line_no;
        if (!header_seen) {
            if (line != "year,value") {
                throw ParseError("line 1: expected header \"year,value\"");
            }
            header_seen = true;
            continue;
        }
        if (line.empty() && pos > text.size()) break;  // trailing newline
        if (line.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty row");
        }
        std::size_t comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected two comma-separated fields");
        }
        Observation o;
        if (!detail::parse_int(line.substr(0, comma), o.year)) {
            throw ParseError("line " + std::to_string(line_no) + ": year is not an integer");
        }
        if (!detail::parse_double(line.substr(comma + 1), o.value)) {
            throw ParseError("line " + std::to_string(line_no) + ": value is not numeric");
        }
        obs.push_back(o);
    }
    if (obs.size() < 2) {
        throw ValidationError("series has fewer than 2 rows");
    }
    return TimeSeries(std::move(name), std::move(unit), std::move(obs));
}

/// Canonical serialization; parse_series_csv(serialize_series_csv(s)) is
/// observation-identical to s (values printed with shortest round-trip
/// representation).
inline std::string serialize_series_csv(const TimeSeries& series) {
    std::string out = "year,value\n";
    char buf[32];
    for (const Observation& o : series.observations()) {
        out += std::to_string(o.year);
        out += ',';
        auto res = std::to_chars(buf, buf + sizeof buf, o.value);
        out.append(buf, res.ptr);
        out += '\n';
    }
    return out;
}

/// Parses one row of a Maddison-style horizontal table: first row holds year
/// headers, first column holds row labels. Blank cells are missing
/// observations, not zeros. Thousands separators inside cells are stripped.
inline TimeSeries parse_maddison_horizontal(std::string_view text, const std::string& row_label,
                                            char delimiter = ',', std::string unit = "") {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        line = detail::strip_cr(line);
        if (!(line.empty() && pos > text.size())) lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("empty table");

    // Year header: blank header cells mark columns to ignore entirely.
    std::vector<std::string> header = detail::split_line(lines[0], delimiter);
    std::vector<int> years(header.size(), 0);
    std::vector<bool> active(header.size(), false);
    for (std::size_t c = 1; c < header.size(); ++c) {
        std::string cell = detail::trimmed(header[c]);
        if (cell.empty()) continue;
        if (!detail::parse_int(cell, years[c])) {
            throw ParseError("row 1, column " + std::to_string(c + 1) + ": year header is not an integer");
        }
        active[c] = true;
    }

    std::vector<std::string> labels;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::vector<std::string> cells = detail::split_line(lines[r], delimiter);
        if (cells.empty()) continue;
        std::string label = detail::trimmed(cells[0]);
        if (label.empty()) continue;
        if (label != row_label) {
            labels.push_back(label);
            continue;
        }
        std::vector<Observation> obs;
        for (std::size_t c = 1; c < cells.size() && c < header.size(); ++c) {
            if (!active[c]) continue;
            std::string cell = detail::trimmed(cells[c]);
            if (cell.empty()) continue;
            std::string digits;
            for (char ch : cell) {
                if (ch == ',' || ch == ' ') continue;  // thousands separators
                digits.push_back(ch);
            }
            double value = 0.0;
            if (!detail::parse_double(digits, value)) {
                throw ParseError("row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                                 ": cell \"" + cell + "\" is not numeric");
            }
            obs.push_back({years[c], value});
        }
        return TimeSeries(row_label, std::move(unit), std::move(obs));
    }

    std::string msg = "row label \"" + row_label + "\" not found; available:";
    for (const std::string& l : labels) msg += " \"" + l + "\"";
    throw LookupError(msg);
}

} // namespace growthfit
