#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cupcf/errors.hpp"
#include "cupcf/ratings.hpp"

namespace cupcf {

enum class FileFormat { movielens_tab, csv };

inline const char* to_string(FileFormat f) {
    return f == FileFormat::movielens_tab ? "movielens" : "csv";
}

inline FileFormat file_format_from_string(const std::string& s) {
    if (s == "movielens" || s == "movielens_tab" || s == "tab") return FileFormat::movielens_tab;
    if (s == "csv") return FileFormat::csv;
    throw ConfigError("unknown input format '" + s + "' (expected movielens or csv)");
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline std::int64_t parse_int_field(std::string_view field, std::size_t line_no,
                                    const char* name) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ParseError(line_no, std::string(name) + " field '" + std::string(field) +
                                      "' is not an integer");
    }
    return value;
}

}  // namespace detail

/// Parses rating records from a stream.
///
/// movielens_tab: user<TAB>item<TAB>rating[<TAB>timestamp], no header;
///                the timestamp field is ignored.
/// csv:           header line "user,item,rating", then user,item,rating rows.
///
/// An empty stream yields an empty record list for both formats.
inline std::vector<RatingRecord> parse_ratings(std::istream& in, FileFormat format) {
    std::vector<RatingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    const char sep = format == FileFormat::csv ? ',' : '\t';
    bool saw_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        if (format == FileFormat::csv && !saw_header) {
            if (line != "user,item,rating") {
                throw ParseError(line_no, "expected header 'user,item,rating', got '" +
                                              line + "'");
            }
            saw_header = true;
            continue;
        }

        auto fields = detail::split_fields(line, sep);
        const std::size_t min_fields = 3;
        const std::size_t max_fields = format == FileFormat::movielens_tab ? 4 : 3;
        if (fields.size() < min_fields || fields.size() > max_fields) {
            throw ParseError(line_no, "expected " + std::to_string(min_fields) +
                                          (max_fields > min_fields ? " or 4" : "") +
                                          " fields, got " + std::to_string(fields.size()));
        }

        const auto user = detail::parse_int_field(fields[0], line_no, "user");
        const auto item = detail::parse_int_field(fields[1], line_no, "item");
        const auto rating = detail::parse_int_field(fields[2], line_no, "rating");
        if (rating < RatingsMatrix::kScaleMin || rating > RatingsMatrix::kScaleMax) {
            throw RangeError(line_no, "rating " + std::to_string(rating) +
                                          " outside scale [1,5]");
        }
        records.push_back({static_cast<UserId>(user), static_cast<ItemId>(item),
                           static_cast<int>(rating)});
    }
    return records;
}

/// Loads a rating file into a matrix.
/// Throws ParseError/RangeError with line numbers, DuplicateError on
/// repeated (user, item) pairs, and Error if the file cannot be opened.
inline RatingsMatrix load_ratings(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rating file: " + path);
    return RatingsMatrix(parse_ratings(in, format));
}

inline void write_ratings(std::ostream& out, const std::vector<RatingRecord>& records,
                          FileFormat format) {
    const char sep = format == FileFormat::csv ? ',' : '\t';
    if (format == FileFormat::csv) out << "user,item,rating\n";
    for (const auto& r : records) {
        out << r.user << sep << r.item << sep << r.rating << '\n';
    }
}

/// Writes the matrix in canonical record order; loading the result back
/// reproduces the identical (user, item, rating) set.
inline void save_ratings(const RatingsMatrix& matrix, const std::string& path,
                         FileFormat format) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    write_ratings(out, matrix.to_records(), format);
}

/// Fixed-precision decimal formatting (reports, console tables).
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

/// Shortest round-trip formatting for debug CSV dumps.
inline std::string format_full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace cupcf
