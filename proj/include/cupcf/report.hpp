#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cupcf/evaluate.hpp"
#include "cupcf/io.hpp"

namespace cupcf {

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

/// Checksum of a file's bytes, for the report's config fingerprint.
inline std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for checksum: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto n = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return to_hex(hash);
}

/// Provenance of the evaluated input file, echoed into reports.
struct InputInfo {
    std::string path;
    std::string format;
    std::string checksum;  // fnv1a64 of the file bytes
};

namespace detail {

/// Canonical one-line rendering of everything that determines the result;
/// hashing it gives the reproducibility fingerprint.
inline std::string config_canonical(const EvalReport& report, const InputInfo& input) {
    std::ostringstream out;
    const auto& c = report.config;
    out << "input=" << input.path << ";format=" << input.format
        << ";checksum=" << input.checksum << ";split=" << report.split_id
        << ";method=" << to_string(c.method) << ";k_folds=" << c.k_folds << ";seed=" << c.seed
        << ";k_neighbors=" << c.k_neighbors << ";n_values=";
    for (std::size_t i = 0; i < c.n_values.size(); ++i) {
        if (i) out << ',';
        out << c.n_values[i];
    }
    out << ";thresholds=";
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
        if (i) out << ',';
        out << c.thresholds[i];
    }
    out << ";ranking_mode=" << to_string(c.ranking_mode)
        << ";averaging=" << to_string(c.averaging) << ";clamp=" << (c.clamp ? 1 : 0);
    return out.str();
}

inline nlohmann::ordered_json metric_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace detail

inline std::string config_fingerprint(const EvalReport& report, const InputInfo& input) {
    return to_hex(fnv1a64(detail::config_canonical(report, input)));
}

/// Machine-readable report. Field order is fixed, so identical runs render
/// byte-identical documents. The worker count is an execution detail and
/// deliberately not part of the report.
inline nlohmann::ordered_json report_to_json(const EvalReport& report, const InputInfo& input) {
    nlohmann::ordered_json j;
    const auto& c = report.config;
    j["tool"] = "cupcf";
    j["config"] = {
        {"input", {{"path", input.path}, {"format", input.format}, {"checksum", input.checksum}}},
        {"split", report.split_id},
        {"method", to_string(c.method)},
        {"k_folds", c.k_folds},
        {"seed", c.seed},
        {"k_neighbors", c.k_neighbors},
        {"n_values", c.n_values},
        {"thresholds", c.thresholds},
        {"ranking_mode", to_string(c.ranking_mode)},
        {"averaging", to_string(c.averaging)},
        {"clamp", c.clamp},
        {"fingerprint", config_fingerprint(report, input)},
    };
    j["folds"] = nlohmann::ordered_json::array();
    for (const auto& fold : report.folds) {
        nlohmann::ordered_json jf;
        jf["fold"] = fold.fold_index;
        jf["mae"] = fold.mae;
        jf["train_ratings"] = fold.train_count;
        jf["test_ratings"] = fold.test_count;
        jf["cells"] = nlohmann::ordered_json::array();
        for (const auto& cell : fold.cells) {
            jf["cells"].push_back({
                {"n", cell.n},
                {"threshold", cell.threshold},
                {"confusion",
                 {{"a", cell.confusion.a},
                  {"b", cell.confusion.b},
                  {"c", cell.confusion.c},
                  {"d", cell.confusion.d}}},
                {"accuracy", detail::metric_or_null(cell.values.accuracy)},
                {"precision", detail::metric_or_null(cell.values.precision)},
                {"recall", detail::metric_or_null(cell.values.recall)},
            });
        }
        j["folds"].push_back(std::move(jf));
    }
    j["summary"] = {{"mean_mae", report.mean_mae()}};
    return j;
}

namespace detail {

inline std::string metric_cell_text(const std::optional<double>& v) {
    return v ? format_fixed(*v, 4) : std::string("n/a");
}

}  // namespace detail

/// Human-readable report: one table per threshold, folds as row groups,
/// one column per top-N size.
inline std::string report_to_markdown(const EvalReport& report, const InputInfo& input) {
    const auto& c = report.config;
    std::ostringstream out;
    out << "# Evaluation report\n\n";
    out << "- input: `" << input.path << "` (" << input.format << ", checksum `"
        << input.checksum << "`)\n";
    out << "- split: " << report.split_id << "\n";
    out << "- method: " << display_name(c.method) << ", k_neighbors: " << c.k_neighbors
        << ", ranking: " << to_string(c.ranking_mode) << ", averaging: " << to_string(c.averaging)
        << ", clamp: " << (c.clamp ? "on" : "off") << "\n";
    out << "- fingerprint: `" << config_fingerprint(report, input) << "`\n";

    for (int t : c.thresholds) {
        out << "\n## Threshold T = " << t << "\n\n";
        out << "| Fold | Method | T | Metric |";
        for (int n : c.n_values) out << " Top " << n << " |";
        out << "\n|---|---|---|---|";
        for (std::size_t i = 0; i < c.n_values.size(); ++i) out << "---|";
        out << "\n";

        for (const auto& fold : report.folds) {
            struct RowSpec {
                const char* name;
                std::optional<double> MetricValues::*member;
            };
            static constexpr RowSpec kRows[] = {
                {"Accuracy", &MetricValues::accuracy},
                {"Precision", &MetricValues::precision},
                {"Recall", &MetricValues::recall},
            };
            bool first_row = true;
            for (const auto& row : kRows) {
                out << "| " << (first_row ? std::to_string(fold.fold_index + 1) : std::string())
                    << " | " << (first_row ? display_name(c.method) : "") << " | "
                    << (first_row ? std::to_string(t) : std::string()) << " | " << row.name
                    << " |";
                for (int n : c.n_values) {
                    for (const auto& cell : fold.cells) {
                        if (cell.n == n && cell.threshold == t) {
                            out << ' ' << detail::metric_cell_text(cell.values.*row.member)
                                << " |";
                            break;
                        }
                    }
                }
                out << "\n";
                first_row = false;
            }
            out << "| | | | MAE |";
            for (std::size_t i = 0; i < c.n_values.size(); ++i) {
                out << ' ' << format_fixed(fold.mae, 4) << " |";
            }
            out << "\n";
        }
    }
    out << "\nMean MAE over folds: " << format_fixed(report.mean_mae(), 4) << "\n";
    return out.str();
}

/// Flat cell export: one row per (fold, N, T).
inline std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "fold,n,threshold,a,b,c,d,accuracy,precision,recall,mae\n";
    for (const auto& fold : report.folds) {
        for (const auto& cell : fold.cells) {
            out << fold.fold_index << ',' << cell.n << ',' << cell.threshold << ','
                << cell.confusion.a << ',' << cell.confusion.b << ',' << cell.confusion.c << ','
                << cell.confusion.d << ',';
            if (cell.values.accuracy) out << format_full(*cell.values.accuracy);
            out << ',';
            if (cell.values.precision) out << format_full(*cell.values.precision);
            out << ',';
            if (cell.values.recall) out << format_full(*cell.values.recall);
            out << ',' << format_full(fold.mae) << '\n';
        }
    }
    return out.str();
}

}  // namespace cupcf
