#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cupcf/detail/parallel.hpp"
#include "cupcf/errors.hpp"
#include "cupcf/predict.hpp"
#include "cupcf/ratings.hpp"
#include "cupcf/recommend.hpp"
#include "cupcf/similarity.hpp"
#include "cupcf/split.hpp"

namespace cupcf {

/// Counts by actual class (rows) x predicted class (columns):
///   a = negative/negative   b = negative/positive
///   c = positive/negative   d = positive/positive
struct ConfusionMatrix {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
    std::uint64_t d = 0;

    std::uint64_t total() const { return a + b + c + d; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        a += o.a;
        b += o.b;
        c += o.c;
        d += o.d;
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Accuracy/precision/recall; a component is nullopt when its denominator
/// is zero (undefined, not an error).
struct MetricValues {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
};

inline MetricValues metrics(const ConfusionMatrix& cm) {
    MetricValues m;
    if (cm.total() > 0) {
        m.accuracy = static_cast<double>(cm.a + cm.d) / static_cast<double>(cm.total());
    }
    if (cm.b + cm.d > 0) {
        m.precision = static_cast<double>(cm.d) / static_cast<double>(cm.b + cm.d);
    }
    if (cm.c + cm.d > 0) {
        m.recall = static_cast<double>(cm.d) / static_cast<double>(cm.c + cm.d);
    }
    return m;
}

/// Mean absolute error over (predicted, actual) pairs.
inline double mae(std::span<const std::pair<double, int>> pairs) {
    if (pairs.empty()) throw NoDataError("mae over an empty pair list");
    double sum = 0.0;
    for (const auto& [predicted, actual] : pairs) {
        sum += std::abs(predicted - actual);
    }
    return sum / static_cast<double>(pairs.size());
}

/// Classifies the items inside one user's top-N list (built over that
/// user's test items): predicted-positive when the list value >= threshold,
/// actual-positive when the held-out rating >= threshold.
inline ConfusionMatrix confusion_for_user(const RecommendationList& topn,
                                          const std::vector<std::pair<ItemId, int>>& test_actuals,
                                          int threshold) {
    if (threshold < RatingsMatrix::kScaleMin || threshold > RatingsMatrix::kScaleMax) {
        throw ConfigError("threshold " + std::to_string(threshold) + " outside rating scale");
    }
    ConfusionMatrix cm;
    for (const auto& entry : topn.entries) {
        auto it = std::find_if(test_actuals.begin(), test_actuals.end(),
                               [&](const auto& p) { return p.first == entry.item; });
        if (it == test_actuals.end()) {
            throw ContractError("top-n entry " + std::to_string(entry.item) +
                                " is not one of the user's test items");
        }
        const bool predicted_positive = entry.value >= threshold;
        const bool actual_positive = it->second >= threshold;
        if (actual_positive) {
            (predicted_positive ? cm.d : cm.c) += 1;
        } else {
            (predicted_positive ? cm.b : cm.a) += 1;
        }
    }
    return cm;
}

/// Which predictor drives the run: the combined predictor or one measure
/// alone (the in-house baselines).
enum class Method { cup, nhsm, pearson };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::cup: return "cup";
        case Method::nhsm: return "nhsm";
        default: return "pearson";
    }
}

inline const char* display_name(Method m) {
    switch (m) {
        case Method::cup: return "CUPCF";
        case Method::nhsm: return "NHSM";
        default: return "Pearson";
    }
}

inline Method method_from_string(const std::string& s) {
    if (s == "cup" || s == "cupcf") return Method::cup;
    if (s == "nhsm" || s == "nhsm-only") return Method::nhsm;
    if (s == "pearson" || s == "pearson-only") return Method::pearson;
    throw ConfigError("unknown method '" + s + "' (expected cup, nhsm or pearson)");
}

/// How top-N lists are ranked: by the combined prediction, or by merging
/// the two per-measure lists.
enum class RankingMode { combined, merged };

inline const char* to_string(RankingMode r) {
    return r == RankingMode::combined ? "combined" : "merged";
}

inline RankingMode ranking_mode_from_string(const std::string& s) {
    if (s == "combined" || s == "cup") return RankingMode::combined;
    if (s == "merged") return RankingMode::merged;
    throw ConfigError("unknown ranking mode '" + s + "' (expected combined or merged)");
}

enum class Averaging { micro, macro };

inline const char* to_string(Averaging a) { return a == Averaging::micro ? "micro" : "macro"; }

inline Averaging averaging_from_string(const std::string& s) {
    if (s == "micro") return Averaging::micro;
    if (s == "macro") return Averaging::macro;
    throw ConfigError("unknown averaging '" + s + "' (expected micro or macro)");
}

struct ExperimentConfig {
    int k_folds = 5;
    std::uint64_t seed = 42;
    int k_neighbors = 300;
    std::vector<int> n_values = {5, 10, 15, 20, 30};
    std::vector<int> thresholds = {3, 4};
    Method method = Method::cup;
    RankingMode ranking_mode = RankingMode::combined;
    Averaging averaging = Averaging::micro;
    bool clamp = true;
    int workers = 1;  // 0 = hardware concurrency; result is identical either way
};

/// One (N, T) report cell: pooled confusion counts plus the metric values
/// under the configured averaging.
struct MetricCell {
    int n = 0;
    int threshold = 0;
    ConfusionMatrix confusion;  // summed over users
    MetricValues values;
};

struct FoldReport {
    int fold_index = 0;
    double mae = 0.0;  // identical across every (N, T) cell of the fold
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::vector<MetricCell> cells;
};

struct EvalReport {
    ExperimentConfig config;
    std::string split_id;
    std::vector<FoldReport> folds;

    double mean_mae() const {
        double sum = 0.0;
        for (const auto& f : folds) sum += f.mae;
        return folds.empty() ? 0.0 : sum / static_cast<double>(folds.size());
    }
};

namespace detail {

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.k_folds < 2) throw ConfigError("k_folds must be at least 2");
    if (cfg.k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
    if (cfg.n_values.empty()) throw ConfigError("n_values must not be empty");
    for (int n : cfg.n_values) {
        if (n < 1) throw ConfigError("top-n size must be at least 1, got " + std::to_string(n));
    }
    if (cfg.thresholds.empty()) throw ConfigError("thresholds must not be empty");
    for (int t : cfg.thresholds) {
        if (t < RatingsMatrix::kScaleMin || t > RatingsMatrix::kScaleMax) {
            throw ConfigError("threshold " + std::to_string(t) + " outside rating scale");
        }
    }
}

/// Per test pair: the value scored against the actual rating, plus the two
/// per-measure values used for ranking.
struct PairEval {
    double value = 0.0;
    double nhsm_value = 0.0;
    double pearson_value = 0.0;
};

struct UserCellAccumulator {
    ConfusionMatrix pooled;
    // macro averaging: running sums of per-user defined metrics
    double accuracy_sum = 0.0;
    std::size_t accuracy_n = 0;
    double precision_sum = 0.0;
    std::size_t precision_n = 0;
    double recall_sum = 0.0;
    std::size_t recall_n = 0;

    void add_user(const ConfusionMatrix& cm) {
        pooled += cm;
        const auto m = metrics(cm);
        if (m.accuracy) {
            accuracy_sum += *m.accuracy;
            ++accuracy_n;
        }
        if (m.precision) {
            precision_sum += *m.precision;
            ++precision_n;
        }
        if (m.recall) {
            recall_sum += *m.recall;
            ++recall_n;
        }
    }

    MetricCell finish(int n, int threshold, Averaging averaging) const {
        MetricCell cell;
        cell.n = n;
        cell.threshold = threshold;
        cell.confusion = pooled;
        if (averaging == Averaging::micro) {
            cell.values = metrics(pooled);
        } else {
            if (accuracy_n > 0) cell.values.accuracy = accuracy_sum / accuracy_n;
            if (precision_n > 0) cell.values.precision = precision_sum / precision_n;
            if (recall_n > 0) cell.values.recall = recall_sum / recall_n;
        }
        return cell;
    }
};

inline FoldReport evaluate_fold(const FoldSplit& fold, const ExperimentConfig& cfg) {
    const RatingsMatrix& train = fold.train;
    const auto stats = train.all_user_stats();
    const double global_fallback =
        train.rating_count() > 0 ? train.global_mean() : train.scale_mid();

    const bool need_nhsm = cfg.method != Method::pearson;
    const bool need_pearson = cfg.method != Method::nhsm;

    std::optional<NeighborIndex> nhsm_idx;
    std::optional<NeighborIndex> pearson_idx;
    if (need_nhsm) {
        const auto sim = build_similarity_matrix(train, Measure::nhsm, cfg.workers);
        nhsm_idx.emplace(sim, cfg.k_neighbors, cfg.workers);
    }
    if (need_pearson) {
        const auto sim = build_similarity_matrix(train, Measure::pearson, cfg.workers);
        pearson_idx.emplace(sim, cfg.k_neighbors, cfg.workers);
    }

    auto finalize = [&](double raw) { return cfg.clamp ? clamp_to_scale(raw) : raw; };

    // score every test pair into its own slot, then reduce in fixed order
    std::vector<PairEval> evals(fold.test.size());
    parallel_for(fold.test.size(), cfg.workers, [&](std::size_t i) {
        const auto& r = fold.test[i];
        const auto user_idx = train.user_index(r.user);
        if (!user_idx) {
            evals[i] = {global_fallback, global_fallback, global_fallback};
            return;
        }
        double nhsm_raw = 0.0;
        double pearson_raw = 0.0;
        if (need_nhsm) {
            nhsm_raw = predict_from_neighbors(train, stats, nhsm_idx->neighbors(*user_idx),
                                              *user_idx, r.item)
                           .value;
        }
        if (need_pearson) {
            pearson_raw = predict_from_neighbors(train, stats, pearson_idx->neighbors(*user_idx),
                                                 *user_idx, r.item)
                              .value;
        }
        double value = 0.0;
        switch (cfg.method) {
            case Method::cup: value = finalize((nhsm_raw + pearson_raw) / 2.0); break;
            case Method::nhsm: value = finalize(nhsm_raw); break;
            case Method::pearson: value = finalize(pearson_raw); break;
        }
        evals[i] = {value, finalize(nhsm_raw), finalize(pearson_raw)};
    });

    FoldReport report;
    report.fold_index = fold.fold_index;
    report.train_count = train.rating_count();
    report.test_count = fold.test.size();

    std::vector<std::pair<double, int>> mae_pairs;
    mae_pairs.reserve(fold.test.size());
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
        mae_pairs.emplace_back(evals[i].value, fold.test[i].rating);
    }
    report.mae = mae_pairs.empty() ? 0.0 : mae(mae_pairs);

    // accumulate per-user confusion per (threshold, n) cell;
    // test records are in canonical order, so users form contiguous runs
    std::vector<UserCellAccumulator> accs(cfg.thresholds.size() * cfg.n_values.size());
    std::size_t begin = 0;
    while (begin < fold.test.size()) {
        std::size_t end = begin;
        while (end < fold.test.size() && fold.test[end].user == fold.test[begin].user) ++end;

        const UserId user = fold.test[begin].user;
        std::vector<std::pair<ItemId, int>> actuals;
        std::vector<RecommendationList::Entry> combined;
        std::vector<RecommendationList::Entry> by_nhsm;
        std::vector<RecommendationList::Entry> by_pearson;
        actuals.reserve(end - begin);
        combined.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            actuals.emplace_back(fold.test[i].item, fold.test[i].rating);
            combined.push_back({fold.test[i].item, evals[i].value});
            if (cfg.ranking_mode == RankingMode::merged) {
                by_nhsm.push_back({fold.test[i].item, evals[i].nhsm_value});
                by_pearson.push_back({fold.test[i].item, evals[i].pearson_value});
            }
        }

        for (std::size_t ti = 0; ti < cfg.thresholds.size(); ++ti) {
            for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
                const int n = cfg.n_values[ni];
                RecommendationList list =
                    cfg.ranking_mode == RankingMode::merged
                        ? merge_lists(top_n(user, by_nhsm, n), top_n(user, by_pearson, n), n)
                        : top_n(user, combined, n);
                accs[ti * cfg.n_values.size() + ni].add_user(
                    confusion_for_user(list, actuals, cfg.thresholds[ti]));
            }
        }
        begin = end;
    }

    for (std::size_t ti = 0; ti < cfg.thresholds.size(); ++ti) {
        for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
            report.cells.push_back(accs[ti * cfg.n_values.size() + ni].finish(
                cfg.n_values[ni], cfg.thresholds[ti], cfg.averaging));
        }
    }
    return report;
}

}  // namespace detail

/// Runs the experiment over externally supplied folds.
inline EvalReport run_experiment(const std::vector<FoldSplit>& folds,
                                 const ExperimentConfig& config, std::string split_id) {
    detail::validate_config(config);
    if (folds.empty()) throw ConfigError("no folds to evaluate");
    EvalReport report;
    report.config = config;
    report.split_id = std::move(split_id);
    report.folds.reserve(folds.size());
    for (const auto& fold : folds) {
        report.folds.push_back(detail::evaluate_fold(fold, config));
    }
    return report;
}

/// Runs the full seeded k-fold experiment on one dataset.
inline EvalReport run_experiment(const RatingsMatrix& dataset, const ExperimentConfig& config) {
    detail::validate_config(config);
    auto folds = kfold_split(dataset, config.k_folds, config.seed);
    return run_experiment(folds, config,
                          "kfold(k=" + std::to_string(config.k_folds) +
                              ",seed=" + std::to_string(config.seed) + ")");
}

/// Reference-band checks for the standard MovieLens-100K setup. Returns
/// one message per violated band; empty means all bands hold.
inline std::vector<std::string> check_report_bands(const EvalReport& report) {
    std::vector<std::string> violations;
    for (const auto& fold : report.folds) {
        if (fold.mae < 0.70 || fold.mae > 0.78) {
            violations.push_back("fold " + std::to_string(fold.fold_index) + ": MAE " +
                                 format_fixed(fold.mae, 4) + " outside [0.70, 0.78]");
        }
    }

    // precision at fixed T must not grow with N (0.005 slack per step)
    for (const auto& fold : report.folds) {
        for (int t : report.config.thresholds) {
            const MetricCell* prev = nullptr;
            for (const auto& cell : fold.cells) {
                if (cell.threshold != t) continue;
                if (prev && prev->values.precision && cell.values.precision &&
                    *cell.values.precision > *prev->values.precision + 0.005) {
                    violations.push_back(
                        "fold " + std::to_string(fold.fold_index) + " T=" + std::to_string(t) +
                        ": precision rose from " + format_fixed(*prev->values.precision, 4) +
                        " (N=" + std::to_string(prev->n) + ") to " +
                        format_fixed(*cell.values.precision, 4) +
                        " (N=" + std::to_string(cell.n) + ")");
                }
                prev = &cell;
            }
        }
    }

    // smallest-N cell at T=3: precision and recall bands, mean over folds
    double precision_sum = 0.0, recall_sum = 0.0;
    std::size_t count = 0;
    for (const auto& fold : report.folds) {
        for (const auto& cell : fold.cells) {
            if (cell.threshold == 3 && cell.n == report.config.n_values.front() &&
                cell.values.precision && cell.values.recall) {
                precision_sum += *cell.values.precision;
                recall_sum += *cell.values.recall;
                ++count;
                break;
            }
        }
    }
    if (count > 0) {
        const double mean_precision = precision_sum / static_cast<double>(count);
        const double mean_recall = recall_sum / static_cast<double>(count);
        if (mean_precision < 0.88 || mean_precision > 0.94) {
            violations.push_back("mean top-" + std::to_string(report.config.n_values.front()) +
                                 " T=3 precision " + format_fixed(mean_precision, 4) +
                                 " outside [0.88, 0.94]");
        }
        if (mean_recall < 0.98) {
            violations.push_back("mean top-" + std::to_string(report.config.n_values.front()) +
                                 " T=3 recall " + format_fixed(mean_recall, 4) + " below 0.98");
        }
    }
    return violations;
}

}  // namespace cupcf
