#pragma once

// Property suites shared by the unit tests and the acceptance runner.
// Each routine returns human-readable failure descriptions; empty = pass.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cupcf/cupcf.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

namespace proptest {

using Failures = std::vector<std::string>;

inline void note(Failures& f, const std::string& msg) {
    if (f.size() < 20) f.push_back(msg);  // cap the noise, one is already fatal
}

/// Symmetry, range bounds and zero diagonal for both measures.
inline Failures similarity_symmetry_and_range(int n_matrices = 200) {
    Failures fail;
    for (int t = 0; t < n_matrices; ++t) {
        const auto matrix = testutil::random_matrix(1000 + t, 3 + t % 10, 3 + t % 8, 0.55);
        for (auto measure : {cupcf::Measure::nhsm, cupcf::Measure::pearson}) {
            const auto sim = cupcf::build_similarity_matrix(matrix, measure);
            const double lo = measure == cupcf::Measure::nhsm ? 0.0 : -1.0;
            for (std::size_t u = 0; u < sim.size(); ++u) {
                if (sim.at(u, u) != 0.0) {
                    note(fail, "nonzero self-similarity at seed " + std::to_string(1000 + t));
                }
                for (std::size_t v = u + 1; v < sim.size(); ++v) {
                    if (sim.at(u, v) != sim.at(v, u)) {
                        note(fail, "asymmetric pair at seed " + std::to_string(1000 + t));
                    }
                    if (sim.at(u, v) < lo || sim.at(u, v) > 1.0) {
                        note(fail, "similarity out of range at seed " + std::to_string(1000 + t) +
                                       ": " + cupcf::format_full(sim.at(u, v)));
                    }
                }
            }
        }
    }
    return fail;
}

/// Library similarities agree with the naive transcription within 1e-10.
inline Failures similarity_oracle_equivalence(int n_matrices = 100) {
    Failures fail;
    for (int t = 0; t < n_matrices; ++t) {
        const auto records = testutil::random_records(2000 + t, 10, 10, 0.5);
        const cupcf::RatingsMatrix matrix(records);
        const auto table = oracle::to_table(records);
        const auto nhsm = cupcf::build_similarity_matrix(matrix, cupcf::Measure::nhsm);
        const auto pearson = cupcf::build_similarity_matrix(matrix, cupcf::Measure::pearson);
        for (std::size_t u = 0; u < matrix.user_count(); ++u) {
            for (std::size_t v = u + 1; v < matrix.user_count(); ++v) {
                const int uid = matrix.user_at(u);
                const int vid = matrix.user_at(v);
                if (std::abs(nhsm.at(u, v) - oracle::nhsm(table, uid, vid)) > 1e-10) {
                    note(fail, "nhsm oracle mismatch at seed " + std::to_string(2000 + t));
                }
                if (std::abs(pearson.at(u, v) - oracle::pearson(table, uid, vid)) > 1e-10) {
                    note(fail, "pearson oracle mismatch at seed " + std::to_string(2000 + t));
                }
            }
        }
    }
    return fail;
}

/// Combination identity, betweenness, clamping, and exact mean fallback.
inline Failures prediction_combination(int n_matrices = 50) {
    Failures fail;
    for (int t = 0; t < n_matrices; ++t) {
        const auto matrix = testutil::random_matrix(3000 + t, 4 + t % 6, 4 + t % 5, 0.6);
        const auto stats = matrix.all_user_stats();
        const auto nhsm = cupcf::build_similarity_matrix(matrix, cupcf::Measure::nhsm);
        const auto pearson = cupcf::build_similarity_matrix(matrix, cupcf::Measure::pearson);
        const cupcf::SimilarityMatrix zero(cupcf::Measure::nhsm, matrix.user_count());
        for (std::size_t u = 0; u < matrix.user_count(); ++u) {
            const auto user = matrix.user_at(u);
            const auto raw = cupcf::predict_all_unrated(matrix, stats, nhsm, pearson, user,
                                                        {300, false});
            const auto clamped = cupcf::predict_all_unrated(matrix, stats, nhsm, pearson, user,
                                                            {300, true});
            for (std::size_t i = 0; i < raw.size(); ++i) {
                const auto& p = raw[i];
                const double mean = (p.nhsm_component + p.pearson_component) / 2.0;
                if (std::abs(p.value - mean) > 1e-12) {
                    note(fail, "combined value is not the component mean");
                }
                const double lo = std::min(p.nhsm_component, p.pearson_component);
                const double hi = std::max(p.nhsm_component, p.pearson_component);
                if (p.value < lo - 1e-12 || p.value > hi + 1e-12) {
                    note(fail, "combined value outside component envelope");
                }
                if (clamped[i].value < 1.0 || clamped[i].value > 5.0) {
                    note(fail, "clamped value escaped the rating scale");
                }
            }
            const auto fallback =
                cupcf::predict_all_unrated(matrix, stats, zero, zero, user, {300, false});
            for (const auto& p : fallback) {
                if (p.value != stats[u].mean || !p.nhsm_fellback || !p.pearson_fellback) {
                    note(fail, "zero-similarity prediction is not the exact user mean");
                }
            }
        }
    }
    return fail;
}

/// Scaling every similarity by c > 0 leaves predictions unchanged.
inline Failures prediction_scaling_invariance() {
    Failures fail;
    for (int t = 0; t < 20; ++t) {
        const auto matrix = testutil::random_matrix(4000 + t, 6, 6, 0.6);
        const auto stats = matrix.all_user_stats();
        const auto nhsm = cupcf::build_similarity_matrix(matrix, cupcf::Measure::nhsm);
        const auto pearson = cupcf::build_similarity_matrix(matrix, cupcf::Measure::pearson);
        for (double c : {0.5, 3.75, 1e6}) {
            auto scaled_values = nhsm.values();
            for (auto& v : scaled_values) v *= c;
            const cupcf::SimilarityMatrix scaled(cupcf::Measure::nhsm, matrix.user_count(),
                                                 std::move(scaled_values));
            for (std::size_t u = 0; u < matrix.user_count(); ++u) {
                const auto user = matrix.user_at(u);
                const auto base =
                    cupcf::predict_all_unrated(matrix, stats, nhsm, pearson, user, {300, true});
                const auto alt =
                    cupcf::predict_all_unrated(matrix, stats, scaled, pearson, user, {300, true});
                for (std::size_t i = 0; i < base.size(); ++i) {
                    if (std::abs(base[i].value - alt[i].value) > 1e-10) {
                        note(fail, "prediction changed under similarity scaling");
                    }
                }
            }
        }
    }
    return fail;
}

/// k-fold test sets are disjoint, exhaustive, near-equal, and seed-stable.
inline Failures kfold_partition() {
    Failures fail;
    for (int t = 0; t < 10; ++t) {
        const auto matrix = testutil::random_matrix(5000 + t, 8, 8, 0.7);
        const auto all = matrix.to_records();
        for (int k = 2; k <= 10 && k <= static_cast<int>(all.size()); ++k) {
            const auto folds = cupcf::kfold_split(matrix, k, 99 + t);
            const auto again = cupcf::kfold_split(matrix, k, 99 + t);
            std::multiset<std::tuple<int, int, int>> seen;
            std::size_t min_size = all.size(), max_size = 0;
            for (int f = 0; f < k; ++f) {
                const auto& test = folds[f].test;
                const auto& test2 = again[f].test;
                if (test.size() != test2.size()) {
                    note(fail, "same seed produced different folds");
                }
                for (std::size_t i = 0; i < test.size(); ++i) {
                    if (test[i].user != test2[i].user || test[i].item != test2[i].item) {
                        note(fail, "same seed produced different folds");
                    }
                    seen.insert({test[i].user, test[i].item, test[i].rating});
                }
                min_size = std::min(min_size, test.size());
                max_size = std::max(max_size, test.size());
                if (folds[f].train.rating_count() + test.size() != all.size()) {
                    note(fail, "train+test does not cover the corpus");
                }
            }
            if (max_size - min_size > 1) note(fail, "fold sizes differ by more than one");
            std::multiset<std::tuple<int, int, int>> expected;
            for (const auto& r : all) expected.insert({r.user, r.item, r.rating});
            if (seen != expected) note(fail, "test sets do not partition the ratings");
        }
    }
    return fail;
}

/// merge_lists idempotence, commutativity, membership and size bounds.
inline Failures merge_properties() {
    Failures fail;
    std::mt19937_64 gen(6007);
    for (int t = 0; t < 200; ++t) {
        auto make_list = [&gen](int user) {
            std::vector<cupcf::RecommendationList::Entry> entries;
            const int count = 1 + static_cast<int>(gen() % 6);
            for (int item = 1; item <= 8; ++item) {
                if (static_cast<int>(entries.size()) == count) break;
                if (gen() % 2 == 0) {
                    entries.push_back({item, 1.0 + static_cast<double>(gen() % 9) / 2.0});
                }
            }
            if (entries.empty()) entries.push_back({1, 3.0});
            return cupcf::top_n(user, entries, std::max<int>(1, count));
        };
        const auto a = make_list(7);
        const auto b = make_list(7);
        const int n = 1 + static_cast<int>(gen() % 8);
        const auto ab = cupcf::merge_lists(a, b, n);
        const auto ba = cupcf::merge_lists(b, a, n);
        const auto aa = cupcf::merge_lists(a, a, static_cast<int>(a.entries.size()));

        if (ab.entries.size() != ba.entries.size()) note(fail, "merge not commutative (size)");
        for (std::size_t i = 0; i < std::min(ab.entries.size(), ba.entries.size()); ++i) {
            if (ab.entries[i].item != ba.entries[i].item ||
                ab.entries[i].value != ba.entries[i].value) {
                note(fail, "merge not commutative (content)");
            }
        }
        if (aa.entries.size() != a.entries.size()) note(fail, "merge not idempotent");
        for (std::size_t i = 0; i < std::min(aa.entries.size(), a.entries.size()); ++i) {
            if (aa.entries[i].item != a.entries[i].item) note(fail, "merge not idempotent");
        }
        if (ab.entries.size() > a.entries.size() + b.entries.size()) {
            note(fail, "merged list larger than the union");
        }
        const std::size_t floor_size =
            std::min<std::size_t>(n, std::max(a.entries.size(), b.entries.size()));
        if (ab.entries.size() < floor_size) note(fail, "merged list dropped items");
        for (const auto& e : ab.entries) {
            auto in = [&e](const cupcf::RecommendationList& l) {
                for (const auto& x : l.entries) {
                    if (x.item == e.item) return true;
                }
                return false;
            };
            if (!in(a) && !in(b)) note(fail, "merged item not present in either input");
        }
    }
    return fail;
}

/// Feeding the actual ratings back as predictions yields MAE 0 and a
/// confusion matrix with no off-diagonal mass for any threshold.
inline Failures perfect_oracle_metrics() {
    Failures fail;
    for (int t = 0; t < 20; ++t) {
        const auto records = testutil::random_records(7000 + t, 6, 8, 0.6);
        std::vector<std::pair<double, int>> pairs;
        std::vector<std::pair<cupcf::ItemId, int>> actuals;
        std::vector<cupcf::RecommendationList::Entry> entries;
        for (const auto& r : records) {
            if (r.user != records.front().user) continue;
            pairs.push_back({static_cast<double>(r.rating), r.rating});
            actuals.push_back({r.item, r.rating});
            entries.push_back({r.item, static_cast<double>(r.rating)});
        }
        if (cupcf::mae(pairs) != 0.0) note(fail, "perfect predictions gave nonzero MAE");
        const auto list =
            cupcf::top_n(records.front().user, entries, static_cast<int>(entries.size()));
        for (int threshold : {1, 2, 3, 4, 5}) {
            const auto cm = cupcf::confusion_for_user(list, actuals, threshold);
            if (cm.b != 0 || cm.c != 0) {
                note(fail, "perfect predictions produced off-diagonal confusion counts");
            }
            if (cm.total() != entries.size()) note(fail, "confusion total lost pairs");
        }
    }
    return fail;
}

inline Failures all_property_suites() {
    Failures fail;
    auto append = [&fail](Failures more) {
        for (auto& m : more) note(fail, m);
    };
    append(similarity_symmetry_and_range());
    append(similarity_oracle_equivalence());
    append(prediction_combination());
    append(prediction_scaling_invariance());
    append(kfold_partition());
    append(merge_properties());
    append(perfect_oracle_metrics());
    return fail;
}

}  // namespace proptest
