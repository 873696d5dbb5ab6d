#pragma once

#include <algorithm>
#include <ostream>
#include <vector>

#include "cupcf/errors.hpp"
#include "cupcf/io.hpp"
#include "cupcf/predict.hpp"

namespace cupcf {

/// Ranked recommendation list for one user: predicted value descending,
/// ties by ascending item identifier, at most n_requested entries.
struct RecommendationList {
    struct Entry {
        ItemId item;
        double value;
    };

    UserId user = 0;
    std::vector<Entry> entries;
    int n_requested = 0;
};

namespace detail {

inline void sort_entries(std::vector<RecommendationList::Entry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.item < b.item;
    });
}

}  // namespace detail

/// The n highest-valued candidates. Fewer than n in, shorter list out.
inline RecommendationList top_n(UserId user, std::vector<RecommendationList::Entry> candidates,
                                int n) {
    if (n < 1) throw ConfigError("top-n size must be at least 1, got " + std::to_string(n));
    detail::sort_entries(candidates);
    if (candidates.size() > static_cast<std::size_t>(n)) {
        candidates.resize(static_cast<std::size_t>(n));
    }
    return {user, std::move(candidates), n};
}

inline RecommendationList top_n(const std::vector<Prediction>& predictions, int n) {
    std::vector<RecommendationList::Entry> candidates;
    candidates.reserve(predictions.size());
    UserId user = predictions.empty() ? 0 : predictions.front().user;
    for (const auto& p : predictions) candidates.push_back({p.item, p.value});
    return top_n(user, std::move(candidates), n);
}

/// Merges two lists for the same user: union of items, an item present in
/// both keeps the higher value, re-sorted and truncated to n.
inline RecommendationList merge_lists(const RecommendationList& a, const RecommendationList& b,
                                      int n) {
    if (a.user != b.user) {
        throw ContractError("cannot merge lists of different users (" + std::to_string(a.user) +
                            " vs " + std::to_string(b.user) + ")");
    }
    std::vector<RecommendationList::Entry> merged = a.entries;
    for (const auto& eb : b.entries) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const auto& ea) { return ea.item == eb.item; });
        if (it == merged.end()) {
            merged.push_back(eb);
        } else if (eb.value > it->value) {
            it->value = eb.value;
        }
    }
    return top_n(a.user, std::move(merged), n);
}

/// CSV rows "user,rank,item,score", rank starting at 1.
inline void write_recommendations_csv(std::ostream& out, const RecommendationList& list,
                                      bool header = true) {
    if (header) out << "user,rank,item,score\n";
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        out << list.user << ',' << (i + 1) << ',' << list.entries[i].item << ','
            << format_fixed(list.entries[i].value, 6) << '\n';
    }
}

}  // namespace cupcf
