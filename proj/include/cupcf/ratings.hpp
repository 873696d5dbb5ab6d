#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cupcf/errors.hpp"

namespace cupcf {

using UserId = std::int32_t;
using ItemId = std::int32_t;

/// One explicit rating: integer value on the 1..5 scale.
struct RatingRecord {
    UserId user;
    ItemId item;
    int rating;

    friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// Per-user rating statistics. The rated-item set itself lives in the
/// owning RatingsMatrix row (see RatingsMatrix::user_row).
struct UserStats {
    UserId user = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // population form: sqrt(sum (r - mean)^2 / count)
    std::size_t count = 0;
};

/// Immutable sparse user x item rating matrix.
///
/// Users and items are kept as ascending identifier lists; all internal
/// access is by dense index (the position in those lists), so index order
/// equals identifier order everywhere.
class RatingsMatrix {
public:
    static constexpr int kScaleMin = 1;
    static constexpr int kScaleMax = 5;

    struct RatedItem {
        std::uint32_t item;  // dense item index
        std::int32_t rating;
    };

    RatingsMatrix() = default;

    /// Builds the matrix from an arbitrary-order record list.
    /// Throws RangeError on out-of-scale ratings and DuplicateError on
    /// repeated (user, item) pairs.
    explicit RatingsMatrix(std::vector<RatingRecord> records) {
        for (const auto& r : records) {
            if (r.rating < kScaleMin || r.rating > kScaleMax) {
                throw RangeError("rating " + std::to_string(r.rating) +
                                 " for user " + std::to_string(r.user) + " item " +
                                 std::to_string(r.item) + " outside scale [" +
                                 std::to_string(kScaleMin) + "," +
                                 std::to_string(kScaleMax) + "]");
            }
        }
        std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
            return std::tie(a.user, a.item) < std::tie(b.user, b.item);
        });
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].user == records[i - 1].user &&
                records[i].item == records[i - 1].item) {
                throw DuplicateError("duplicate rating for user " +
                                     std::to_string(records[i].user) + " item " +
                                     std::to_string(records[i].item));
            }
        }

        users_.reserve(records.size());
        items_.reserve(records.size());
        for (const auto& r : records) {
            users_.push_back(r.user);
            items_.push_back(r.item);
        }
        sort_unique(users_);
        sort_unique(items_);

        row_offsets_.assign(users_.size() + 1, 0);
        entries_.reserve(records.size());
        item_sums_.assign(items_.size(), 0);
        item_counts_.assign(items_.size(), 0);

        std::size_t row = 0;
        for (const auto& r : records) {
            while (users_[row] != r.user) ++row;  // records sorted by user
            const auto item_idx = static_cast<std::uint32_t>(
                std::lower_bound(items_.begin(), items_.end(), r.item) - items_.begin());
            entries_.push_back({item_idx, r.rating});
            row_offsets_[row + 1] = entries_.size();
            item_sums_[item_idx] += r.rating;
            item_counts_[item_idx] += 1;
            rating_sum_ += r.rating;
        }
        // rows with no ratings cannot occur (users_ derives from records),
        // but forward-fill keeps offsets monotone for the empty matrix case
        for (std::size_t u = 1; u <= users_.size(); ++u) {
            row_offsets_[u] = std::max(row_offsets_[u], row_offsets_[u - 1]);
        }
    }

    std::size_t user_count() const { return users_.size(); }
    std::size_t item_count() const { return items_.size(); }
    std::size_t rating_count() const { return entries_.size(); }

    const std::vector<UserId>& users() const { return users_; }
    const std::vector<ItemId>& items() const { return items_; }

    UserId user_at(std::size_t idx) const { return users_[idx]; }
    ItemId item_at(std::size_t idx) const { return items_[idx]; }

    std::optional<std::size_t> user_index(UserId id) const {
        auto it = std::lower_bound(users_.begin(), users_.end(), id);
        if (it == users_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - users_.begin());
    }

    std::optional<std::size_t> item_index(ItemId id) const {
        auto it = std::lower_bound(items_.begin(), items_.end(), id);
        if (it == items_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - items_.begin());
    }

    /// Ratings of one user, sorted by dense item index.
    std::span<const RatedItem> user_row(std::size_t user_idx) const {
        return {entries_.data() + row_offsets_[user_idx],
                entries_.data() + row_offsets_[user_idx + 1]};
    }

    std::optional<int> rating(std::size_t user_idx, std::size_t item_idx) const {
        auto row = user_row(user_idx);
        auto it = std::lower_bound(row.begin(), row.end(), item_idx,
                                   [](const RatedItem& e, std::size_t i) { return e.item < i; });
        if (it == row.end() || it->item != item_idx) return std::nullopt;
        return it->rating;
    }

    /// Midpoint of the rating scale, the reference point for significance
    /// weighting (3 on the 1..5 scale).
    double scale_mid() const { return (kScaleMin + kScaleMax) / 2.0; }

    /// Mean and population standard deviation of one user's ratings.
    /// Throws NoDataError for an unknown user.
    UserStats user_stats(UserId id) const {
        auto idx = user_index(id);
        if (!idx) throw NoDataError("no ratings for user " + std::to_string(id));
        return user_stats_at(*idx);
    }

    UserStats user_stats_at(std::size_t user_idx) const {
        auto row = user_row(user_idx);
        assert(!row.empty());
        double sum = 0.0;
        for (const auto& e : row) sum += e.rating;
        const double mean = sum / static_cast<double>(row.size());
        double sq = 0.0;
        for (const auto& e : row) {
            const double d = e.rating - mean;
            sq += d * d;
        }
        return {users_[user_idx], mean, std::sqrt(sq / static_cast<double>(row.size())),
                row.size()};
    }

    std::vector<UserStats> all_user_stats() const {
        std::vector<UserStats> stats;
        stats.reserve(user_count());
        for (std::size_t u = 0; u < user_count(); ++u) stats.push_back(user_stats_at(u));
        return stats;
    }

    /// Mean rating of one item over every user who rated it.
    /// Throws NoDataError for an unknown item.
    double item_mean(ItemId id) const {
        auto idx = item_index(id);
        if (!idx) throw NoDataError("no ratings for item " + std::to_string(id));
        return item_mean_at(*idx);
    }

    double item_mean_at(std::size_t item_idx) const {
        assert(item_counts_[item_idx] > 0);  // every item in the universe has a rating
        return static_cast<double>(item_sums_[item_idx]) /
               static_cast<double>(item_counts_[item_idx]);
    }

    /// Mean over all stored ratings. Throws NoDataError on an empty matrix.
    double global_mean() const {
        if (entries_.empty()) throw NoDataError("matrix holds no ratings");
        return static_cast<double>(rating_sum_) / static_cast<double>(entries_.size());
    }

    /// All ratings in canonical order (user ascending, item ascending).
    std::vector<RatingRecord> to_records() const {
        std::vector<RatingRecord> out;
        out.reserve(rating_count());
        for (std::size_t u = 0; u < user_count(); ++u) {
            for (const auto& e : user_row(u)) {
                out.push_back({users_[u], items_[e.item], e.rating});
            }
        }
        return out;
    }

private:
    template <typename T>
    static void sort_unique(std::vector<T>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::vector<UserId> users_;
    std::vector<ItemId> items_;
    std::vector<RatedItem> entries_;        // CSR payload, row-major by user
    std::vector<std::size_t> row_offsets_;  // size user_count()+1
    std::vector<std::int64_t> item_sums_;
    std::vector<std::int64_t> item_counts_;
    std::int64_t rating_sum_ = 0;
};

}  // namespace cupcf
