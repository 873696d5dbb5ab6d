#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cupcf/errors.hpp"
#include "cupcf/io.hpp"
#include "cupcf/ratings.hpp"

namespace cupcf {

/// One cross-validation fold: training matrix plus held-out test ratings.
/// Test records are kept in canonical (user, item) order.
struct FoldSplit {
    int fold_index = 0;
    RatingsMatrix train;
    std::vector<RatingRecord> test;
};

namespace detail {

/// Unbiased bounded draw, stable across platforms (unlike
/// std::uniform_int_distribution, whose algorithm is unspecified).
inline std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= threshold) return r % bound;
    }
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[bounded_rand(gen, i)]);
    }
}

inline void sort_canonical(std::vector<RatingRecord>& records) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.user, a.item) < std::tie(b.user, b.item);
    });
}

}  // namespace detail

/// Splits the rating set into k near-equal folds with a seeded shuffle.
/// Fold i holds group i as test data and all remaining ratings as training
/// data. The same (matrix, k, seed) triple always produces the identical
/// partition, independent of platform.
inline std::vector<FoldSplit> kfold_split(const RatingsMatrix& matrix, int k,
                                          std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
    if (matrix.rating_count() == 0) throw ConfigError("cannot split an empty matrix");
    if (static_cast<std::size_t>(k) > matrix.rating_count()) {
        throw ConfigError("fold count " + std::to_string(k) + " exceeds rating count " +
                          std::to_string(matrix.rating_count()));
    }

    const auto records = matrix.to_records();
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 gen(seed);
    detail::seeded_shuffle(order, gen);

    const std::size_t n = records.size();
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t rem = n % static_cast<std::size_t>(k);

    std::vector<FoldSplit> folds;
    folds.reserve(static_cast<std::size_t>(k));
    std::size_t offset = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
        std::vector<bool> in_test(n, false);
        for (std::size_t j = offset; j < offset + size; ++j) in_test[order[j]] = true;
        offset += size;

        std::vector<RatingRecord> train_records;
        std::vector<RatingRecord> test_records;
        train_records.reserve(n - size);
        test_records.reserve(size);
        for (std::size_t i = 0; i < n; ++i) {
            (in_test[i] ? test_records : train_records).push_back(records[i]);
        }
        detail::sort_canonical(test_records);
        folds.push_back({f, RatingsMatrix(std::move(train_records)), std::move(test_records)});
    }
    return folds;
}

/// Loads one externally provided train/test file pair as a fold.
/// Throws ConfigError when train and test overlap on a (user, item) pair.
inline FoldSplit load_split_pair(const std::string& train_path, const std::string& test_path,
                                 FileFormat format, int fold_index) {
    RatingsMatrix train = load_ratings(train_path, format);
    std::ifstream in(test_path);
    if (!in) throw Error("cannot open rating file: " + test_path);
    auto test = parse_ratings(in, format);
    detail::sort_canonical(test);
    for (std::size_t i = 1; i < test.size(); ++i) {
        if (test[i].user == test[i - 1].user && test[i].item == test[i - 1].item) {
            throw DuplicateError("duplicate rating for user " + std::to_string(test[i].user) +
                                 " item " + std::to_string(test[i].item) + " in " + test_path);
        }
    }
    for (const auto& r : test) {
        auto u = train.user_index(r.user);
        if (!u) continue;
        auto i = train.item_index(r.item);
        if (i && train.rating(*u, *i)) {
            throw ConfigError("train and test overlap on user " + std::to_string(r.user) +
                              " item " + std::to_string(r.item));
        }
    }
    return {fold_index, std::move(train), std::move(test)};
}

/// Loads the pre-built u1.base/u1.test .. u5.base/u5.test pairs shipped
/// with the MovieLens-100K distribution.
inline std::vector<FoldSplit> load_movielens_splits(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<FoldSplit> folds;
    for (int f = 1; f <= 5; ++f) {
        const auto base = (fs::path(dir) / ("u" + std::to_string(f) + ".base")).string();
        const auto test = (fs::path(dir) / ("u" + std::to_string(f) + ".test")).string();
        if (!fs::exists(base) || !fs::exists(test)) {
            throw ConfigError("split files u" + std::to_string(f) + ".base/.test not found in " +
                              dir);
        }
        folds.push_back(load_split_pair(base, test, FileFormat::movielens_tab, f - 1));
    }
    return folds;
}

}  // namespace cupcf
