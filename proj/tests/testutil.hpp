#pragma once

// Shared fixtures and generators for the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "cupcf/ratings.hpp"

namespace testutil {

/// Five-user, four-item worked example used throughout the unit tests.
/// u1..u5 are ids 1..5, i1..i4 are ids 1..4.
inline std::vector<cupcf::RatingRecord> toy_records() {
    return {
        {1, 2, 5}, {1, 3, 4}, {1, 4, 3},
        {2, 1, 4}, {2, 2, 4}, {2, 4, 2},
        {3, 3, 1}, {3, 4, 4},
        {4, 1, 5}, {4, 2, 2}, {4, 3, 4}, {4, 4, 4},
        {5, 1, 1}, {5, 3, 3},
    };
}

inline cupcf::RatingsMatrix toy_matrix() { return cupcf::RatingsMatrix(toy_records()); }

/// Random rating matrix: every cell filled with probability `density`,
/// values uniform in 1..5. Deterministic per seed.
inline std::vector<cupcf::RatingRecord> random_records(std::uint64_t seed, int users, int items,
                                                       double density = 0.5) {
    std::mt19937_64 gen(seed);
    auto unit = [&gen] {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    std::vector<cupcf::RatingRecord> records;
    for (int u = 1; u <= users; ++u) {
        for (int i = 1; i <= items; ++i) {
            if (unit() < density) {
                const int rating = 1 + static_cast<int>(gen() % 5);
                records.push_back({u, i, rating});
            }
        }
    }
    // a user with zero ratings cannot exist in a rating-triple corpus;
    // guarantee at least one record so the matrix is never empty
    if (records.empty()) records.push_back({1, 1, 3});
    return records;
}

inline cupcf::RatingsMatrix random_matrix(std::uint64_t seed, int users, int items,
                                          double density = 0.5) {
    return cupcf::RatingsMatrix(random_records(seed, users, items, density));
}

}  // namespace testutil
