#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "cupcf/detail/parallel.hpp"
#include "cupcf/errors.hpp"
#include "cupcf/io.hpp"
#include "cupcf/ratings.hpp"

namespace cupcf {

enum class Measure { nhsm, pearson };

inline const char* to_string(Measure m) { return m == Measure::nhsm ? "nhsm" : "pearson"; }

inline Measure measure_from_string(const std::string& s) {
    if (s == "nhsm") return Measure::nhsm;
    if (s == "pearson") return Measure::pearson;
    throw ConfigError("unknown similarity measure '" + s + "' (expected nhsm or pearson)");
}

/// The three sigmoid-shaped factors scored for one co-rated item pair.
struct PssFactors {
    double proximity;     // shrinks as the two ratings move apart, in (0, 0.5]
    double significance;  // grows as both ratings move away from the scale midpoint
    double singularity;   // shrinks as the pair drifts from the item's mean rating
    double product;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Co-rated item pair: dense item index plus both users' ratings.
struct CoRated {
    std::uint32_t item;
    int r_u;
    int r_v;
};

inline std::vector<CoRated> co_rated_items(const RatingsMatrix& matrix, std::size_t u_idx,
                                           std::size_t v_idx) {
    auto row_u = matrix.user_row(u_idx);
    auto row_v = matrix.user_row(v_idx);
    std::vector<CoRated> common;
    std::size_t i = 0, j = 0;
    while (i < row_u.size() && j < row_v.size()) {
        if (row_u[i].item < row_v[j].item) {
            ++i;
        } else if (row_v[j].item < row_u[i].item) {
            ++j;
        } else {
            common.push_back({row_u[i].item, row_u[i].rating, row_v[j].rating});
            ++i;
            ++j;
        }
    }
    return common;
}

}  // namespace detail

/// Co-rated count over the product of the two users' rating counts.
/// Unlike plain Jaccard, the denominator grows with both profile sizes, so
/// a small overlap between two heavy raters counts for little.
inline double jaccard_mod(std::size_t count_u, std::size_t count_v, std::size_t common) {
    if (common == 0) return 0.0;
    return static_cast<double>(common) /
           (static_cast<double>(count_u) * static_cast<double>(count_v));
}

inline double jaccard_mod(const RatingsMatrix& matrix, const UserStats& stats_u,
                          const UserStats& stats_v) {
    auto u = matrix.user_index(stats_u.user);
    auto v = matrix.user_index(stats_v.user);
    if (!u || !v) throw NoDataError("jaccard_mod: user not in matrix");
    return jaccard_mod(stats_u.count, stats_v.count,
                       detail::co_rated_items(matrix, *u, *v).size());
}

/// Scores one co-rated item pair. r_med is the scale midpoint and mu_p the
/// item's mean rating over all users who rated it.
inline PssFactors pss_factors(double r_up, double r_vp, double r_med, double mu_p) {
    const double proximity = 1.0 - detail::sigmoid(std::abs(r_up - r_vp));
    const double significance =
        detail::sigmoid(std::abs(r_up - r_med) * std::abs(r_vp - r_med));
    const double singularity = 1.0 - detail::sigmoid(std::abs((r_up + r_vp) / 2.0 - mu_p));
    return {proximity, significance, singularity, proximity * significance * singularity};
}

/// Rating-preference factor: fades toward 0 as the two users' rating means
/// and spreads diverge, 0.5 when they coincide.
inline double urp_factor(const UserStats& stats_u, const UserStats& stats_v) {
    const double x = std::abs(stats_u.mean - stats_v.mean) *
                     std::abs(stats_u.std_dev - stats_v.std_dev);
    return 1.0 - detail::sigmoid(x);
}

/// Heuristic user similarity in [0, 1]: summed per-item factor products,
/// scaled by the modified Jaccard overlap and the rating-preference factor.
/// Returns 0 when the users share no rated item.
inline double nhsm_similarity(const RatingsMatrix& matrix, const UserStats& stats_u,
                              const UserStats& stats_v) {
    auto u = matrix.user_index(stats_u.user);
    auto v = matrix.user_index(stats_v.user);
    if (!u || !v) throw NoDataError("nhsm_similarity: user not in matrix");

    const auto common = detail::co_rated_items(matrix, *u, *v);
    if (common.empty()) return 0.0;

    const double r_med = matrix.scale_mid();
    double pss_sum = 0.0;
    for (const auto& c : common) {
        pss_sum += pss_factors(c.r_u, c.r_v, r_med, matrix.item_mean_at(c.item)).product;
    }
    const double jpss = pss_sum * jaccard_mod(stats_u.count, stats_v.count, common.size());
    return jpss * urp_factor(stats_u, stats_v);
}

/// Pearson correlation over co-rated items, centering each user on their
/// overall rating mean. Degenerate pairs (no co-rated items, or zero
/// deviation of either user over the co-rated set) score 0, a neutral value
/// that keeps them out of meaningful neighborhoods.
inline double pearson_similarity(const RatingsMatrix& matrix, const UserStats& stats_u,
                                 const UserStats& stats_v) {
    auto u = matrix.user_index(stats_u.user);
    auto v = matrix.user_index(stats_v.user);
    if (!u || !v) throw NoDataError("pearson_similarity: user not in matrix");

    const auto common = detail::co_rated_items(matrix, *u, *v);
    if (common.empty()) return 0.0;

    double num = 0.0, sq_u = 0.0, sq_v = 0.0;
    for (const auto& c : common) {
        const double du = c.r_u - stats_u.mean;
        const double dv = c.r_v - stats_v.mean;
        num += du * dv;
        sq_u += du * du;
        sq_v += dv * dv;
    }
    if (sq_u == 0.0 || sq_v == 0.0) return 0.0;
    const double r = num / (std::sqrt(sq_u) * std::sqrt(sq_v));
    return std::clamp(r, -1.0, 1.0);
}

/// Symmetric user x user similarity matrix for one measure.
/// Diagonal entries are stored as 0: a user is never their own neighbor,
/// so self-similarity is never consulted.
class SimilarityMatrix {
public:
    SimilarityMatrix(Measure measure, std::size_t n)
        : measure_(measure), n_(n), values_(n * n, 0.0) {}

    SimilarityMatrix(Measure measure, std::size_t n, std::vector<double> values)
        : measure_(measure), n_(n), values_(std::move(values)) {
        if (values_.size() != n_ * n_) throw ContractError("similarity value buffer size mismatch");
    }

    Measure measure() const { return measure_; }
    std::size_t size() const { return n_; }

    double at(std::size_t u, std::size_t v) const { return values_[u * n_ + v]; }

    void set_pair(std::size_t u, std::size_t v, double value) {
        values_[u * n_ + v] = value;
        values_[v * n_ + u] = value;
    }

    const std::vector<double>& values() const { return values_; }

private:
    Measure measure_;
    std::size_t n_;
    std::vector<double> values_;
};

/// Fills every unordered user pair once and mirrors it. Rows are scored in
/// parallel; each pair's two cells are written by exactly one worker.
inline SimilarityMatrix build_similarity_matrix(const RatingsMatrix& matrix, Measure measure,
                                                int workers = 1) {
    const std::size_t n = matrix.user_count();
    SimilarityMatrix sim(measure, n);
    const auto stats = matrix.all_user_stats();

    detail::parallel_for(n, workers, [&](std::size_t u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            const double value = measure == Measure::nhsm
                                     ? nhsm_similarity(matrix, stats[u], stats[v])
                                     : pearson_similarity(matrix, stats[u], stats[v]);
            sim.set_pair(u, v, value);
        }
    });
    return sim;
}

/// Debug dump, upper triangle only: "user_a,user_b,value".
inline void dump_similarity_csv(std::ostream& out, const SimilarityMatrix& sim,
                                const RatingsMatrix& matrix) {
    out << "user_a,user_b,value\n";
    for (std::size_t u = 0; u < sim.size(); ++u) {
        for (std::size_t v = u + 1; v < sim.size(); ++v) {
            out << matrix.user_at(u) << ',' << matrix.user_at(v) << ','
                << format_full(sim.at(u, v)) << '\n';
        }
    }
}

}  // namespace cupcf
