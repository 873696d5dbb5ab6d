#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cupcf/detail/parallel.hpp"
#include "cupcf/errors.hpp"
#include "cupcf/ratings.hpp"
#include "cupcf/similarity.hpp"

namespace cupcf {

struct PredictConfig {
    int k_neighbors = 300;
    bool clamp = true;
};

/// Combined prediction for one (user, item) pair, with the per-measure
/// components and whether each measure fell back to the user's mean.
struct Prediction {
    UserId user = 0;
    ItemId item = 0;
    double value = 0.0;  // mean of the components, clamped to scale if enabled
    double nhsm_component = 0.0;
    double pearson_component = 0.0;
    bool nhsm_fellback = false;
    bool pearson_fellback = false;
};

struct Neighbor {
    std::size_t index;  // dense user index
    double similarity;
};

struct MeasurePrediction {
    double value;
    bool fellback;
};

inline double clamp_to_scale(double value) {
    return std::clamp(value, static_cast<double>(RatingsMatrix::kScaleMin),
                      static_cast<double>(RatingsMatrix::kScaleMax));
}

/// The k users most similar to the active user, descending by raw
/// similarity, ties broken by ascending user identifier. Self is excluded;
/// fewer than k are returned when the population is smaller.
inline std::vector<Neighbor> select_neighbors(const SimilarityMatrix& sim,
                                              std::size_t user_idx, int k) {
    if (k < 1) throw ConfigError("neighbor count must be at least 1, got " + std::to_string(k));
    std::vector<Neighbor> all;
    all.reserve(sim.size() > 0 ? sim.size() - 1 : 0);
    for (std::size_t v = 0; v < sim.size(); ++v) {
        if (v == user_idx) continue;
        all.push_back({v, sim.at(user_idx, v)});
    }
    // user indices ascend with identifiers, so index order is the tie rule
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.index < b.index;
    });
    if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
    return all;
}

/// Per-user top-k neighbor lists, precomputed once per similarity matrix.
class NeighborIndex {
public:
    NeighborIndex(const SimilarityMatrix& sim, int k, int workers = 1)
        : k_(k), per_user_(sim.size()) {
        detail::parallel_for(sim.size(), workers,
                             [&](std::size_t u) { per_user_[u] = select_neighbors(sim, u, k); });
    }

    std::span<const Neighbor> neighbors(std::size_t user_idx) const {
        return per_user_[user_idx];
    }

    int k() const { return k_; }

private:
    int k_;
    std::vector<std::vector<Neighbor>> per_user_;
};

/// Weighted deviation-from-mean over the given neighbors, restricted to
/// those who rated the item with nonzero similarity. Falls back to the
/// active user's mean when no neighbor qualifies.
inline MeasurePrediction predict_from_neighbors(const RatingsMatrix& matrix,
                                                const std::vector<UserStats>& stats,
                                                std::span<const Neighbor> neighbors,
                                                std::size_t user_idx, ItemId item) {
    const double user_mean = stats[user_idx].mean;
    const auto item_idx = matrix.item_index(item);
    if (!item_idx) return {user_mean, true};

    double num = 0.0;
    double den = 0.0;
    bool any = false;
    for (const auto& nb : neighbors) {
        if (nb.similarity == 0.0) continue;
        const auto r = matrix.rating(nb.index, *item_idx);
        if (!r) continue;
        num += (*r - stats[nb.index].mean) * nb.similarity;
        den += std::abs(nb.similarity);
        any = true;
    }
    if (!any) return {user_mean, true};
    return {user_mean + num / den, false};
}

/// Single-measure prediction for one (user, item) pair.
/// Throws ColdUserError when the user is absent from the training matrix.
inline MeasurePrediction predict_with_measure(const RatingsMatrix& matrix,
                                              const std::vector<UserStats>& stats,
                                              const SimilarityMatrix& sim, UserId user,
                                              ItemId item, const PredictConfig& config) {
    const auto user_idx = matrix.user_index(user);
    if (!user_idx) throw ColdUserError("user " + std::to_string(user) + " not in training data");
    const auto neighbors = select_neighbors(sim, *user_idx, config.k_neighbors);
    return predict_from_neighbors(matrix, stats, neighbors, *user_idx, item);
}

namespace detail {

inline Prediction combine(UserId user, ItemId item, MeasurePrediction nhsm,
                          MeasurePrediction pearson, const PredictConfig& config) {
    Prediction p;
    p.user = user;
    p.item = item;
    p.nhsm_component = nhsm.value;
    p.pearson_component = pearson.value;
    p.nhsm_fellback = nhsm.fellback;
    p.pearson_fellback = pearson.fellback;
    p.value = (nhsm.value + pearson.value) / 2.0;
    if (config.clamp) p.value = clamp_to_scale(p.value);
    return p;
}

}  // namespace detail

/// Combined prediction: arithmetic mean of the two measures' predictions,
/// clamped into the rating scale when configured.
inline Prediction cup_predict(const RatingsMatrix& matrix, const std::vector<UserStats>& stats,
                              const SimilarityMatrix& nhsm_sim,
                              const SimilarityMatrix& pearson_sim, UserId user, ItemId item,
                              const PredictConfig& config) {
    const auto nhsm = predict_with_measure(matrix, stats, nhsm_sim, user, item, config);
    const auto pearson = predict_with_measure(matrix, stats, pearson_sim, user, item, config);
    return detail::combine(user, item, nhsm, pearson, config);
}

/// Fast path over precomputed neighbor lists; takes a dense user index.
inline Prediction cup_predict_cached(const RatingsMatrix& matrix,
                                     const std::vector<UserStats>& stats,
                                     const NeighborIndex& nhsm_idx,
                                     const NeighborIndex& pearson_idx, std::size_t user_idx,
                                     ItemId item, const PredictConfig& config) {
    const auto nhsm =
        predict_from_neighbors(matrix, stats, nhsm_idx.neighbors(user_idx), user_idx, item);
    const auto pearson =
        predict_from_neighbors(matrix, stats, pearson_idx.neighbors(user_idx), user_idx, item);
    return detail::combine(matrix.user_at(user_idx), item, nhsm, pearson, config);
}

/// One prediction per training-universe item the user has not rated,
/// ascending item identifier.
inline std::vector<Prediction> predict_all_unrated(const RatingsMatrix& matrix,
                                                   const std::vector<UserStats>& stats,
                                                   const SimilarityMatrix& nhsm_sim,
                                                   const SimilarityMatrix& pearson_sim,
                                                   UserId user, const PredictConfig& config) {
    const auto user_idx = matrix.user_index(user);
    if (!user_idx) throw ColdUserError("user " + std::to_string(user) + " not in training data");

    const auto nhsm_neighbors = select_neighbors(nhsm_sim, *user_idx, config.k_neighbors);
    const auto pearson_neighbors = select_neighbors(pearson_sim, *user_idx, config.k_neighbors);

    std::vector<Prediction> out;
    auto row = matrix.user_row(*user_idx);
    std::size_t next_rated = 0;
    for (std::size_t i = 0; i < matrix.item_count(); ++i) {
        if (next_rated < row.size() && row[next_rated].item == i) {
            ++next_rated;
            continue;
        }
        const ItemId item = matrix.item_at(i);
        const auto nhsm =
            predict_from_neighbors(matrix, stats, nhsm_neighbors, *user_idx, item);
        const auto pearson =
            predict_from_neighbors(matrix, stats, pearson_neighbors, *user_idx, item);
        out.push_back(detail::combine(user, item, nhsm, pearson, config));
    }
    return out;
}

}  // namespace cupcf
