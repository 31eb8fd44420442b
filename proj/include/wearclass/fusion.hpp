/**
 * @file fusion.hpp
 * @brief Descriptor fusion: early concatenation, co-transduction over two similarity
 *        graphs, and late averaging of class distributions.
 */
#pragma once

#include "wearclass/classify.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearclass {

/// [a | b]. Throws std::invalid_argument if either part is empty.
std::vector<double> early_fuse(std::span<const double> a, std::span<const double> b);

enum class Metric { l1, l2, chi2 };

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);

/// chi2 is 0.5 * sum (u - v)^2 / (u + v), skipping terms with u + v = 0.
double descriptor_distance(Metric metric, std::span<const double> u, std::span<const double> v);

/// Median of the distances over all unordered pairs; 1 when that median is 0.
double median_pairwise_distance(const FeatureMatrix& items, Metric metric);

/// Square similarity table, row-major.
struct SimilarityMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;

    std::size_t size() const { return ids.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
};

/// s_ij = exp(-d_ij / sigma), sigma = median_pairwise_distance(items). Needs at least two items.
SimilarityMatrix similarity_from_descriptors(const FeatureMatrix& items, const std::vector<std::string>& ids,
                                             Metric metric);
/// Same with a given sigma (for example one fitted on a training subset).
SimilarityMatrix similarity_with_sigma(const FeatureMatrix& items, const std::vector<std::string>& ids, Metric metric,
                                       double sigma);

/// Row-stochastic matrix, row-major n x n.
struct TransitionMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// Rows of @p s divided by their sums. Throws std::invalid_argument on a zero row.
TransitionMatrix transition_matrix(const SimilarityMatrix& s);

/**
 * @brief Label propagation from a clamped source set.
 *
 * f starts at 1 on @p sources and 0 elsewhere; each step sets f <- P f and re-clamps the
 * sources to 1. Returns f for every item (sources included, at 1).
 */
std::vector<double> graph_transduction(const TransitionMatrix& P, const std::vector<std::size_t>& sources, int steps);

struct CotransOptions {
    int neighbors_per_round = 3;  ///< p
    int rounds = 3;               ///< m
    int steps = 50;               ///< graph transduction iterations
};

struct RankedItem {
    std::size_t index = 0;
    int round = 0;       ///< 1-based round in which the item entered a pool
    double score = 0.0;  ///< transduction score that selected it
};

/**
 * @brief Co-transduction retrieval for one query.
 *
 * Y1 = Y2 = {query}, X1 = X2 = everything else. Each round, using the pools as they stand
 * at the start of the round: transduction on P1 from Y1 picks the p best items of X1 not yet
 * in Y2 and adds them to Y2; transduction on P2 from Y2 picks the p best of X2 not yet in Y1
 * and adds them to Y1; then X1 -= Y1 and X2 -= Y2. Stops early when both pools run dry.
 * The ranking lists every item that entered a pool, by round, then score, then index,
 * without the query and without duplicates.
 */
std::vector<RankedItem> cotransduce(const SimilarityMatrix& s1, const SimilarityMatrix& s2, std::size_t query,
                                    const CotransOptions& options = {});

/// Single-graph counterpart: each round adds the p best unranked items to the source set.
std::vector<RankedItem> transduction_rank(const SimilarityMatrix& s, std::size_t query,
                                          const CotransOptions& options = {});

/**
 * @brief k-NN vote over the first k retrieved items.
 *
 * @p labels holds one label per item (the query's entry is ignored). Votes are weighted for
 * tie-breaking by 1 / (1 + rank). Throws std::invalid_argument when fewer than k items are retrieved.
 */
std::string cotransduction_classify(const SimilarityMatrix& s1, const SimilarityMatrix& s2, std::size_t query,
                                    const std::vector<std::string>& labels, int k, const CotransOptions& options = {});

/// Elementwise mean of two distributions over the same classes in the same order.
ClassDistribution late_fuse(const ClassDistribution& a, const ClassDistribution& b);

}  // namespace wearclass
