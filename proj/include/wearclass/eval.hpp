/**
 * @file eval.hpp
 * @brief Stratified Monte Carlo evaluation, accuracy, ROC AUC and wrapper feature ranking.
 */
#pragma once

#include "wearclass/classify.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wearclass {

struct BinaryCounts {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;
};

/// K x K counts, rows = true class, columns = predicted class.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long>> counts;

    static ConfusionMatrix zeros(std::vector<std::string> classes);
    /// Throws std::invalid_argument for labels outside `classes`.
    void add(const std::string& truth, const std::string& predicted);
    void merge(const ConfusionMatrix& other);
    long total() const;
    long correct() const;
};

/// (TP + TN) / total. Throws std::invalid_argument when the total is 0.
double accuracy(const BinaryCounts& c);
/// trace / total. Throws std::invalid_argument when the total is 0.
double accuracy(const ConfusionMatrix& c);

struct SplitPlan {
    std::uint64_t seed = 0;
    std::vector<std::size_t> train;  ///< ascending
    std::vector<std::size_t> test;   ///< ascending
};

/**
 * @brief Per-class seeded shuffles; round-half-up(frac * n_class) items of each class go to train.
 *
 * The per-class train count is kept within [1, n_class - 1] so both sides see every class.
 * Throws std::invalid_argument for frac outside (0, 1) or a class with fewer than 2 samples.
 */
SplitPlan stratified_split(const std::vector<std::string>& labels, double frac, std::uint64_t seed);

/// Mann-Whitney AUC of @p scores for positives (label true) over negatives; ties count 0.5.
/// Throws std::invalid_argument unless both classes are present.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Fits on the train indices and returns one predicted label per test index.
using FitPredict =
    std::function<std::vector<std::string>(const std::vector<std::size_t>& train, const std::vector<std::size_t>& test)>;

struct EvalOptions {
    int runs = 20;
    double train_fraction = 0.75;
    std::uint64_t seed = 0;  ///< run r uses seed + r
};

struct EvalReport {
    std::uint64_t seed = 0;
    double train_fraction = 0.75;
    std::vector<double> accuracies;
    double mean_accuracy = 0.0;
    ConfusionMatrix confusion;  ///< summed over runs
    std::string config;         ///< caller-supplied snapshot, stored verbatim
};

/// Throws EvalError carrying the failing run index when @p fit_predict throws.
EvalReport monte_carlo_eval(const std::vector<std::string>& labels, const FitPredict& fit_predict,
                            const EvalOptions& options = {});

class EvalError : public std::runtime_error {
public:
    EvalError(int run, const std::string& what);
    int run() const { return run_; }

private:
    int run_;
};

std::string report_json(const EvalReport& report);
/// "run,accuracy" rows.
std::string report_csv(const EvalReport& report);
/// Header "truth,<classes...>", one row per true class.
std::string confusion_csv(const ConfusionMatrix& c);

struct RankOptions {
    SvmOptions svm;
    int repeats = 5;
    double train_fraction = 0.75;
    std::uint64_t seed = 0;
};

struct RankRound {
    std::string removed;
    double auc = 0.0;  ///< mean held-out AUC of the remaining features
};

struct FeatureRanking {
    std::vector<std::string> ranked;  ///< most relevant first
    std::vector<RankRound> rounds;    ///< elimination order
};

/**
 * @brief Backward elimination with held-out AUC as the criterion.
 *
 * Each round scores every candidate removal by the mean AUC of an SVM over `repeats`
 * stratified splits (the same seeds for every candidate), using the probability of the
 * second class in class order as the score. The removal with the highest AUC wins, ties
 * to the earlier feature. Throws std::invalid_argument unless the labels have exactly two
 * classes and there are at least two features.
 */
FeatureRanking wrapper_rank(const FeatureMatrix& X, const std::vector<std::string>& labels,
                            const std::vector<std::string>& feature_names, const RankOptions& options = {});

}  // namespace wearclass
