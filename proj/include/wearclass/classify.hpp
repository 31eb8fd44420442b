/**
 * @file classify.hpp
 * @brief Kernel SVM (one-vs-one, calibrated class distributions) and k-NN over similarities.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearclass {

using FeatureMatrix = std::vector<std::vector<double>>;

enum class KernelKind { intersection, linear, rbf };

std::string_view kernel_name(KernelKind kind);
KernelKind parse_kernel(std::string_view name);

struct KernelSpec {
    KernelKind kind = KernelKind::intersection;
    double gamma = 1.0;  ///< rbf only
};

/// sum_i min(u_i, v_i). Throws std::invalid_argument on length mismatch.
double intersection_kernel(std::span<const double> u, std::span<const double> v);
double kernel_value(const KernelSpec& kernel, std::span<const double> u, std::span<const double> v);

/// Distinct labels in canonical order: L, M, H first, any others lexicographically after.
std::vector<std::string> class_order(const std::vector<std::string>& labels);

/// Per-feature min-max scaling to [0, 1]; values outside the fitted range are clamped.
/// Constant features map to 0.
struct MinMaxScaler {
    std::vector<double> lo;
    std::vector<double> hi;

    static MinMaxScaler fit(const FeatureMatrix& X);
    std::vector<double> transform(std::span<const double> x) const;
    FeatureMatrix transform(const FeatureMatrix& X) const;
};

struct ClassDistribution {
    std::vector<std::string> classes;
    std::vector<double> probs;

    /// Index of the largest probability; ties go to the earlier class.
    std::size_t argmax() const;
    double prob(std::string_view label) const;
};

/// Two-class SVM in the already-scaled feature space. Positive class is +1.
struct BinarySvm {
    KernelSpec kernel;
    FeatureMatrix support_vectors;
    std::vector<double> coefficients;  ///< y_i * alpha_i
    double bias = 0.0;                 ///< f(x) = sum coef_i K(sv_i, x) + bias
    double platt_a = 0.0;              ///< P(+1 | x) = 1 / (1 + exp(platt_a * f(x)))

    double decision(std::span<const double> x) const;
    double probability(std::span<const double> x) const;
};

struct SmoStats {
    int iterations = 0;
    double kkt_gap = 0.0;  ///< max violation at exit
};

/**
 * @brief SMO with second-order working-set selection.
 *
 * Stops when the maximal KKT violation falls below @p tolerance. Labels are +1/-1.
 * The sigmoid slope is fitted on the training decision values with the intercept fixed
 * at zero, so P(+1) > 0.5 exactly when the decision value is positive.
 */
BinarySvm train_binary_svm(const FeatureMatrix& X, const std::vector<int>& y, const KernelSpec& kernel, double C,
                           double tolerance = 1e-3, SmoStats* stats = nullptr);

/// Slope A of 1 / (1 + exp(A f)) by Newton's method on smoothed targets.
double fit_sigmoid_slope(const std::vector<double>& decision_values, const std::vector<int>& y);

/// Pairwise coupling: r(i, j) = P(i | i or j), r(i, j) + r(j, i) = 1. Returns a distribution.
std::vector<double> couple_pairwise(const std::vector<std::vector<double>>& r);

struct SvmOptions {
    KernelSpec kernel;
    double C = 1.0;
    double tolerance = 1e-3;
};

class SvmModel {
public:
    struct Prediction {
        std::string label;        ///< argmax of the distribution
        std::string voted_label;  ///< one-vs-one vote winner (ties by class order)
        ClassDistribution distribution;
    };

    /// Throws std::invalid_argument for fewer than two classes, ragged rows or C <= 0.
    static SvmModel train(const FeatureMatrix& X, const std::vector<std::string>& y, const SvmOptions& options = {});

    Prediction predict(std::span<const double> x) const;

    const std::vector<std::string>& classes() const { return classes_; }
    const MinMaxScaler& scaler() const { return scaler_; }
    std::size_t dimension() const { return scaler_.lo.size(); }
    const SvmOptions& options() const { return options_; }
    /// Pair models for (classes[i], classes[j]), i < j, in row-major pair order.
    const std::vector<BinarySvm>& pairs() const { return pairs_; }

    std::string to_json() const;
    /// Throws DataError on malformed documents or unsupported versions.
    static SvmModel from_json(std::string_view text);

private:
    SvmOptions options_;
    std::vector<std::string> classes_;
    MinMaxScaler scaler_;
    std::vector<BinarySvm> pairs_;
};

/// Majority label among the k most similar items; ties by summed similarity, then class order.
std::string knn_classify(std::span<const double> similarities, const std::vector<std::string>& labels, int k);

}  // namespace wearclass
