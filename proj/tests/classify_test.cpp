#include "wearclass/classify.hpp"
#include "wearclass/image.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace wearclass;

namespace {

FeatureMatrix random_nonnegative(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureMatrix X(n, std::vector<double>(d));
    for (auto& row : X)
        for (double& v : row) v = u(rng);
    return X;
}

// Gaussian clusters around per-class centres.
void clusters(const std::vector<std::vector<double>>& centres, int per_class, double spread, std::mt19937_64& rng,
              FeatureMatrix& X, std::vector<std::string>& y, const std::vector<std::string>& names) {
    std::normal_distribution<double> noise(0.0, spread);
    for (std::size_t c = 0; c < centres.size(); ++c)
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> row = centres[c];
            for (double& v : row) v += noise(rng);
            X.push_back(row);
            y.push_back(names[c]);
        }
}

}  // namespace

TEST(IntersectionKernel, Examples) {
    EXPECT_DOUBLE_EQ(intersection_kernel(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 0}), 2.0);
    const std::vector<double> u{0.5, 2.0, 3.5};
    EXPECT_DOUBLE_EQ(intersection_kernel(u, u), 6.0);
    EXPECT_DOUBLE_EQ(intersection_kernel(std::vector<double>{0, 0}, std::vector<double>{5, 7}), 0.0);
    EXPECT_THROW(intersection_kernel(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(IntersectionKernel, BoundedBySmallerMass) {
    std::mt19937_64 rng(5);
    const auto X = random_nonnegative(40, 12, rng);
    for (std::size_t i = 0; i + 1 < X.size(); ++i) {
        const double su = std::accumulate(X[i].begin(), X[i].end(), 0.0);
        const double sv = std::accumulate(X[i + 1].begin(), X[i + 1].end(), 0.0);
        EXPECT_LE(intersection_kernel(X[i], X[i + 1]), std::min(su, sv) + 1e-12);
    }
}

TEST(IntersectionKernel, GramMatrixIsPositiveSemidefinite) {
    std::mt19937_64 rng(11);
    const auto X = random_nonnegative(50, 20, rng);
    Eigen::MatrixXd G(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            G(i, j) = intersection_kernel(X[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
}

TEST(Kernels, LinearAndRbf) {
    const std::vector<double> u{1, 2}, v{3, 5};
    EXPECT_DOUBLE_EQ(kernel_value({KernelKind::linear, 0.0}, u, v), 13.0);
    EXPECT_NEAR(kernel_value({KernelKind::rbf, 0.5}, u, v), std::exp(-0.5 * 13.0), 1e-15);
    EXPECT_EQ(parse_kernel(kernel_name(KernelKind::rbf)), KernelKind::rbf);
    EXPECT_THROW(parse_kernel("poly"), std::invalid_argument);
}

TEST(ClassOrder, CanonicalThenLexicographic) {
    EXPECT_EQ(class_order({"H", "L", "H", "M"}), (std::vector<std::string>{"L", "M", "H"}));
    EXPECT_EQ(class_order({"b", "H", "a"}), (std::vector<std::string>{"H", "a", "b"}));
}

TEST(MinMaxScaler, FitsRangeAndClamps) {
    const FeatureMatrix X{{0, 10, 5}, {2, 20, 5}, {4, 30, 5}};
    const auto s = MinMaxScaler::fit(X);
    EXPECT_EQ(s.transform(std::vector<double>{2, 25, 5}), (std::vector<double>{0.5, 0.75, 0.0}));
    EXPECT_EQ(s.transform(std::vector<double>{-1, 99, 7}), (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(BinarySvm, SatisfiesKktConditions) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.15);
    FeatureMatrix X;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2 ? 1 : -1;
        X.push_back({std::clamp(0.5 + 0.2 * label + noise(rng), 0.0, 1.0), std::clamp(0.5 + noise(rng), 0.0, 1.0)});
        y.push_back(label);
    }
    for (double C : {0.5, 1.0, 10.0}) {
        SmoStats stats;
        const auto m = train_binary_svm(X, y, {}, C, 1e-3, &stats);
        EXPECT_LT(stats.kkt_gap, 1e-3);
        double balance = 0.0;
        for (std::size_t s = 0; s < m.coefficients.size(); ++s) {
            EXPECT_LE(std::abs(m.coefficients[s]), C + 1e-12);
            balance += m.coefficients[s];
        }
        EXPECT_NEAR(balance, 0.0, 1e-9);
        // Each training point: alpha = 0 -> y f >= 1, 0 < alpha < C -> y f = 1, alpha = C -> y f <= 1.
        for (std::size_t i = 0; i < X.size(); ++i) {
            double alpha = 0.0;
            for (std::size_t s = 0; s < m.support_vectors.size(); ++s)
                if (m.support_vectors[s] == X[i]) alpha = std::abs(m.coefficients[s]);
            const double margin = y[i] * m.decision(X[i]);
            if (alpha <= 0.0) EXPECT_GE(margin, 1.0 - 2e-3);
            else if (alpha >= C) EXPECT_LE(margin, 1.0 + 2e-3);
            else EXPECT_NEAR(margin, 1.0, 2e-3);
        }
    }
}

TEST(BinarySvm, RejectsBadInput) {
    EXPECT_THROW(train_binary_svm({{0.0}}, {2}, {}, 1.0), std::invalid_argument);
    EXPECT_THROW(train_binary_svm({{0.0}}, {1}, {}, 0.0), std::invalid_argument);
}

TEST(Sigmoid, SlopeIsStationaryPoint) {
    const std::vector<double> f{-2.0, -1.1, -0.3, 0.2, 0.4, 1.0, 1.5, -0.1};
    const std::vector<int> y{-1, -1, 1, -1, 1, 1, 1, -1};
    const double A = fit_sigmoid_slope(f, y);
    EXPECT_LT(A, 0.0);
    const double tp = 5.0 / 6.0, tn = 1.0 / 6.0;
    auto nll = [&](double a) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double p = 1.0 / (1.0 + std::exp(a * f[i]));
            const double t = y[i] > 0 ? tp : tn;
            s -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        }
        return s;
    };
    const double h = 1e-5;
    EXPECT_NEAR((nll(A + h) - nll(A - h)) / (2 * h), 0.0, 1e-6);
    EXPECT_LE(nll(A), nll(A + 0.1));
    EXPECT_LE(nll(A), nll(A - 0.1));
}

TEST(Coupling, RecoversConsistentDistribution) {
    const std::vector<double> p{0.5, 0.3, 0.2};
    std::vector<std::vector<double>> r(3, std::vector<double>(3, 0.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) r[i][j] = p[i] / (p[i] + p[j]);
    const auto q = couple_pairwise(r);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(q[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)], 1e-9);
    const auto two = couple_pairwise({{0.0, 0.7}, {0.3, 0.0}});
    EXPECT_DOUBLE_EQ(two[0], 0.7);
    EXPECT_DOUBLE_EQ(two[1], 0.3);
}

TEST(SvmModel, SeparableTrainsToPerfectAccuracy) {
    FeatureMatrix X;
    std::vector<std::string> y;
    for (int i = 0; i < 20; ++i) {
        X.push_back({i < 10 ? 0.1 + 0.01 * i : 0.8 + 0.01 * i, 0.37 * (i % 7)});
        y.push_back(i < 10 ? "L" : "H");
    }
    const auto model = SvmModel::train(X, y);
    for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(model.predict(X[i]).label, y[i]);
}

TEST(SvmModel, ConflictingDuplicatesDoNotCrash) {
    FeatureMatrix X{{0.1, 0.2}, {0.1, 0.2}, {0.9, 0.8}, {0.5, 0.5}};
    std::vector<std::string> y{"L", "H", "H", "L"};
    const auto model = SvmModel::train(X, y);
    int correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) correct += model.predict(X[i]).label == y[i];
    EXPECT_LT(correct, 4);
}

TEST(SvmModel, SingleClassAndDimensionErrors) {
    EXPECT_THROW(SvmModel::train({{1.0}, {2.0}}, {"L", "L"}), std::invalid_argument);
    const auto model = SvmModel::train({{1.0}, {2.0}}, {"L", "H"});
    EXPECT_THROW(model.predict(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(SvmModel, ThreeClassDistributions) {
    std::mt19937_64 rng(21);
    FeatureMatrix X;
    std::vector<std::string> y;
    clusters({{1, 1}, {4, 1}, {2.5, 4}}, 15, 0.4, rng, X, y, {"L", "M", "H"});
    const auto model = SvmModel::train(X, y);
    EXPECT_EQ(model.classes(), (std::vector<std::string>{"L", "M", "H"}));

    const auto deep = model.predict(std::vector<double>{4.0, 1.0});
    EXPECT_EQ(deep.label, "M");
    EXPECT_GT(deep.distribution.prob("M"), 0.5);

    std::uniform_real_distribution<double> u(-1.0, 6.0);
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> x{u(rng), u(rng)};
        const auto pred = model.predict(x);
        ASSERT_EQ(pred.distribution.probs.size(), 3u);
        double sum = 0.0;
        for (double p : pred.distribution.probs) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
        EXPECT_EQ(pred.label, model.classes()[pred.distribution.argmax()]);
        const auto again = model.predict(x);
        EXPECT_EQ(again.distribution.probs, pred.distribution.probs);
    }
}

TEST(SvmModel, TwoClassesMatchDirectBinarySvm) {
    std::mt19937_64 rng(8);
    FeatureMatrix X;
    std::vector<std::string> y;
    clusters({{1, 2, 0}, {2, 1, 1}}, 20, 0.6, rng, X, y, {"L", "H"});
    const auto model = SvmModel::train(X, y);
    const auto scaler = MinMaxScaler::fit(X);
    std::vector<int> yb;
    for (const auto& l : y) yb.push_back(l == "L" ? 1 : -1);
    const auto direct = train_binary_svm(scaler.transform(X), yb, {}, 1.0);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        const double f = direct.decision(scaler.transform(x));
        const auto pred = model.predict(x);
        EXPECT_NEAR(model.pairs()[0].decision(scaler.transform(x)), f, 1e-12);
        if (std::abs(f) > 1e-9) EXPECT_EQ(pred.label, f > 0 ? "L" : "H");
        EXPECT_EQ(pred.label, pred.voted_label);
        EXPECT_NEAR(pred.distribution.prob("L"), std::clamp(direct.probability(scaler.transform(x)), 1e-7, 1 - 1e-7),
                    1e-12);
    }
}

TEST(SvmModel, ScalerDependsOnTrainingDataOnly) {
    std::mt19937_64 rng(13);
    FeatureMatrix X;
    std::vector<std::string> y;
    clusters({{0, 0}, {3, 3}}, 10, 0.5, rng, X, y, {"L", "H"});
    const auto model = SvmModel::train(X, y);
    const auto before = model.scaler();
    model.predict(std::vector<double>{100.0, -100.0});
    EXPECT_EQ(model.scaler().lo, before.lo);
    EXPECT_EQ(model.scaler().hi, before.hi);
    EXPECT_EQ(before.lo, MinMaxScaler::fit(X).lo);
}

TEST(SvmModel, JsonRoundTrip) {
    std::mt19937_64 rng(17);
    FeatureMatrix X;
    std::vector<std::string> y;
    clusters({{1, 1}, {3, 1}, {2, 3}}, 8, 0.5, rng, X, y, {"L", "M", "H"});
    SvmOptions options;
    options.C = 2.5;
    const auto model = SvmModel::train(X, y, options);
    const auto copy = SvmModel::from_json(model.to_json());
    EXPECT_EQ(copy.classes(), model.classes());
    EXPECT_EQ(copy.options().C, 2.5);
    for (const auto& x : X) EXPECT_EQ(copy.predict(x).distribution.probs, model.predict(x).distribution.probs);

    auto text = model.to_json();
    text.replace(text.find("\"version\": 1"), 12, "\"version\": 9");
    EXPECT_THROW(SvmModel::from_json(text), DataError);
    EXPECT_THROW(SvmModel::from_json("{not json"), DataError);
}

TEST(Knn, Examples) {
    EXPECT_EQ(knn_classify(std::vector<double>{0.2, 1.0, 0.5}, {"L", "H", "L"}, 1), "H");
    EXPECT_EQ(knn_classify(std::vector<double>{0.9, 0.8, 0.7, 0.1}, {"A", "A", "B", "B"}, 3), "A");
    EXPECT_EQ(knn_classify(std::vector<double>{0.9, 0.8}, {"A", "B"}, 2), "A");
    EXPECT_EQ(knn_classify(std::vector<double>{0.8, 0.9}, {"A", "B"}, 2), "B");
    // Equal counts and equal sums fall back to class order.
    EXPECT_EQ(knn_classify(std::vector<double>{0.5, 0.5}, {"H", "L"}, 2), "L");
    EXPECT_THROW(knn_classify(std::vector<double>{0.5}, {"L"}, 2), std::invalid_argument);
}
