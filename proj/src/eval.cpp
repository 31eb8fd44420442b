#include "wearclass/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace wearclass {

ConfusionMatrix ConfusionMatrix::zeros(std::vector<std::string> classes) {
    ConfusionMatrix c;
    c.counts.assign(classes.size(), std::vector<long>(classes.size(), 0));
    c.classes = std::move(classes);
    return c;
}

void ConfusionMatrix::add(const std::string& truth, const std::string& predicted) {
    const auto t = std::find(classes.begin(), classes.end(), truth);
    const auto p = std::find(classes.begin(), classes.end(), predicted);
    if (t == classes.end() || p == classes.end())
        throw std::invalid_argument("confusion: unknown label '" + (t == classes.end() ? truth : predicted) + "'");
    ++counts[static_cast<std::size_t>(t - classes.begin())][static_cast<std::size_t>(p - classes.begin())];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.classes != classes) throw std::invalid_argument("confusion: class sets differ");
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += other.counts[i][j];
}

long ConfusionMatrix::total() const {
    long t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

long ConfusionMatrix::correct() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

double accuracy(const BinaryCounts& c) {
    if (c.tp < 0 || c.tn < 0 || c.fp < 0 || c.fn < 0) throw std::invalid_argument("accuracy: negative count");
    const long total = c.tp + c.tn + c.fp + c.fn;
    if (total == 0) throw std::invalid_argument("accuracy: empty confusion");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

double accuracy(const ConfusionMatrix& c) {
    const long total = c.total();
    if (total == 0) throw std::invalid_argument("accuracy: empty confusion");
    return static_cast<double>(c.correct()) / static_cast<double>(total);
}

SplitPlan stratified_split(const std::vector<std::string>& labels, double frac, std::uint64_t seed) {
    if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("stratified_split: fraction must be in (0, 1)");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    SplitPlan plan;
    plan.seed = seed;
    std::mt19937_64 rng(seed);
    for (const auto& c : class_order(labels)) {
        auto members = by_class[c];
        const std::size_t n = members.size();
        if (n < 2) throw std::invalid_argument("stratified_split: class '" + c + "' has fewer than 2 samples");
        // Fisher-Yates with an explicit draw so plans do not depend on the standard library.
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
            std::swap(members[i], members[j]);
        }
        auto k = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 0.5));
        k = std::clamp<std::size_t>(k, 1, n - 1);
        plan.train.insert(plan.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
        plan.test.insert(plan.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
        i = j + 1;
    }
    double pos = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (positive[i]) {
            pos += 1.0;
            rank_sum += rank[i];
        }
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0.0 || neg == 0.0) throw std::invalid_argument("roc_auc: both classes must be present");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

EvalError::EvalError(int run, const std::string& what)
    : std::runtime_error("run " + std::to_string(run) + ": " + what), run_(run) {}

EvalReport monte_carlo_eval(const std::vector<std::string>& labels, const FitPredict& fit_predict,
                            const EvalOptions& options) {
    if (options.runs < 1) throw std::invalid_argument("monte_carlo_eval: runs must be >= 1");
    EvalReport report;
    report.seed = options.seed;
    report.train_fraction = options.train_fraction;
    report.confusion = ConfusionMatrix::zeros(class_order(labels));
    for (int r = 0; r < options.runs; ++r) {
        const auto plan = stratified_split(labels, options.train_fraction, options.seed + static_cast<std::uint64_t>(r));
        std::vector<std::string> predicted;
        try {
            predicted = fit_predict(plan.train, plan.test);
        } catch (const std::exception& e) {
            throw EvalError(r, e.what());
        }
        if (predicted.size() != plan.test.size()) throw EvalError(r, "prediction count differs from test size");
        auto confusion = ConfusionMatrix::zeros(report.confusion.classes);
        try {
            for (std::size_t i = 0; i < plan.test.size(); ++i) confusion.add(labels[plan.test[i]], predicted[i]);
        } catch (const std::exception& e) {
            throw EvalError(r, e.what());
        }
        report.accuracies.push_back(accuracy(confusion));
        report.confusion.merge(confusion);
    }
    report.mean_accuracy =
        std::accumulate(report.accuracies.begin(), report.accuracies.end(), 0.0) / static_cast<double>(options.runs);
    return report;
}

std::string report_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["seed"] = report.seed;
    j["train_fraction"] = report.train_fraction;
    j["runs"] = report.accuracies.size();
    j["accuracies"] = report.accuracies;
    j["mean_accuracy"] = report.mean_accuracy;
    j["confusion"] = {{"classes", report.confusion.classes}, {"counts", report.confusion.counts}};
    j["config"] = report.config;
    return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "run,accuracy\n";
    char buf[64];
    for (std::size_t r = 0; r < report.accuracies.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", report.accuracies[r]);
        out << r << ',' << buf << '\n';
    }
    return out.str();
}

std::string confusion_csv(const ConfusionMatrix& c) {
    std::ostringstream out;
    out << "truth";
    for (const auto& name : c.classes) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < c.classes.size(); ++i) {
        out << c.classes[i];
        for (long v : c.counts[i]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

namespace {

FeatureMatrix select_columns(const FeatureMatrix& X, const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& cols) {
    FeatureMatrix out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        std::vector<double> v;
        v.reserve(cols.size());
        for (std::size_t c : cols) v.push_back(X[r][c]);
        out.push_back(std::move(v));
    }
    return out;
}

double held_out_auc(const FeatureMatrix& X, const std::vector<std::string>& labels, const std::vector<std::size_t>& cols,
                    const std::string& positive, const RankOptions& options) {
    double sum = 0.0;
    for (int r = 0; r < options.repeats; ++r) {
        const auto plan = stratified_split(labels, options.train_fraction, options.seed + static_cast<std::uint64_t>(r));
        std::vector<std::string> y;
        for (std::size_t i : plan.train) y.push_back(labels[i]);
        const auto model = SvmModel::train(select_columns(X, plan.train, cols), y, options.svm);
        const auto test = select_columns(X, plan.test, cols);
        std::vector<double> scores;
        std::vector<bool> pos;
        for (std::size_t i = 0; i < test.size(); ++i) {
            scores.push_back(model.predict(test[i]).distribution.prob(positive));
            pos.push_back(labels[plan.test[i]] == positive);
        }
        sum += roc_auc(scores, pos);
    }
    return sum / static_cast<double>(options.repeats);
}

}  // namespace

FeatureRanking wrapper_rank(const FeatureMatrix& X, const std::vector<std::string>& labels,
                            const std::vector<std::string>& feature_names, const RankOptions& options) {
    const auto classes = class_order(labels);
    if (classes.size() != 2)
        throw std::invalid_argument("wrapper_rank: needs exactly two classes (binarize the labels first)");
    if (feature_names.size() < 2) throw std::invalid_argument("wrapper_rank: needs at least two features");
    if (X.size() != labels.size()) throw std::invalid_argument("wrapper_rank: one label per row required");
    for (const auto& row : X)
        if (row.size() != feature_names.size()) throw std::invalid_argument("wrapper_rank: row width differs from names");
    if (options.repeats < 1) throw std::invalid_argument("wrapper_rank: repeats must be >= 1");

    std::vector<std::size_t> kept(feature_names.size());
    std::iota(kept.begin(), kept.end(), std::size_t{0});
    FeatureRanking result;
    while (kept.size() > 1) {
        std::size_t best = 0;
        double best_auc = -1.0;
        for (std::size_t c = 0; c < kept.size(); ++c) {
            auto trial = kept;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(c));
            const double auc = held_out_auc(X, labels, trial, classes[1], options);
            if (auc > best_auc) {
                best_auc = auc;
                best = c;
            }
        }
        result.rounds.push_back({feature_names[kept[best]], best_auc});
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(best));
    }
    result.ranked.push_back(feature_names[kept.front()]);
    for (auto it = result.rounds.rbegin(); it != result.rounds.rend(); ++it) result.ranked.push_back(it->removed);
    return result;
}

}  // namespace wearclass
