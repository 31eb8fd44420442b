#include "wearclass/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wearclass {

std::vector<double> early_fuse(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("early_fuse: empty descriptor");
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
        case Metric::l1: return "l1";
        case Metric::l2: return "l2";
        case Metric::chi2: return "chi2";
    }
    return "l1";
}

Metric parse_metric(std::string_view name) {
    if (name == "l1") return Metric::l1;
    if (name == "l2") return Metric::l2;
    if (name == "chi2") return Metric::chi2;
    throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

double descriptor_distance(Metric metric, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("descriptor_distance: length mismatch");
    double s = 0.0;
    switch (metric) {
        case Metric::l1:
            for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
            return s;
        case Metric::l2:
            for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
            return std::sqrt(s);
        case Metric::chi2:
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double den = u[i] + v[i];
                if (den != 0.0) s += (u[i] - v[i]) * (u[i] - v[i]) / den;
            }
            return 0.5 * s;
    }
    return s;
}

double median_pairwise_distance(const FeatureMatrix& items, Metric metric) {
    std::vector<double> d;
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) d.push_back(descriptor_distance(metric, items[i], items[j]));
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    const std::size_t mid = d.size() / 2;
    const double median = d.size() % 2 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
    return median > 0.0 ? median : 1.0;
}

SimilarityMatrix similarity_with_sigma(const FeatureMatrix& items, const std::vector<std::string>& ids, Metric metric,
                                       double sigma) {
    if (items.size() != ids.size()) throw std::invalid_argument("similarity: ids and items differ in length");
    if (!(sigma > 0.0)) throw std::invalid_argument("similarity: sigma must be > 0");
    const std::size_t n = items.size();
    SimilarityMatrix s;
    s.ids = ids;
    s.values.assign(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(-descriptor_distance(metric, items[i], items[j]) / sigma);
            s.values[i * n + j] = v;
            s.values[j * n + i] = v;
        }
    return s;
}

SimilarityMatrix similarity_from_descriptors(const FeatureMatrix& items, const std::vector<std::string>& ids,
                                             Metric metric) {
    if (items.size() < 2) throw std::invalid_argument("similarity: need at least two items");
    return similarity_with_sigma(items, ids, metric, median_pairwise_distance(items, metric));
}

TransitionMatrix transition_matrix(const SimilarityMatrix& s) {
    TransitionMatrix P;
    P.n = s.size();
    P.values = s.values;
    for (std::size_t i = 0; i < P.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < P.n; ++j) sum += P.values[i * P.n + j];
        if (!(sum > 0.0)) throw std::invalid_argument("transition_matrix: zero row");
        for (std::size_t j = 0; j < P.n; ++j) P.values[i * P.n + j] /= sum;
    }
    return P;
}

std::vector<double> graph_transduction(const TransitionMatrix& P, const std::vector<std::size_t>& sources, int steps) {
    if (sources.empty()) throw std::invalid_argument("graph_transduction: empty source set");
    if (steps < 0) throw std::invalid_argument("graph_transduction: steps must be >= 0");
    const std::size_t n = P.n;
    std::vector<char> clamped(n, 0);
    for (std::size_t s : sources) {
        if (s >= n) throw std::invalid_argument("graph_transduction: source out of range");
        clamped[s] = 1;
    }
    std::vector<double> f(n, 0.0), next(n);
    for (std::size_t i = 0; i < n; ++i)
        if (clamped[i]) f[i] = 1.0;
    for (int step = 0; step < steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            if (clamped[i]) {
                next[i] = 1.0;
                continue;
            }
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += P(i, j) * f[j];
            next[i] = v;
        }
        f.swap(next);
    }
    return f;
}

namespace {

void check_options(const CotransOptions& options) {
    if (options.neighbors_per_round < 1 || options.rounds < 1)
        throw std::invalid_argument("co-transduction: p and m must be >= 1");
}

// The p highest-scoring members of candidates, ties by index.
std::vector<std::size_t> top(const std::vector<double>& score, const std::set<std::size_t>& candidates, int p) {
    std::vector<std::size_t> c(candidates.begin(), candidates.end());
    std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    if (c.size() > static_cast<std::size_t>(p)) c.resize(static_cast<std::size_t>(p));
    return c;
}

void append_round(std::vector<RankedItem>& ranking, std::vector<RankedItem> entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedItem& a, const RankedItem& b) {
        return a.score != b.score ? a.score > b.score : a.index < b.index;
    });
    for (const auto& e : entries) {
        const bool seen = std::any_of(ranking.begin(), ranking.end(), [&](const RankedItem& r) { return r.index == e.index; });
        if (!seen) ranking.push_back(e);
    }
}

}  // namespace

std::vector<RankedItem> cotransduce(const SimilarityMatrix& s1, const SimilarityMatrix& s2, std::size_t query,
                                    const CotransOptions& options) {
    check_options(options);
    if (s1.ids != s2.ids) throw std::invalid_argument("co-transduction: similarity matrices cover different items");
    const std::size_t n = s1.size();
    if (query >= n) throw std::invalid_argument("co-transduction: query out of range");
    const auto P1 = transition_matrix(s1);
    const auto P2 = transition_matrix(s2);

    std::set<std::size_t> Y1{query}, Y2{query}, X1, X2;
    for (std::size_t i = 0; i < n; ++i)
        if (i != query) {
            X1.insert(i);
            X2.insert(i);
        }

    std::vector<RankedItem> ranking;
    for (int round = 1; round <= options.rounds; ++round) {
        const auto sim1 = graph_transduction(P1, {Y1.begin(), Y1.end()}, options.steps);
        const auto sim2 = graph_transduction(P2, {Y2.begin(), Y2.end()}, options.steps);
        std::set<std::size_t> c1, c2;
        for (std::size_t i : X1)
            if (!Y2.count(i)) c1.insert(i);
        for (std::size_t i : X2)
            if (!Y1.count(i)) c2.insert(i);
        const auto t1 = top(sim1, c1, options.neighbors_per_round);
        const auto t2 = top(sim2, c2, options.neighbors_per_round);
        if (t1.empty() && t2.empty()) break;

        std::vector<RankedItem> entries;
        for (std::size_t i : t1) entries.push_back({i, round, sim1[i]});
        for (std::size_t i : t2) {
            auto it = std::find_if(entries.begin(), entries.end(), [&](const RankedItem& e) { return e.index == i; });
            if (it == entries.end()) entries.push_back({i, round, sim2[i]});
            else it->score = std::max(it->score, sim2[i]);
        }
        append_round(ranking, std::move(entries));

        Y2.insert(t1.begin(), t1.end());
        Y1.insert(t2.begin(), t2.end());
        for (std::size_t i : Y1) X1.erase(i);
        for (std::size_t i : Y2) X2.erase(i);
    }
    return ranking;
}

std::vector<RankedItem> transduction_rank(const SimilarityMatrix& s, std::size_t query, const CotransOptions& options) {
    check_options(options);
    const std::size_t n = s.size();
    if (query >= n) throw std::invalid_argument("transduction_rank: query out of range");
    const auto P = transition_matrix(s);
    std::set<std::size_t> Y{query}, X;
    for (std::size_t i = 0; i < n; ++i)
        if (i != query) X.insert(i);
    std::vector<RankedItem> ranking;
    for (int round = 1; round <= options.rounds && !X.empty(); ++round) {
        const auto sim = graph_transduction(P, {Y.begin(), Y.end()}, options.steps);
        const auto t = top(sim, X, options.neighbors_per_round);
        std::vector<RankedItem> entries;
        for (std::size_t i : t) entries.push_back({i, round, sim[i]});
        append_round(ranking, std::move(entries));
        for (std::size_t i : t) {
            Y.insert(i);
            X.erase(i);
        }
    }
    return ranking;
}

std::string cotransduction_classify(const SimilarityMatrix& s1, const SimilarityMatrix& s2, std::size_t query,
                                    const std::vector<std::string>& labels, int k, const CotransOptions& options) {
    if (labels.size() != s1.size()) throw std::invalid_argument("co-transduction: one label per item required");
    const auto ranking = cotransduce(s1, s2, query, options);
    if (k < 1 || static_cast<std::size_t>(k) > ranking.size())
        throw std::invalid_argument("co-transduction: k exceeds the number of retrieved items");
    std::vector<double> weight;
    std::vector<std::string> top_labels;
    for (int r = 0; r < k; ++r) {
        weight.push_back(1.0 / (1.0 + r));
        top_labels.push_back(labels[ranking[static_cast<std::size_t>(r)].index]);
    }
    return knn_classify(weight, top_labels, k);
}

ClassDistribution late_fuse(const ClassDistribution& a, const ClassDistribution& b) {
    if (a.classes != b.classes || a.probs.size() != a.classes.size() || b.probs.size() != b.classes.size())
        throw std::invalid_argument("late_fuse: class sets differ");
    ClassDistribution out;
    out.classes = a.classes;
    out.probs.resize(a.probs.size());
    for (std::size_t i = 0; i < a.probs.size(); ++i) out.probs[i] = 0.5 * (a.probs[i] + b.probs[i]);
    return out;
}

}  // namespace wearclass
