#include "cotrans_fixture.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace fixtures {

namespace {

wearclass::SimilarityMatrix build(const std::vector<std::pair<std::pair<int, int>, double>>& pairs) {
    wearclass::SimilarityMatrix s;
    for (int i = 0; i < 8; ++i) s.ids.push_back("item" + std::to_string(i));
    s.values.assign(64, 0.05);
    for (int i = 0; i < 8; ++i) s.values[i * 8 + i] = 1.0;
    for (const auto& [ij, v] : pairs) {
        s.values[ij.first * 8 + ij.second] = v;
        s.values[ij.second * 8 + ij.first] = v;
    }
    return s;
}

std::vector<double> propagate(const wearclass::SimilarityMatrix& s, const std::vector<bool>& source, int steps) {
    const int n = static_cast<int>(s.size());
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = source[i] ? 1.0 : 0.0;
    for (int step = 0; step < steps; ++step) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) {
            if (source[i]) {
                g[i] = 1.0;
                continue;
            }
            double row = 0.0, acc = 0.0;
            for (int j = 0; j < n; ++j) {
                row += s(i, j);
                acc += s(i, j) * f[j];
            }
            g[i] = acc / row;
        }
        f = g;
    }
    return f;
}

std::vector<int> best(const std::vector<double>& score, const std::vector<bool>& allowed, int p) {
    std::vector<int> picked;
    std::vector<bool> used(score.size(), false);
    for (int r = 0; r < p; ++r) {
        int arg = -1;
        for (int i = 0; i < static_cast<int>(score.size()); ++i)
            if (allowed[i] && !used[i] && (arg < 0 || score[i] > score[arg])) arg = i;
        if (arg < 0) break;
        used[arg] = true;
        picked.push_back(arg);
    }
    return picked;
}

}  // namespace

CotransFixture cotrans_fixture() {
    CotransFixture f;
    f.s1 = build({{{0, 1}, 0.9}, {{0, 2}, 0.85}, {{1, 2}, 0.8}, {{0, 4}, 0.6}, {{1, 4}, 0.5}, {{2, 4}, 0.5},
                  {{0, 5}, 0.4}, {{5, 6}, 0.7}, {{6, 7}, 0.7}, {{5, 7}, 0.6}, {{3, 7}, 0.5}});
    f.s2 = build({{{0, 1}, 0.85}, {{0, 2}, 0.8}, {{1, 2}, 0.75}, {{1, 3}, 0.9}, {{2, 3}, 0.85}, {{0, 3}, 0.3},
                  {{0, 6}, 0.5}, {{4, 5}, 0.6}, {{5, 6}, 0.5}, {{6, 7}, 0.6}});
    f.labels = {"H", "H", "H", "H", "H", "L", "L", "L"};
    return f;
}

std::vector<OracleEntry> cotrans_oracle(const wearclass::SimilarityMatrix& s1, const wearclass::SimilarityMatrix& s2,
                                        int query, int p, int m, int steps) {
    const int n = static_cast<int>(s1.size());
    std::vector<bool> y1(n, false), y2(n, false), x1(n, true), x2(n, true);
    y1[query] = y2[query] = true;
    x1[query] = x2[query] = false;
    std::vector<OracleEntry> out;
    std::vector<bool> listed(n, false);
    listed[query] = true;
    for (int j = 1; j <= m; ++j) {
        const auto sim1 = propagate(s1, y1, steps);
        const auto sim2 = propagate(s2, y2, steps);
        std::vector<bool> a1(n), a2(n);
        for (int i = 0; i < n; ++i) {
            a1[i] = x1[i] && !y2[i];
            a2[i] = x2[i] && !y1[i];
        }
        const auto t1 = best(sim1, a1, p);
        const auto t2 = best(sim2, a2, p);
        if (t1.empty() && t2.empty()) break;
        std::map<int, double> round;
        for (int i : t1) round[i] = sim1[i];
        for (int i : t2) round[i] = round.count(i) ? std::max(round[i], sim2[i]) : sim2[i];
        std::vector<OracleEntry> batch;
        for (const auto& [i, sc] : round)
            if (!listed[i]) batch.push_back({i, j, sc});
        std::sort(batch.begin(), batch.end(), [](const OracleEntry& a, const OracleEntry& b) {
            return a.score != b.score ? a.score > b.score : a.index < b.index;
        });
        for (const auto& e : batch) {
            listed[e.index] = true;
            out.push_back(e);
        }
        for (int i : t1) y2[i] = true;
        for (int i : t2) y1[i] = true;
        for (int i = 0; i < n; ++i) {
            if (y1[i]) x1[i] = false;
            if (y2[i]) x2[i] = false;
        }
    }
    return out;
}

std::string oracle_vote(const std::vector<std::string>& ranked_labels, int k) {
    std::map<std::string, std::pair<int, double>> tally;
    for (int r = 0; r < k; ++r) {
        auto& t = tally[ranked_labels[r]];
        ++t.first;
        t.second += 1.0 / (1.0 + r);
    }
    auto rank_of = [](const std::string& c) {
        if (c == "L") return 0;
        if (c == "M") return 1;
        if (c == "H") return 2;
        return 3;
    };
    std::string winner;
    std::pair<int, double> bestv{-1, 0.0};
    for (const auto& [c, t] : tally) {
        const bool better = t.first > bestv.first || (t.first == bestv.first && t.second > bestv.second) ||
                            (t.first == bestv.first && t.second == bestv.second &&
                             (rank_of(c) < rank_of(winner) || (rank_of(c) == rank_of(winner) && c < winner)));
        if (winner.empty() || better) {
            winner = c;
            bestv = t;
        }
    }
    return winner;
}

}  // namespace fixtures
