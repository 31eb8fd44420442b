#include "wearclass/classify.hpp"

#include "wearclass/image.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace wearclass {

std::string_view kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::intersection: return "intersection";
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
    }
    return "intersection";
}

KernelKind parse_kernel(std::string_view name) {
    if (name == "intersection") return KernelKind::intersection;
    if (name == "linear") return KernelKind::linear;
    if (name == "rbf") return KernelKind::rbf;
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double intersection_kernel(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("intersection_kernel: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::min(u[i], v[i]);
    return s;
}

double kernel_value(const KernelSpec& kernel, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("kernel: length mismatch");
    switch (kernel.kind) {
        case KernelKind::intersection: return intersection_kernel(u, v);
        case KernelKind::linear: {
            double s = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
            return s;
        }
        case KernelKind::rbf: {
            double d = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) d += (u[i] - v[i]) * (u[i] - v[i]);
            return std::exp(-kernel.gamma * d);
        }
    }
    return 0.0;
}

std::vector<std::string> class_order(const std::vector<std::string>& labels) {
    static const std::vector<std::string> canonical{"L", "M", "H"};
    const std::set<std::string> distinct(labels.begin(), labels.end());
    std::vector<std::string> out;
    for (const auto& c : canonical)
        if (distinct.count(c)) out.push_back(c);
    for (const auto& c : distinct)
        if (std::find(canonical.begin(), canonical.end(), c) == canonical.end()) out.push_back(c);
    return out;
}

MinMaxScaler MinMaxScaler::fit(const FeatureMatrix& X) {
    if (X.empty()) throw std::invalid_argument("MinMaxScaler: no rows");
    MinMaxScaler s;
    s.lo = X.front();
    s.hi = X.front();
    for (const auto& row : X) {
        if (row.size() != s.lo.size()) throw std::invalid_argument("MinMaxScaler: ragged rows");
        for (std::size_t j = 0; j < row.size(); ++j) {
            s.lo[j] = std::min(s.lo[j], row[j]);
            s.hi[j] = std::max(s.hi[j], row[j]);
        }
    }
    return s;
}

std::vector<double> MinMaxScaler::transform(std::span<const double> x) const {
    if (x.size() != lo.size()) throw std::invalid_argument("MinMaxScaler: dimension mismatch");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double range = hi[j] - lo[j];
        if (range > 0.0) out[j] = std::clamp((x[j] - lo[j]) / range, 0.0, 1.0);
    }
    return out;
}

FeatureMatrix MinMaxScaler::transform(const FeatureMatrix& X) const {
    FeatureMatrix out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(transform(row));
    return out;
}

std::size_t ClassDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;
    return best;
}

double ClassDistribution::prob(std::string_view label) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == label) return probs[i];
    throw std::invalid_argument("unknown class '" + std::string(label) + "'");
}

double BinarySvm::decision(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
        f += coefficients[i] * kernel_value(kernel, support_vectors[i], x);
    return f;
}

double BinarySvm::probability(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(platt_a * decision(x)));
}

BinarySvm train_binary_svm(const FeatureMatrix& X, const std::vector<int>& y, const KernelSpec& kernel, double C,
                           double tolerance, SmoStats* stats) {
    const std::size_t n = X.size();
    if (n == 0 || y.size() != n) throw std::invalid_argument("train_binary_svm: empty or mismatched input");
    if (!(C > 0.0)) throw std::invalid_argument("train_binary_svm: C must be > 0");
    for (int v : y)
        if (v != 1 && v != -1) throw std::invalid_argument("train_binary_svm: labels must be +1 or -1");

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) K[i * n + j] = K[j * n + i] = kernel_value(kernel, X[i], X[j]);
    auto k = [&](std::size_t i, std::size_t j) { return K[i * n + j]; };
    auto yd = [&](std::size_t i) { return static_cast<double>(y[i]); };

    constexpr double tau = 1e-12;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> G(n, -1.0);
    auto up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };

    const long max_iter = std::max<long>(10000000L, 100L * static_cast<long>(n));
    long iter = 0;
    double gap = 0.0;
    for (; iter < max_iter; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t)
            if (up(t) && -yd(t) * G[t] >= gmax) {
                gmax = -yd(t) * G[t];
                i = t;
            }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::size_t j = n;
        double best_obj = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (!low(t)) continue;
            gmax2 = std::max(gmax2, yd(t) * G[t]);
            if (i == n) continue;
            const double b = gmax + yd(t) * G[t];
            if (b > 0.0) {
                double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
                if (a <= 0.0) a = tau;
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        gap = gmax + gmax2;
        if (i == n || j == n || gap < tolerance) break;

        const double old_i = alpha[i], old_j = alpha[j];
        double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if (quad <= 0.0) quad = tau;
        if (y[i] != y[j]) {
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t)
            G[t] += yd(t) * (yd(i) * k(t, i) * di + yd(j) * k(t, j) * dj);
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = yd(t) * G[t];
        if (alpha[t] >= C) {
            if (y[t] == -1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    double rho = 0.0;
    if (n_free > 0) rho = sum_free / n_free;
    else if (std::isfinite(ub) && std::isfinite(lb)) rho = (ub + lb) / 2.0;
    else if (std::isfinite(ub)) rho = ub;
    else if (std::isfinite(lb)) rho = lb;

    BinarySvm model;
    model.kernel = kernel;
    model.bias = -rho;
    for (std::size_t t = 0; t < n; ++t)
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(X[t]);
            model.coefficients.push_back(yd(t) * alpha[t]);
        }
    std::vector<double> f(n);
    for (std::size_t t = 0; t < n; ++t) f[t] = model.decision(X[t]);
    model.platt_a = fit_sigmoid_slope(f, y);
    if (stats) {
        stats->iterations = static_cast<int>(iter);
        stats->kkt_gap = gap;
    }
    return model;
}

double fit_sigmoid_slope(const std::vector<double>& f, const std::vector<int>& y) {
    double n_pos = 0.0, n_neg = 0.0;
    for (int v : y) (v > 0 ? n_pos : n_neg) += 1.0;
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);

    // NLL(A) = sum log(1 + e^z) - (1 - t) z with z = A f; convex in A.
    auto nll = [&](double A) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double t = y[i] > 0 ? t_pos : t_neg;
            const double z = A * f[i];
            const double log1pexp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
            s += log1pexp - (1.0 - t) * z;
        }
        return s;
    };
    double A = 0.0;
    double value = nll(A);
    for (int iter = 0; iter < 100; ++iter) {
        double g = 0.0, h = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double t = y[i] > 0 ? t_pos : t_neg;
            const double z = A * f[i];
            const double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
            g += f[i] * (t - p);
            h += f[i] * f[i] * p * (1.0 - p);
        }
        if (std::abs(g) < 1e-10 || h <= 0.0) break;
        double step = g / h;
        double next = A - step;
        double next_value = nll(next);
        while (next_value > value && std::abs(step) > 1e-14) {
            step /= 2.0;
            next = A - step;
            next_value = nll(next);
        }
        if (next_value > value) break;
        const bool done = std::abs(next - A) < 1e-12 * (1.0 + std::abs(A));
        A = next;
        value = next_value;
        if (done) break;
    }
    return A;
}

std::vector<double> couple_pairwise(const std::vector<std::vector<double>>& r) {
    const std::size_t k = r.size();
    if (k == 0) throw std::invalid_argument("couple_pairwise: no classes");
    if (k == 1) return {1.0};
    if (k == 2) return {r[0][1], r[1][0]};

    std::vector<std::vector<double>> Q(k, std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t j = 0; j < k; ++j) {
            if (j == t) continue;
            Q[t][t] += r[j][t] * r[j][t];
            Q[t][j] = -r[j][t] * r[t][j];
        }
    std::vector<double> p(k, 1.0 / static_cast<double>(k)), Qp(k, 0.0);
    const int max_iter = std::max<int>(1000, static_cast<int>(k) * 100);
    for (int iter = 0; iter < max_iter; ++iter) {
        double pQp = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            Qp[t] = 0.0;
            for (std::size_t j = 0; j < k; ++j) Qp[t] += Q[t][j] * p[j];
            pQp += p[t] * Qp[t];
        }
        double max_error = 0.0;
        for (std::size_t t = 0; t < k; ++t) max_error = std::max(max_error, std::abs(Qp[t] - pQp));
        if (max_error < 1e-12) break;
        for (std::size_t t = 0; t < k; ++t) {
            const double diff = (-Qp[t] + pQp) / Q[t][t];
            p[t] += diff;
            pQp = (pQp + diff * (diff * Q[t][t] + 2.0 * Qp[t])) / (1.0 + diff) / (1.0 + diff);
            for (std::size_t j = 0; j < k; ++j) {
                Qp[j] = (Qp[j] + diff * Q[t][j]) / (1.0 + diff);
                p[j] /= (1.0 + diff);
            }
        }
    }
    double total = 0.0;
    for (double& v : p) {
        v = std::clamp(v, 0.0, 1.0);
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

SvmModel SvmModel::train(const FeatureMatrix& X, const std::vector<std::string>& y, const SvmOptions& options) {
    if (X.size() != y.size() || X.empty()) throw std::invalid_argument("svm_train: empty or mismatched input");
    if (!(options.C > 0.0)) throw std::invalid_argument("svm_train: C must be > 0");
    SvmModel model;
    model.options_ = options;
    model.classes_ = class_order(y);
    if (model.classes_.size() < 2) throw std::invalid_argument("svm_train: need at least two classes");
    model.scaler_ = MinMaxScaler::fit(X);
    const FeatureMatrix Z = model.scaler_.transform(X);

    for (std::size_t a = 0; a < model.classes_.size(); ++a)
        for (std::size_t b = a + 1; b < model.classes_.size(); ++b) {
            FeatureMatrix sub;
            std::vector<int> labels;
            for (std::size_t i = 0; i < Z.size(); ++i) {
                if (y[i] == model.classes_[a]) {
                    sub.push_back(Z[i]);
                    labels.push_back(1);
                } else if (y[i] == model.classes_[b]) {
                    sub.push_back(Z[i]);
                    labels.push_back(-1);
                }
            }
            model.pairs_.push_back(train_binary_svm(sub, labels, options.kernel, options.C, options.tolerance));
        }
    return model;
}

SvmModel::Prediction SvmModel::predict(std::span<const double> x) const {
    if (x.size() != dimension()) throw std::invalid_argument("svm_predict: dimension mismatch");
    const auto z = scaler_.transform(x);
    const std::size_t k = classes_.size();
    constexpr double min_prob = 1e-7;
    std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
    std::vector<int> votes(k, 0);
    std::size_t p = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b, ++p) {
            const double f = pairs_[p].decision(z);
            ++votes[f > 0.0 ? a : b];
            const double prob = std::clamp(1.0 / (1.0 + std::exp(pairs_[p].platt_a * f)), min_prob, 1.0 - min_prob);
            r[a][b] = prob;
            r[b][a] = 1.0 - prob;
        }
    Prediction out;
    out.distribution.classes = classes_;
    out.distribution.probs = couple_pairwise(r);
    out.label = classes_[out.distribution.argmax()];
    std::size_t winner = 0;
    for (std::size_t c = 1; c < k; ++c)
        if (votes[c] > votes[winner]) winner = c;
    out.voted_label = classes_[winner];
    return out;
}

namespace {

constexpr const char* kModelFormat = "wearclass-svm";
constexpr int kModelVersion = 1;

}  // namespace

std::string SvmModel::to_json() const {
    nlohmann::json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["kernel"] = {{"kind", std::string(kernel_name(options_.kernel.kind))}, {"gamma", options_.kernel.gamma}};
    doc["C"] = options_.C;
    doc["tolerance"] = options_.tolerance;
    doc["classes"] = classes_;
    doc["scaler"] = {{"min", scaler_.lo}, {"max", scaler_.hi}};
    nlohmann::json pairs = nlohmann::json::array();
    std::size_t p = 0;
    for (std::size_t a = 0; a < classes_.size(); ++a)
        for (std::size_t b = a + 1; b < classes_.size(); ++b, ++p) {
            const auto& m = pairs_[p];
            pairs.push_back({{"positive", classes_[a]},
                             {"negative", classes_[b]},
                             {"support_vectors", m.support_vectors},
                             {"coefficients", m.coefficients},
                             {"bias", m.bias},
                             {"sigmoid", {{"A", m.platt_a}, {"B", 0.0}}}});
        }
    doc["pairs"] = std::move(pairs);
    return doc.dump(2);
}

SvmModel SvmModel::from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != kModelFormat) throw DataError("not a wearclass SVM model");
        if (doc.at("version").get<int>() != kModelVersion)
            throw DataError("unsupported model version " + std::to_string(doc.at("version").get<int>()));
        SvmModel model;
        model.options_.kernel.kind = parse_kernel(doc.at("kernel").at("kind").get<std::string>());
        model.options_.kernel.gamma = doc.at("kernel").at("gamma").get<double>();
        model.options_.C = doc.at("C").get<double>();
        model.options_.tolerance = doc.at("tolerance").get<double>();
        model.classes_ = doc.at("classes").get<std::vector<std::string>>();
        model.scaler_.lo = doc.at("scaler").at("min").get<std::vector<double>>();
        model.scaler_.hi = doc.at("scaler").at("max").get<std::vector<double>>();
        if (model.classes_.size() < 2 || model.scaler_.lo.size() != model.scaler_.hi.size())
            throw DataError("inconsistent model document");
        const auto& pairs = doc.at("pairs");
        const std::size_t k = model.classes_.size();
        if (pairs.size() != k * (k - 1) / 2) throw DataError("model has wrong number of class pairs");
        for (const auto& entry : pairs) {
            BinarySvm m;
            m.kernel = model.options_.kernel;
            m.support_vectors = entry.at("support_vectors").get<FeatureMatrix>();
            m.coefficients = entry.at("coefficients").get<std::vector<double>>();
            m.bias = entry.at("bias").get<double>();
            m.platt_a = entry.at("sigmoid").at("A").get<double>();
            if (m.support_vectors.size() != m.coefficients.size()) throw DataError("support vector count mismatch");
            for (const auto& sv : m.support_vectors)
                if (sv.size() != model.scaler_.lo.size()) throw DataError("support vector dimension mismatch");
            model.pairs_.push_back(std::move(m));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

std::string knn_classify(std::span<const double> similarities, const std::vector<std::string>& labels, int k) {
    if (similarities.size() != labels.size()) throw std::invalid_argument("knn_classify: length mismatch");
    if (k < 1 || static_cast<std::size_t>(k) > labels.size())
        throw std::invalid_argument("knn_classify: k must be in [1, number of labeled items]");
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return similarities[a] > similarities[b]; });

    std::map<std::string, std::pair<int, double>> tally;
    for (int i = 0; i < k; ++i) {
        auto& t = tally[labels[idx[static_cast<std::size_t>(i)]]];
        ++t.first;
        t.second += similarities[idx[static_cast<std::size_t>(i)]];
    }
    std::string best;
    std::pair<int, double> best_t{-1, 0.0};
    for (const auto& c : class_order(labels)) {
        const auto it = tally.find(c);
        if (it == tally.end()) continue;
        const auto& t = it->second;
        if (t.first > best_t.first || (t.first == best_t.first && t.second > best_t.second)) {
            best = c;
            best_t = t;
        }
    }
    return best;
}

}  // namespace wearclass
