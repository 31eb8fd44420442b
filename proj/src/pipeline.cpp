#include "wearclass/pipeline.hpp"

#include "wearclass/borchiz.hpp"
#include "wearclass/shapefeat.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace wearclass {

namespace {

constexpr const char* kFormat = "wearclass-pipeline";
constexpr int kVersion = 1;

bool needs_shape(DescriptorKind k) {
    return k != DescriptorKind::borchiz;
}

bool needs_contour(DescriptorKind k) {
    return k != DescriptorKind::shapefeat;
}

std::vector<double> columns_for(const Sample& s, DescriptorKind k) {
    switch (k) {
        case DescriptorKind::shapefeat: return s.shapefeat;
        case DescriptorKind::borchiz: return s.borchiz;
        default: return early_fuse(s.shapefeat, s.borchiz);
    }
}

}  // namespace

Sample describe_mask(const BinaryMask& mask, const PipelineConfig& config) {
    Sample s;
    const auto sf = compute_shapefeat(mask, config.shapefeat).values();
    s.shapefeat.assign(sf.begin(), sf.end());
    s.borchiz = compute_borchiz(mask, config.borchiz).flatten();
    return s;
}

BinaryMask load_record_mask(const Manifest& manifest, const ManifestRecord& record, const PipelineConfig& config) {
    if (!record.mask.empty()) return read_mask(manifest.resolve(record.mask));
    const auto edges = process_insert(read_gray(manifest.resolve(record.image)), config.preprocess);
    for (const auto& e : edges)
        if (e.side == *record.side) {
            if (e.mask.count() == 0)
                throw DataError("no wear region found on the " + std::string(side_name(e.side)) + " edge");
            return e.mask;
        }
    throw DataError("side not produced by preprocessing");
}

ExtractResult extract_samples(const Manifest& manifest, const PipelineConfig& config, unsigned threads) {
    const std::size_t n = manifest.records.size();
    std::vector<std::optional<Sample>> slots(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const auto& r = manifest.records[i];
            try {
                Sample s = describe_mask(load_record_mask(manifest, r, config), config);
                s.id = r.id;
                s.label = r.label;
                slots[i] = std::move(s);
            } catch (const std::exception& e) {
                errors[i] = "line " + std::to_string(r.line) + " (" + r.id + "): " + e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    ExtractResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) result.samples.push_back(std::move(*slots[i]));
        if (!errors[i].empty()) result.errors.push_back(std::move(errors[i]));
    }
    return result;
}

DescriptorTable samples_table(const std::vector<Sample>& samples, DescriptorKind columns, const PipelineConfig& config) {
    if (columns == DescriptorKind::cotrans || columns == DescriptorKind::late)
        throw std::invalid_argument("samples_table: columns must be shapefeat, borchiz or early");
    DescriptorTable t;
    t.config_hash = config_hash(config);
    if (columns != DescriptorKind::borchiz)
        for (auto n : shapefeat_names()) t.names.emplace_back(n);
    if (columns != DescriptorKind::shapefeat)
        for (auto& n : borchiz_names(config.borchiz)) t.names.push_back(n);
    require_descriptors(samples, columns);
    for (const auto& s : samples) {
        t.ids.push_back(s.id);
        t.labels.push_back(s.label);
        t.rows.push_back(columns_for(s, columns));
        if (t.rows.back().size() != t.names.size()) throw std::invalid_argument("samples_table: descriptor length differs from names");
    }
    return t;
}

std::vector<Sample> samples_from_tables(const DescriptorTable* shapefeat, const DescriptorTable* borchiz) {
    if (!shapefeat && !borchiz) throw std::invalid_argument("no descriptor tables given");
    const DescriptorTable& lead = shapefeat ? *shapefeat : *borchiz;
    std::map<std::string, std::size_t> other_index;
    const DescriptorTable* other = shapefeat && borchiz ? borchiz : nullptr;
    if (other)
        for (std::size_t i = 0; i < other->ids.size(); ++i) other_index[other->ids[i]] = i;
    std::vector<Sample> out;
    for (std::size_t i = 0; i < lead.ids.size(); ++i) {
        Sample s;
        s.id = lead.ids[i];
        s.label = lead.labels[i];
        (shapefeat ? s.shapefeat : s.borchiz) = lead.rows[i];
        if (other) {
            const auto it = other_index.find(s.id);
            if (it == other_index.end()) throw DataError("id '" + s.id + "' missing from the B-ORCHIZ table");
            if (other->labels[it->second] != s.label) throw DataError("id '" + s.id + "' has different labels in the two tables");
            s.borchiz = other->rows[it->second];
        }
        out.push_back(std::move(s));
    }
    if (other && other->ids.size() != lead.ids.size()) throw DataError("descriptor tables cover different ids");
    return out;
}

void require_descriptors(const std::vector<Sample>& samples, DescriptorKind kind) {
    for (const auto& s : samples) {
        if (needs_shape(kind) && s.shapefeat.empty())
            throw std::invalid_argument("sample '" + s.id + "' has no ShapeFeat descriptor");
        if (needs_contour(kind) && s.borchiz.empty())
            throw std::invalid_argument("sample '" + s.id + "' has no B-ORCHIZ descriptor");
    }
}

PipelineModel PipelineModel::train(const std::vector<Sample>& samples, const PipelineConfig& config) {
    require_descriptors(samples, config.descriptor);
    std::vector<std::string> y;
    for (const auto& s : samples) {
        if (s.label.empty()) throw std::invalid_argument("sample '" + s.id + "' is unlabeled");
        y.push_back(s.label);
    }
    PipelineModel m;
    m.kind_ = config.descriptor;
    m.classes_ = class_order(y);
    auto fit = [&](DescriptorKind cols) {
        FeatureMatrix X;
        for (const auto& s : samples) X.push_back(columns_for(s, cols));
        return SvmModel::train(X, y, config.classifier);
    };
    switch (m.kind_) {
        case DescriptorKind::shapefeat:
        case DescriptorKind::borchiz:
        case DescriptorKind::early: m.first_ = fit(m.kind_); break;
        case DescriptorKind::late:
            m.first_ = fit(DescriptorKind::shapefeat);
            m.second_ = fit(DescriptorKind::borchiz);
            break;
        case DescriptorKind::cotrans: {
            if (samples.size() < 2) throw std::invalid_argument("co-transduction needs at least two training samples");
            m.fusion_ = config.fusion;
            m.train_ = samples;
            FeatureMatrix shape;
            for (const auto& s : samples) shape.push_back(s.shapefeat);
            m.shape_scaler_ = MinMaxScaler::fit(shape);
            for (auto& s : m.train_) s.shapefeat = m.shape_scaler_.transform(s.shapefeat);
            FeatureMatrix scaled, contour;
            for (const auto& s : m.train_) {
                scaled.push_back(s.shapefeat);
                contour.push_back(s.borchiz);
            }
            m.shape_sigma_ = median_pairwise_distance(scaled, m.fusion_.shapefeat_metric);
            m.contour_sigma_ = median_pairwise_distance(contour, m.fusion_.borchiz_metric);
            m.cache_train_distances();
            break;
        }
    }
    return m;
}

void PipelineModel::cache_train_distances() {
    const std::size_t n = train_.size();
    shape_dist_.assign(n * n, 0.0);
    contour_dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            shape_dist_[i * n + j] = shape_dist_[j * n + i] =
                descriptor_distance(fusion_.shapefeat_metric, train_[i].shapefeat, train_[j].shapefeat);
            contour_dist_[i * n + j] = contour_dist_[j * n + i] =
                descriptor_distance(fusion_.borchiz_metric, train_[i].borchiz, train_[j].borchiz);
        }
}

PipelineModel::Output PipelineModel::predict(const Sample& sample) const {
    require_descriptors({sample}, kind_);
    Output out;
    switch (kind_) {
        case DescriptorKind::shapefeat:
        case DescriptorKind::borchiz:
        case DescriptorKind::early: {
            auto p = first_->predict(columns_for(sample, kind_));
            out.label = p.label;
            out.distribution = std::move(p.distribution);
            break;
        }
        case DescriptorKind::late: {
            const auto fused =
                late_fuse(first_->predict(sample.shapefeat).distribution, second_->predict(sample.borchiz).distribution);
            out.label = fused.classes[fused.argmax()];
            out.distribution = fused;
            break;
        }
        case DescriptorKind::cotrans: {
            const std::size_t n = train_.size(), m = n + 1;
            const auto q_shape = shape_scaler_.transform(sample.shapefeat);
            SimilarityMatrix s1, s2;
            std::vector<std::string> labels;
            for (const auto& t : train_) {
                s1.ids.push_back(t.id);
                labels.push_back(t.label);
            }
            s1.ids.push_back("query");
            labels.emplace_back();
            s2.ids = s1.ids;
            s1.values.assign(m * m, 1.0);
            s2.values.assign(m * m, 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    s1.values[i * m + j] = std::exp(-shape_dist_[i * n + j] / shape_sigma_);
                    s2.values[i * m + j] = std::exp(-contour_dist_[i * n + j] / contour_sigma_);
                }
                const double a =
                    std::exp(-descriptor_distance(fusion_.shapefeat_metric, q_shape, train_[i].shapefeat) / shape_sigma_);
                const double b =
                    std::exp(-descriptor_distance(fusion_.borchiz_metric, sample.borchiz, train_[i].borchiz) / contour_sigma_);
                s1.values[i * m + n] = s1.values[n * m + i] = a;
                s2.values[i * m + n] = s2.values[n * m + i] = b;
            }
            out.label = cotransduction_classify(s1, s2, n, labels, fusion_.k, fusion_.cotrans);
            break;
        }
    }
    return out;
}

std::string PipelineModel::to_json() const {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["descriptor"] = descriptor_name(kind_);
    doc["classes"] = classes_;
    if (first_) doc["first"] = nlohmann::json::parse(first_->to_json());
    if (second_) doc["second"] = nlohmann::json::parse(second_->to_json());
    if (kind_ == DescriptorKind::cotrans) {
        nlohmann::ordered_json c;
        c["shapefeat_metric"] = metric_name(fusion_.shapefeat_metric);
        c["borchiz_metric"] = metric_name(fusion_.borchiz_metric);
        c["p"] = fusion_.cotrans.neighbors_per_round;
        c["m"] = fusion_.cotrans.rounds;
        c["steps"] = fusion_.cotrans.steps;
        c["k"] = fusion_.k;
        c["scaler"] = {{"min", shape_scaler_.lo}, {"max", shape_scaler_.hi}};
        c["shapefeat_sigma"] = shape_sigma_;
        c["borchiz_sigma"] = contour_sigma_;
        auto items = nlohmann::ordered_json::array();
        for (const auto& s : train_)
            items.push_back({{"id", s.id}, {"label", s.label}, {"shapefeat", s.shapefeat}, {"borchiz", s.borchiz}});
        c["training"] = std::move(items);
        doc["cotransduction"] = std::move(c);
    }
    return doc.dump(1) + "\n";
}

PipelineModel PipelineModel::from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != kFormat) throw DataError("not a wearclass pipeline model");
        if (doc.at("version").get<int>() != kVersion)
            throw DataError("unsupported pipeline model version " + std::to_string(doc.at("version").get<int>()));
        PipelineModel m;
        m.kind_ = parse_descriptor(doc.at("descriptor").get<std::string>());
        m.classes_ = doc.at("classes").get<std::vector<std::string>>();
        if (doc.contains("first")) m.first_ = SvmModel::from_json(doc["first"].dump());
        if (doc.contains("second")) m.second_ = SvmModel::from_json(doc["second"].dump());
        const bool svm_ok = m.kind_ == DescriptorKind::cotrans ||
                            (m.first_ && (m.kind_ != DescriptorKind::late || m.second_));
        if (!svm_ok) throw DataError("pipeline model lacks its classifier");
        if (m.kind_ == DescriptorKind::cotrans) {
            const auto& c = doc.at("cotransduction");
            m.fusion_.shapefeat_metric = parse_metric(c.at("shapefeat_metric").get<std::string>());
            m.fusion_.borchiz_metric = parse_metric(c.at("borchiz_metric").get<std::string>());
            m.fusion_.cotrans.neighbors_per_round = c.at("p").get<int>();
            m.fusion_.cotrans.rounds = c.at("m").get<int>();
            m.fusion_.cotrans.steps = c.at("steps").get<int>();
            m.fusion_.k = c.at("k").get<int>();
            m.shape_scaler_.lo = c.at("scaler").at("min").get<std::vector<double>>();
            m.shape_scaler_.hi = c.at("scaler").at("max").get<std::vector<double>>();
            m.shape_sigma_ = c.at("shapefeat_sigma").get<double>();
            m.contour_sigma_ = c.at("borchiz_sigma").get<double>();
            for (const auto& item : c.at("training")) {
                Sample s;
                s.id = item.at("id").get<std::string>();
                s.label = item.at("label").get<std::string>();
                s.shapefeat = item.at("shapefeat").get<std::vector<double>>();
                s.borchiz = item.at("borchiz").get<std::vector<double>>();
                m.train_.push_back(std::move(s));
            }
            if (m.train_.size() < 2 || !(m.shape_sigma_ > 0.0) || !(m.contour_sigma_ > 0.0))
                throw DataError("malformed co-transduction state");
            m.cache_train_distances();
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed pipeline model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed pipeline model: ") + e.what());
    }
}

FitPredict make_fit_predict(const std::vector<Sample>& samples, const PipelineConfig& config) {
    return [&samples, config](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test) {
        std::vector<Sample> tr;
        for (std::size_t i : train) tr.push_back(samples[i]);
        const auto model = PipelineModel::train(tr, config);
        std::vector<std::string> out;
        for (std::size_t i : test) out.push_back(model.predict(samples[i]).label);
        return out;
    };
}

EvalReport evaluate(const std::vector<Sample>& samples, const PipelineConfig& config) {
    require_descriptors(samples, config.descriptor);
    std::vector<std::string> labels;
    for (const auto& s : samples) {
        if (s.label.empty()) throw std::invalid_argument("sample '" + s.id + "' is unlabeled");
        labels.push_back(s.label);
    }
    EvalOptions opt;
    opt.runs = config.eval.runs;
    opt.train_fraction = config.eval.train_fraction;
    opt.seed = config.seed;
    auto report = monte_carlo_eval(labels, make_fit_predict(samples, config), opt);
    report.config = to_toml(config);
    return report;
}

}  // namespace wearclass
