/**
 * @file pipeline.hpp
 * @brief Descriptor extraction for manifests and the five classification pipelines
 *        (ShapeFeat, B-ORCHIZ, early fusion, co-transduction, late fusion).
 */
#pragma once

#include "wearclass/config.hpp"
#include "wearclass/dataset.hpp"
#include "wearclass/eval.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wearclass {

/// Either descriptor may be empty when it was not extracted.
struct Sample {
    std::string id;
    std::string label;
    std::vector<double> shapefeat;
    std::vector<double> borchiz;
};

Sample describe_mask(const BinaryMask& mask, const PipelineConfig& config);

/// Mask rows are read directly; image rows go through insert preprocessing and yield the
/// wear region of the requested side. Throws DataError when no wear region is found.
BinaryMask load_record_mask(const Manifest& manifest, const ManifestRecord& record, const PipelineConfig& config);

struct ExtractResult {
    std::vector<Sample> samples;      ///< manifest order, failed rows left out
    std::vector<std::string> errors;  ///< "line N (id): message"
};

/// Rows are processed on up to @p threads workers (0 = hardware concurrency); the result
/// does not depend on the thread count.
ExtractResult extract_samples(const Manifest& manifest, const PipelineConfig& config, unsigned threads = 0);

/// Table for `shapefeat`, `borchiz` or `early` columns.
DescriptorTable samples_table(const std::vector<Sample>& samples, DescriptorKind columns, const PipelineConfig& config);

/// Joins a ShapeFeat table and a B-ORCHIZ table on id (either may be null). Labels must agree.
std::vector<Sample> samples_from_tables(const DescriptorTable* shapefeat, const DescriptorTable* borchiz);

class PipelineModel {
public:
    struct Output {
        std::string label;
        std::optional<ClassDistribution> distribution;  ///< absent for co-transduction
    };

    /// Every sample must be labeled and carry the descriptors the pipeline needs.
    static PipelineModel train(const std::vector<Sample>& samples, const PipelineConfig& config);
    Output predict(const Sample& sample) const;

    DescriptorKind kind() const { return kind_; }
    const std::vector<std::string>& classes() const { return classes_; }

    std::string to_json() const;
    /// Throws DataError on malformed documents.
    static PipelineModel from_json(std::string_view text);

private:
    void cache_train_distances();

    DescriptorKind kind_ = DescriptorKind::late;
    std::vector<std::string> classes_;
    std::optional<SvmModel> first_;
    std::optional<SvmModel> second_;

    // Co-transduction state, all fitted on the training samples.
    FusionSettings fusion_;
    std::vector<Sample> train_;
    MinMaxScaler shape_scaler_;
    double shape_sigma_ = 1.0;
    double contour_sigma_ = 1.0;
    std::vector<double> shape_dist_;
    std::vector<double> contour_dist_;
};

/// Throws std::invalid_argument when the samples lack a descriptor the pipeline needs.
void require_descriptors(const std::vector<Sample>& samples, DescriptorKind kind);

/// PipelineModel::train on each run's training split, predictions on its test split.
FitPredict make_fit_predict(const std::vector<Sample>& samples, const PipelineConfig& config);

/// Monte Carlo evaluation under config.eval with seed config.seed; the report carries to_toml(config).
EvalReport evaluate(const std::vector<Sample>& samples, const PipelineConfig& config);

}  // namespace wearclass
