/**
 * @file config.hpp
 * @brief Pipeline configuration: TOML loading with strict key checking, canonical
 *        serialization and a content hash.
 */
#pragma once

#include "wearclass/borchiz.hpp"
#include "wearclass/classify.hpp"
#include "wearclass/fusion.hpp"
#include "wearclass/preprocess.hpp"
#include "wearclass/shapefeat.hpp"
#include "wearclass/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wearclass {

enum class DescriptorKind { shapefeat, borchiz, early, cotrans, late };

std::string_view descriptor_name(DescriptorKind kind);
DescriptorKind parse_descriptor(std::string_view name);

struct FusionSettings {
    Metric shapefeat_metric = Metric::l1;
    Metric borchiz_metric = Metric::chi2;
    CotransOptions cotrans;
    int k = 3;
};

struct EvalSettings {
    int runs = 20;
    double train_fraction = 0.75;
};

struct RankSettings {
    int repeats = 5;
    double train_fraction = 0.75;
    std::map<std::string, std::string> relabel;  ///< applied to labels before ranking
};

struct PipelineConfig {
    DescriptorKind descriptor = DescriptorKind::late;
    std::uint64_t seed = 1;
    SvmOptions classifier;
    FusionSettings fusion;
    EvalSettings eval;
    RankSettings rank;
    BorchizOptions borchiz;
    ShapeFeatOptions shapefeat;
    PreprocessOptions preprocess;
    SynthOptions synth;  ///< synth.seed is ignored; the top-level seed is used
};

/// what() reads "<source>: line N: <detail>" (source and line omitted when unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, std::string detail);
    const std::string& source() const { return source_; }
    int line() const { return line_; }
    const std::string& detail() const { return detail_; }

private:
    std::string source_;
    int line_;
    std::string detail_;
};

/// Keys left out keep their defaults. Unknown keys, wrong types and out-of-range values throw ConfigError.
PipelineConfig parse_config(std::string_view text, std::string_view source_name = "config");
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical TOML text with every key; parse_config(to_toml(c)) reproduces c.
std::string to_toml(const PipelineConfig& config);

/// 64-bit FNV-1a of to_toml(config), as 16 hex digits.
std::string config_hash(const PipelineConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace wearclass
