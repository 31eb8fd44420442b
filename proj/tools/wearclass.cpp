// wearclass command-line tool: synth, extract, train, predict, eval, rank.

#include "wearclass/config.hpp"
#include "wearclass/dataset.hpp"
#include "wearclass/eval.hpp"
#include "wearclass/pipeline.hpp"
#include "wearclass/shapefeat.hpp"
#include "wearclass/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace wearclass;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, internal = 3 };

// Raised for problems with the command line itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

struct Inputs {
    std::string manifest;
    std::string shapefeat_csv;
    std::string borchiz_csv;
    unsigned threads = 0;
};

PipelineConfig resolve_config(const Common& common) {
    PipelineConfig c = common.config_path.empty() ? PipelineConfig{} : load_config(common.config_path);
    if (const char* env = std::getenv("WEARCLASS_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || env[0] == '-') throw UsageError("WEARCLASS_SEED must be a nonnegative integer");
        c.seed = v;
    }
    if (common.seed) c.seed = *common.seed;
    return c;
}

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("-c,--config", common.config_path, "TOML configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "Seed (overrides WEARCLASS_SEED and the config)");
}

void add_inputs(CLI::App* cmd, Inputs& in) {
    auto* m = cmd->add_option("-m,--manifest", in.manifest, "Manifest CSV (descriptors are extracted on the fly)");
    auto* a = cmd->add_option("--shapefeat", in.shapefeat_csv, "ShapeFeat descriptor CSV");
    auto* b = cmd->add_option("--borchiz", in.borchiz_csv, "B-ORCHIZ descriptor CSV");
    m->excludes(a)->excludes(b);
    cmd->add_option("-j,--threads", in.threads, "Extraction threads (0 = all cores)");
}

void log_errors(const std::vector<std::string>& errors) {
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
}

std::vector<Sample> load_samples(const Inputs& in, const PipelineConfig& config) {
    if (!in.manifest.empty()) {
        auto result = extract_samples(read_manifest(in.manifest), config, in.threads);
        if (!result.errors.empty()) {
            log_errors(result.errors);
            throw DataError(std::to_string(result.errors.size()) + " manifest row(s) failed");
        }
        return std::move(result.samples);
    }
    std::optional<DescriptorTable> a, b;
    if (!in.shapefeat_csv.empty()) a = read_descriptor_csv(in.shapefeat_csv);
    if (!in.borchiz_csv.empty()) b = read_descriptor_csv(in.borchiz_csv);
    if (!a && !b) throw UsageError("give --manifest, or --shapefeat and/or --borchiz");
    return samples_from_tables(a ? &*a : nullptr, b ? &*b : nullptr);
}

DescriptorKind descriptor_arg(const std::string& name) {
    try {
        return parse_descriptor(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string hash_line(const PipelineConfig& c) {
    return "# config_hash=" + config_hash(c) + "\n";
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- synth ---------------------------------------------------------------

int run_synth(const Common& common, const std::string& out_dir, std::optional<int> per_class) {
    auto config = resolve_config(common);
    if (per_class) config.synth.per_class = *per_class;
    SynthOptions opts = config.synth;
    opts.seed = config.seed;
    const auto samples = generate_synthetic(opts);

    const fs::path dir(out_dir);
    fs::create_directories(dir / "masks");
    std::vector<ManifestRecord> records;
    nlohmann::ordered_json params;
    params["config_hash"] = config_hash(config);
    params["seed"] = config.seed;
    params["config"] = to_toml(config);
    auto items = nlohmann::ordered_json::array();
    for (const auto& s : samples) {
        const fs::path rel = fs::path("masks") / (s.id + ".png");
        const fs::path target = dir / rel;
        const fs::path tmp = dir / "masks" / ("." + s.id + ".png.tmp");
        write_png(tmp, to_gray(s.mask));
        fs::rename(tmp, target);
        ManifestRecord r;
        r.id = s.id;
        r.mask = rel;
        r.label = s.label;
        records.push_back(std::move(r));
        items.push_back({{"id", s.id},
                         {"label", s.label},
                         {"radius", s.radius},
                         {"harmonic_mix", s.harmonic_mix},
                         {"amplitude", s.amplitude},
                         {"aspect", s.aspect},
                         {"tilt_deg", s.tilt_deg}});
    }
    params["samples"] = std::move(items);
    write_file_atomic(dir / "manifest.csv", hash_line(config) + manifest_csv(records));
    write_file_atomic(dir / "synth_params.json", params.dump(2) + "\n");
    std::cout << "wrote " << samples.size() << " masks and " << (dir / "manifest.csv").string() << "\n";
    return ok;
}

// --- extract -------------------------------------------------------------

int run_extract(const Common& common, const Inputs& in, const std::string& descriptor, const std::string& out) {
    const auto config = resolve_config(common);
    if (in.manifest.empty()) throw UsageError("extract needs --manifest");
    const auto kind = descriptor_arg(descriptor);
    if (kind == DescriptorKind::cotrans || kind == DescriptorKind::late)
        throw UsageError("extract writes shapefeat, borchiz or early columns");
    const auto result = extract_samples(read_manifest(in.manifest), config, in.threads);
    write_file_atomic(out, descriptor_csv(samples_table(result.samples, kind, config)));
    std::cout << "wrote " << result.samples.size() << " rows to " << out << "\n";
    if (!result.errors.empty()) {
        log_errors(result.errors);
        std::cerr << result.errors.size() << " row(s) failed\n";
        return data;
    }
    return ok;
}

// --- train / predict -----------------------------------------------------

int run_train(const Common& common, const Inputs& in, const std::string& descriptor, const std::string& out) {
    auto config = resolve_config(common);
    if (!descriptor.empty()) config.descriptor = descriptor_arg(descriptor);
    const auto samples = load_samples(in, config);
    const auto model = PipelineModel::train(samples, config);
    auto doc = nlohmann::ordered_json::parse(model.to_json());
    doc["config_hash"] = config_hash(config);
    write_file_atomic(out, doc.dump(1) + "\n");
    std::cout << "trained " << descriptor_name(model.kind()) << " model on " << samples.size() << " samples\n";
    return ok;
}

int run_predict(const Common& common, const Inputs& in, const std::string& model_path, const std::string& out) {
    const auto config = resolve_config(common);
    const auto model = PipelineModel::from_json(read_text_file(model_path));
    const auto samples = load_samples(in, config);
    std::string csv = hash_line(config) + "id,label";
    for (const auto& c : model.classes()) csv += ",p_" + csv_field(c);
    csv += "\n";
    for (const auto& s : samples) {
        const auto p = model.predict(s);
        csv += csv_field(s.id) + "," + csv_field(p.label);
        for (const auto& c : model.classes()) csv += "," + (p.distribution ? num(p.distribution->prob(c)) : std::string());
        csv += "\n";
    }
    write_file_atomic(out, csv);
    std::cout << "wrote " << samples.size() << " predictions to " << out << "\n";
    return ok;
}

// --- eval ----------------------------------------------------------------

int run_eval(const Common& common, const Inputs& in, const std::string& descriptor, std::optional<int> runs,
             const std::string& out_dir) {
    auto config = resolve_config(common);
    if (!descriptor.empty()) config.descriptor = descriptor_arg(descriptor);
    if (runs) {
        if (*runs < 1) throw UsageError("--runs must be >= 1");
        config.eval.runs = *runs;
    }
    const auto samples = load_samples(in, config);
    for (const auto& s : samples)
        if (s.label.empty()) throw DataError("sample '" + s.id + "' has no label; eval needs labeled data");
    const auto report = evaluate(samples, config);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    auto doc = nlohmann::ordered_json::parse(report_json(report));
    doc["descriptor"] = descriptor_name(config.descriptor);
    doc["config_hash"] = config_hash(config);
    write_file_atomic(dir / "report.json", doc.dump(2) + "\n");
    write_file_atomic(dir / "report.csv", hash_line(config) + report_csv(report));
    write_file_atomic(dir / "confusion.csv", hash_line(config) + confusion_csv(report.confusion));
    char line[96];
    std::snprintf(line, sizeof line, "%s: mean accuracy %.4f over %zu runs\n",
                  std::string(descriptor_name(config.descriptor)).c_str(), report.mean_accuracy,
                  report.accuracies.size());
    std::cout << line;
    return ok;
}

// --- rank ----------------------------------------------------------------

int run_rank(const Common& common, const Inputs& in, const std::string& out) {
    const auto config = resolve_config(common);
    if (!in.borchiz_csv.empty()) throw UsageError("rank works on ShapeFeat features; drop --borchiz");
    FeatureMatrix X;
    std::vector<std::string> labels, names;
    if (!in.shapefeat_csv.empty()) {
        const auto t = read_descriptor_csv(in.shapefeat_csv);
        X = t.rows;
        labels = t.labels;
        names = t.names;
    } else {
        for (const auto& s : load_samples(in, config)) {
            X.push_back(s.shapefeat);
            labels.push_back(s.label);
        }
        for (auto n : shapefeat_names()) names.emplace_back(n);
    }
    for (auto& l : labels) {
        if (l.empty()) throw DataError("rank needs labeled data");
        if (auto it = config.rank.relabel.find(l); it != config.rank.relabel.end()) l = it->second;
    }
    const auto classes = class_order(labels);
    if (classes.size() != 2) {
        std::string list;
        for (const auto& c : classes) list += (list.empty() ? "" : ", ") + c;
        throw DataError("rank needs two classes, found " + std::to_string(classes.size()) + " (" + list +
                        "); binarize with [rank] relabel, e.g. relabel = { M = \"H\" }");
    }
    RankOptions opt;
    opt.svm = config.classifier;
    opt.repeats = config.rank.repeats;
    opt.train_fraction = config.rank.train_fraction;
    opt.seed = config.seed;
    const auto ranking = wrapper_rank(X, labels, names, opt);

    std::string csv = hash_line(config) + "rank,feature,auc_when_removed\n";
    // auc_when_removed: mean AUC of the features left after this one was discarded.
    for (std::size_t r = 0; r < ranking.ranked.size(); ++r) {
        std::string auc;
        for (const auto& round : ranking.rounds)
            if (round.removed == ranking.ranked[r]) auc = num(round.auc);
        csv += std::to_string(r + 1) + "," + csv_field(ranking.ranked[r]) + "," + auc + "\n";
    }
    write_file_atomic(out, csv);
    for (std::size_t r = 0; r < ranking.ranked.size(); ++r) std::cout << r + 1 << ". " << ranking.ranked[r] << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tool-wear region classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wearclass 1.0");

    Common common;
    Inputs inputs;
    std::string out, descriptor, model_path;
    std::optional<int> per_class, runs;

    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic mask dataset");
    add_common(synth, common);
    synth->add_option("-o,--out", out, "Output directory")->required();
    synth->add_option("-n,--per-class", per_class, "Samples per class")->check(CLI::PositiveNumber);

    auto* extract = app.add_subcommand("extract", "Compute descriptors for every manifest row");
    add_common(extract, common);
    extract->add_option("-m,--manifest", inputs.manifest, "Manifest CSV")->required();
    extract->add_option("-d,--descriptor", descriptor, "shapefeat, borchiz or early")->required();
    extract->add_option("-o,--out", out, "Output CSV")->required();
    extract->add_option("-j,--threads", inputs.threads, "Worker threads (0 = all cores)");

    auto* train = app.add_subcommand("train", "Fit a classification pipeline");
    add_common(train, common);
    add_inputs(train, inputs);
    train->add_option("-d,--descriptor", descriptor, "shapefeat, borchiz, early, cotrans or late (default: config)");
    train->add_option("-o,--out", out, "Model JSON")->required();

    auto* predict = app.add_subcommand("predict", "Classify samples with a trained model");
    add_common(predict, common);
    add_inputs(predict, inputs);
    predict->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
    predict->add_option("-o,--out", out, "Predictions CSV")->required();

    auto* eval = app.add_subcommand("eval", "Stratified Monte Carlo evaluation");
    add_common(eval, common);
    add_inputs(eval, inputs);
    eval->add_option("-d,--descriptor", descriptor, "shapefeat, borchiz, early, cotrans or late (default: config)");
    eval->add_option("--runs", runs, "Number of runs (default: config)");
    eval->add_option("-o,--out-dir", out, "Report directory")->required();

    auto* rank = app.add_subcommand("rank", "Wrapper ranking of ShapeFeat features by AUC");
    add_common(rank, common);
    add_inputs(rank, inputs);
    rank->add_option("-o,--out", out, "Ranking CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*synth) return run_synth(common, out, per_class);
        if (*extract) return run_extract(common, inputs, descriptor, out);
        if (*train) return run_train(common, inputs, descriptor, out);
        if (*predict) return run_predict(common, inputs, model_path, out);
        if (*eval) return run_eval(common, inputs, descriptor, runs, out);
        if (*rank) return run_rank(common, inputs, out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data;
    } catch (const EvalError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal;
    }
    return internal;
}
