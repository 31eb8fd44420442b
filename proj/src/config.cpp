#include "wearclass/config.hpp"

#include <toml.hpp>

#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace wearclass {

std::string_view descriptor_name(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::shapefeat: return "shapefeat";
        case DescriptorKind::borchiz: return "borchiz";
        case DescriptorKind::early: return "early";
        case DescriptorKind::cotrans: return "cotrans";
        case DescriptorKind::late: return "late";
    }
    return "late";
}

DescriptorKind parse_descriptor(std::string_view name) {
    for (auto k : {DescriptorKind::shapefeat, DescriptorKind::borchiz, DescriptorKind::early, DescriptorKind::cotrans,
                   DescriptorKind::late})
        if (descriptor_name(k) == name) return k;
    throw std::invalid_argument("unknown descriptor '" + std::string(name) +
                                "' (expected shapefeat, borchiz, early, cotrans or late)");
}

namespace {

std::string format_config_error(const std::string& source, int line, const std::string& detail) {
    std::string out;
    if (!source.empty()) out += source + ": ";
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    return out + detail;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string detail)
    : std::runtime_error(format_config_error(source, line, detail)),
      source_(std::move(source)),
      line_(line),
      detail_(std::move(detail)) {}

namespace {

int line_of(const toml::node& n) {
    return static_cast<int>(n.source().begin.line);
}

class Section {
public:
    Section(const toml::table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

    void integer(const char* key, int& out, long long lo, long long hi) {
        long long v = out;
        integer64(key, v, lo, hi);
        out = static_cast<int>(v);
    }

    void integer64(const char* key, long long& out, long long lo, long long hi) {
        const toml::node* n = find(key);
        if (!n) return;
        const auto v = n->value<long long>();
        if (!n->is_integer() || !v) fail(*n, key, "expected an integer");
        if (*v < lo || *v > hi) fail(*n, key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out = *v;
    }

    template <class Pred>
    void real(const char* key, double& out, Pred ok, const char* rule) {
        const toml::node* n = find(key);
        if (!n) return;
        if (!n->is_number()) fail(*n, key, "expected a number");
        const double v = *n->value<double>();
        if (!ok(v)) fail(*n, key, rule);
        out = v;
    }

    void boolean(const char* key, bool& out) {
        const toml::node* n = find(key);
        if (!n) return;
        if (!n->is_boolean()) fail(*n, key, "expected true or false");
        out = *n->value<bool>();
    }

    template <class Parse>
    void text(const char* key, Parse parse) {
        const toml::node* n = find(key);
        if (!n) return;
        if (!n->is_string()) fail(*n, key, "expected a string");
        try {
            parse(*n->value<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(*n, key, e.what());
        }
    }

    void strings(const char* key, std::vector<std::string>& out) {
        const toml::node* n = find(key);
        if (!n) return;
        const auto* arr = n->as_array();
        if (!arr) fail(*n, key, "expected an array of strings");
        std::vector<std::string> v;
        for (const auto& e : *arr) {
            if (!e.is_string()) fail(e, key, "expected an array of strings");
            v.push_back(*e.value<std::string>());
        }
        out = std::move(v);
    }

    void reals(const char* key, std::vector<double>& out) {
        const toml::node* n = find(key);
        if (!n) return;
        const auto* arr = n->as_array();
        if (!arr) fail(*n, key, "expected an array of numbers");
        std::vector<double> v;
        for (const auto& e : *arr) {
            if (!e.is_number()) fail(e, key, "expected an array of numbers");
            v.push_back(*e.value<double>());
        }
        out = std::move(v);
    }

    void string_map(const char* key, std::map<std::string, std::string>& out) {
        const toml::node* n = find(key);
        if (!n) return;
        const auto* t = n->as_table();
        if (!t) fail(*n, key, "expected a table of strings");
        std::map<std::string, std::string> m;
        for (const auto& [k, v] : *t) {
            if (!v.is_string()) fail(v, key, "expected string values");
            m[std::string(k.str())] = *v.value<std::string>();
        }
        out = std::move(m);
    }

    // Rejects keys that no accessor asked for.
    void finish() const {
        for (const auto& [k, v] : table_) {
            const std::string name(k.str());
            if (!seen_.count(name)) {
                const int line = k.source().begin.line ? static_cast<int>(k.source().begin.line) : line_of(v);
                throw ConfigError("", line, "unknown key '" + prefix_ + name + "'");
            }
        }
    }

    const toml::table* subtable(const char* key) {
        const toml::node* n = find(key);
        if (!n) return nullptr;
        if (!n->is_table()) fail(*n, key, "expected a table");
        return n->as_table();
    }

private:
    const toml::node* find(const char* key) {
        seen_.insert(key);
        return table_.get(key);
    }

    [[noreturn]] void fail(const toml::node& n, const char* key, const std::string& why) const {
        throw ConfigError("", line_of(n), "'" + prefix_ + key + "': " + why);
    }

    const toml::table& table_;
    std::string prefix_;
    std::set<std::string> seen_;
};

constexpr long long kIntMax = 1'000'000'000;

auto positive = [](double v) { return v > 0.0; };
auto non_negative = [](double v) { return v >= 0.0; };
auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };

void read_document(const toml::table& root, PipelineConfig& c) {
    Section top(root, "");
    top.text("descriptor", [&](const std::string& s) { c.descriptor = parse_descriptor(s); });
    long long seed = static_cast<long long>(c.seed);
    top.integer64("seed", seed, 0, std::numeric_limits<long long>::max());
    c.seed = static_cast<std::uint64_t>(seed);

    if (const auto* t = top.subtable("classifier")) {
        Section s(*t, "classifier.");
        s.text("kernel", [&](const std::string& v) { c.classifier.kernel.kind = parse_kernel(v); });
        s.real("gamma", c.classifier.kernel.gamma, positive, "must be > 0");
        s.real("C", c.classifier.C, positive, "must be > 0");
        s.real("tolerance", c.classifier.tolerance, positive, "must be > 0");
        s.finish();
    }
    if (const auto* t = top.subtable("fusion")) {
        Section s(*t, "fusion.");
        s.text("shapefeat_metric", [&](const std::string& v) { c.fusion.shapefeat_metric = parse_metric(v); });
        s.text("borchiz_metric", [&](const std::string& v) { c.fusion.borchiz_metric = parse_metric(v); });
        s.integer("p", c.fusion.cotrans.neighbors_per_round, 1, kIntMax);
        s.integer("m", c.fusion.cotrans.rounds, 1, kIntMax);
        s.integer("steps", c.fusion.cotrans.steps, 0, kIntMax);
        s.integer("k", c.fusion.k, 1, kIntMax);
        s.finish();
    }
    if (const auto* t = top.subtable("eval")) {
        Section s(*t, "eval.");
        s.integer("runs", c.eval.runs, 1, kIntMax);
        s.real("train_fraction", c.eval.train_fraction, open_unit, "must be in (0, 1)");
        s.finish();
    }
    if (const auto* t = top.subtable("rank")) {
        Section s(*t, "rank.");
        s.integer("repeats", c.rank.repeats, 1, kIntMax);
        s.real("train_fraction", c.rank.train_fraction, open_unit, "must be in (0, 1)");
        s.string_map("relabel", c.rank.relabel);
        s.finish();
    }
    if (const auto* t = top.subtable("borchiz")) {
        Section s(*t, "borchiz.");
        s.integer("max_order", c.borchiz.max_order, 0, 40);
        s.integer("bins", c.borchiz.bins, 2, 360);
        s.integer("stride", c.borchiz.stride, 1, kIntMax);
        s.integer("offset", c.borchiz.offset, 1, kIntMax);
        s.integer("contour_extent", c.borchiz.contour_extent, 8, 4096);
        s.real("smoothing", c.borchiz.smoothing, non_negative, "must be >= 0");
        s.finish();
    }
    if (const auto* t = top.subtable("shapefeat")) {
        Section s(*t, "shapefeat.");
        s.boolean("convex_area_correction", c.shapefeat.convex_area_correction);
        s.finish();
    }
    if (const auto* t = top.subtable("preprocess")) {
        Section s(*t, "preprocess.");
        auto& p = c.preprocess;
        s.integer("insert_threshold", p.insert_threshold, 0, 254);
        s.real("diagonal_ratio", p.diagonal_ratio, positive, "must be > 0");
        s.real("edge_fraction", p.edge_fraction, [](double v) { return v > 0.0 && v <= 1.0; }, "must be in (0, 1]");
        s.integer("edge_closing_radius", p.edge_closing_radius, 1, 64);
        s.integer("band_radius", p.band_radius, 1, 256);
        s.real("min_contrast", p.min_contrast, non_negative, "must be >= 0");
        s.integer("wear_closing_radius", p.wear_closing_radius, 1, 64);
        s.finish();
    }
    if (const auto* t = top.subtable("synth")) {
        Section s(*t, "synth.");
        auto& y = c.synth;
        s.integer("per_class", y.per_class, 1, 100000);
        s.strings("classes", y.classes);
        s.reals("radius", y.radius);
        s.real("radius_log_sigma", y.radius_log_sigma, non_negative, "must be >= 0");
        s.reals("harmonic_mix", y.harmonic_mix);
        s.real("harmonic_sigma", y.harmonic_sigma, non_negative, "must be >= 0");
        s.real("amplitude_min", y.amplitude_min, non_negative, "must be >= 0");
        s.real("amplitude_max", y.amplitude_max, [](double v) { return v >= 0.0 && v < 1.0; }, "must be in [0, 1)");
        s.real("aspect_min", y.aspect_min, positive, "must be > 0");
        s.real("aspect_max", y.aspect_max, positive, "must be > 0");
        s.real("max_tilt_deg", y.max_tilt_deg, non_negative, "must be >= 0");
        s.finish();
        if (y.radius.size() != y.classes.size() || y.harmonic_mix.size() != y.classes.size())
            throw ConfigError("", line_of(*t), "synth: classes, radius and harmonic_mix must have the same length");
        if (y.amplitude_min > y.amplitude_max || y.aspect_min > y.aspect_max)
            throw ConfigError("", line_of(*t), "synth: range minimum exceeds maximum");
    }
    top.finish();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string toml_string(std::string_view s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

template <class T, class F>
std::string list(const std::vector<T>& v, F fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out + "]";
}

}  // namespace

PipelineConfig parse_config(std::string_view text, std::string_view source_name) {
    const std::string source(source_name);
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError(source, static_cast<int>(e.source().begin.line), std::string(e.description()));
    }
    PipelineConfig c;
    try {
        read_document(root, c);
    } catch (const ConfigError& e) {
        throw ConfigError(source, e.line(), e.detail());
    }
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot read config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_toml(const PipelineConfig& c) {
    std::ostringstream o;
    o << "descriptor = " << toml_string(descriptor_name(c.descriptor)) << "\n";
    o << "seed = " << c.seed << "\n\n";
    o << "[classifier]\n"
      << "kernel = " << toml_string(kernel_name(c.classifier.kernel.kind)) << "\n"
      << "gamma = " << num(c.classifier.kernel.gamma) << "\n"
      << "C = " << num(c.classifier.C) << "\n"
      << "tolerance = " << num(c.classifier.tolerance) << "\n\n";
    o << "[fusion]\n"
      << "shapefeat_metric = " << toml_string(metric_name(c.fusion.shapefeat_metric)) << "\n"
      << "borchiz_metric = " << toml_string(metric_name(c.fusion.borchiz_metric)) << "\n"
      << "p = " << c.fusion.cotrans.neighbors_per_round << "\n"
      << "m = " << c.fusion.cotrans.rounds << "\n"
      << "steps = " << c.fusion.cotrans.steps << "\n"
      << "k = " << c.fusion.k << "\n\n";
    o << "[eval]\n"
      << "runs = " << c.eval.runs << "\n"
      << "train_fraction = " << num(c.eval.train_fraction) << "\n\n";
    o << "[rank]\n"
      << "repeats = " << c.rank.repeats << "\n"
      << "train_fraction = " << num(c.rank.train_fraction) << "\n"
      << "relabel = {";
    bool first = true;
    for (const auto& [k, v] : c.rank.relabel) {
        o << (first ? " " : ", ") << toml_string(k) << " = " << toml_string(v);
        first = false;
    }
    o << (first ? "}" : " }") << "\n\n";
    o << "[borchiz]\n"
      << "max_order = " << c.borchiz.max_order << "\n"
      << "bins = " << c.borchiz.bins << "\n"
      << "stride = " << c.borchiz.stride << "\n"
      << "offset = " << c.borchiz.offset << "\n"
      << "contour_extent = " << c.borchiz.contour_extent << "\n"
      << "smoothing = " << num(c.borchiz.smoothing) << "\n\n";
    o << "[shapefeat]\n"
      << "convex_area_correction = " << (c.shapefeat.convex_area_correction ? "true" : "false") << "\n\n";
    const auto& p = c.preprocess;
    o << "[preprocess]\n"
      << "insert_threshold = " << p.insert_threshold << "\n"
      << "diagonal_ratio = " << num(p.diagonal_ratio) << "\n"
      << "edge_fraction = " << num(p.edge_fraction) << "\n"
      << "edge_closing_radius = " << p.edge_closing_radius << "\n"
      << "band_radius = " << p.band_radius << "\n"
      << "min_contrast = " << num(p.min_contrast) << "\n"
      << "wear_closing_radius = " << p.wear_closing_radius << "\n\n";
    const auto& y = c.synth;
    o << "[synth]\n"
      << "per_class = " << y.per_class << "\n"
      << "classes = " << list(y.classes, [](const std::string& s) { return toml_string(s); }) << "\n"
      << "radius = " << list(y.radius, num) << "\n"
      << "radius_log_sigma = " << num(y.radius_log_sigma) << "\n"
      << "harmonic_mix = " << list(y.harmonic_mix, num) << "\n"
      << "harmonic_sigma = " << num(y.harmonic_sigma) << "\n"
      << "amplitude_min = " << num(y.amplitude_min) << "\n"
      << "amplitude_max = " << num(y.amplitude_max) << "\n"
      << "aspect_min = " << num(y.aspect_min) << "\n"
      << "aspect_max = " << num(y.aspect_max) << "\n"
      << "max_tilt_deg = " << num(y.max_tilt_deg) << "\n";
    return o.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const PipelineConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_toml(config))));
    return buf;
}

}  // namespace wearclass
