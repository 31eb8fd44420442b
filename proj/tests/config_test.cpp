#include "wearclass/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace wearclass;

namespace {

int error_line(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.descriptor, DescriptorKind::late);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.fusion.k, 3);
    EXPECT_EQ(c.fusion.cotrans.neighbors_per_round, 3);
    EXPECT_EQ(c.fusion.cotrans.rounds, 3);
    EXPECT_EQ(c.fusion.shapefeat_metric, Metric::l1);
    EXPECT_EQ(c.fusion.borchiz_metric, Metric::chi2);
    EXPECT_EQ(c.eval.runs, 20);
    EXPECT_DOUBLE_EQ(c.eval.train_fraction, 0.75);
    EXPECT_EQ(c.rank.repeats, 5);
    EXPECT_DOUBLE_EQ(c.preprocess.diagonal_ratio, 4.92);
    EXPECT_EQ(c.classifier.kernel.kind, KernelKind::intersection);
}

TEST(Config, ReadsValues) {
    const auto c = parse_config(R"(
descriptor = "cotrans"
seed = 77

[classifier]
kernel = "rbf"
gamma = 2
C = 10.5

[fusion]
p = 4
k = 5
borchiz_metric = "l2"

[rank]
relabel = { M = "H" }

[synth]
per_class = 7
classes = ["A", "B"]
radius = [10, 20]
harmonic_mix = [0.0, 1.0]
)");
    EXPECT_EQ(c.descriptor, DescriptorKind::cotrans);
    EXPECT_EQ(c.seed, 77u);
    EXPECT_EQ(c.classifier.kernel.kind, KernelKind::rbf);
    EXPECT_DOUBLE_EQ(c.classifier.kernel.gamma, 2.0);
    EXPECT_DOUBLE_EQ(c.classifier.C, 10.5);
    EXPECT_EQ(c.fusion.cotrans.neighbors_per_round, 4);
    EXPECT_EQ(c.fusion.k, 5);
    EXPECT_EQ(c.fusion.borchiz_metric, Metric::l2);
    EXPECT_EQ(c.rank.relabel.at("M"), "H");
    EXPECT_EQ(c.synth.per_class, 7);
    EXPECT_EQ(c.synth.classes, (std::vector<std::string>{"A", "B"}));
}

TEST(Config, UnknownKeysReportTheirLine) {
    EXPECT_EQ(error_line("seed = 3\ncolour = 1\n"), 2);
    EXPECT_EQ(error_line("[fusion]\np = 2\n\nq = 4\n"), 4);
    EXPECT_EQ(error_line("[nonsense]\n"), 1);
    try {
        parse_config("[eval]\nrunz = 3\n", "my.toml");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "my.toml: line 2: unknown key 'eval.runz'");
    }
}

TEST(Config, TypeAndRangeErrorsReportTheirLine) {
    EXPECT_EQ(error_line("seed = 1\n[eval]\nruns = \"many\"\n"), 3);
    EXPECT_EQ(error_line("[eval]\ntrain_fraction = 1.5\n"), 2);
    EXPECT_EQ(error_line("[classifier]\n\nC = 0\n"), 3);
    EXPECT_EQ(error_line("descriptor = \"fancy\"\n"), 1);
    EXPECT_EQ(error_line("[fusion]\nshapefeat_metric = \"cosine\"\n"), 2);
    EXPECT_EQ(error_line("[synth]\nclasses = [\"A\"]\n"), 1);
    EXPECT_EQ(error_line("seed = \n"), 1);
    EXPECT_EQ(error_line("seed = -4\n"), 1);
}

TEST(Config, RoundTripIsStable) {
    auto c = parse_config("descriptor = \"early\"\nseed = 5\n[rank]\nrelabel = { M = \"H\", X = \"L\" }\n[eval]\ntrain_fraction = 0.7\n");
    const auto text = to_toml(c);
    const auto again = parse_config(text);
    EXPECT_EQ(to_toml(again), text);
    EXPECT_EQ(config_hash(again), config_hash(c));
    EXPECT_EQ(to_toml(parse_config(to_toml(PipelineConfig{}))), to_toml(PipelineConfig{}));
}

TEST(Config, HashTracksContent) {
    PipelineConfig a, b;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    // Published FNV-1a test vectors.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "wearclass_config_test.toml";
    {
        std::ofstream out(path);
        out << "seed = 12\n[fusion]\nsteps = 10\n";
    }
    const auto c = load_config(path);
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.fusion.cotrans.steps, 10);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), ConfigError);
}
