// Runs the wearclass binary end to end in a scratch directory.
#include "wearclass/dataset.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sys/wait.h>

namespace fs = std::filesystem;
using wearclass::read_text_file;

namespace {

struct Result {
    int code;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / "wearclass_cli_test";
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    static Result run(const std::string& args, const std::string& env = "") {
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + WEARCLASS_BIN + "' " + args +
                                " > /dev/null 2> '" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(err)};
    }

    static std::string file(const std::string& rel) { return read_text_file(dir_ / rel); }
    static void put(const std::string& rel, const std::string& text) { std::ofstream(dir_ / rel) << text; }

    static fs::path dir_;
};

fs::path Cli::dir_;

std::size_t count_lines(const std::string& text, bool skip_comments = true) {
    std::size_t n = 0, start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (!(skip_comments && text[start] == '#')) ++n;
        start = end == std::string::npos ? text.size() : end + 1;
    }
    return n;
}

}  // namespace

TEST_F(Cli, SynthIsDeterministic) {
    ASSERT_EQ(run("synth -o a -n 10").code, 0);
    ASSERT_EQ(run("synth -o b -n 10").code, 0);
    EXPECT_EQ(count_lines(file("a/manifest.csv")), 31u);
    EXPECT_EQ(file("a/manifest.csv"), file("b/manifest.csv"));
    for (const auto& e : fs::directory_iterator(dir_ / "a" / "masks"))
        EXPECT_EQ(read_text_file(e.path()), read_text_file(dir_ / "b" / "masks" / e.path().filename()));
    const auto params = nlohmann::json::parse(file("a/synth_params.json"));
    EXPECT_EQ(params["samples"].size(), 30u);
    EXPECT_EQ(file("a/manifest.csv").rfind("# config_hash=" + params["config_hash"].get<std::string>(), 0), 0u);
}

TEST_F(Cli, ExtractEvalTrainPredict) {
    ASSERT_EQ(run("synth -o d -n 12").code, 0);
    ASSERT_EQ(run("extract -m d/manifest.csv -d shapefeat -o sf.csv -j 3").code, 0);
    ASSERT_EQ(run("extract -m d/manifest.csv -d borchiz -o bz.csv").code, 0);
    ASSERT_EQ(run("extract -m d/manifest.csv -d borchiz -o bz2.csv -j 1").code, 0);
    EXPECT_EQ(file("bz.csv"), file("bz2.csv"));
    const auto sf = wearclass::parse_descriptor_csv(file("sf.csv"), "sf.csv");
    const auto bz = wearclass::parse_descriptor_csv(file("bz.csv"), "bz.csv");
    EXPECT_EQ(sf.rows.size(), 36u);
    EXPECT_EQ(sf.names.size(), 10u);
    EXPECT_EQ(bz.names.size(), 308u);
    EXPECT_EQ(sf.config_hash.size(), 16u);

    put("late.toml", "descriptor = \"late\"\n");
    ASSERT_EQ(run("eval -c late.toml --shapefeat sf.csv --borchiz bz.csv -o r1").code, 0);
    ASSERT_EQ(run("eval -c late.toml --shapefeat sf.csv --borchiz bz.csv -o r2").code, 0);
    EXPECT_EQ(file("r1/report.json"), file("r2/report.json"));
    const auto report = nlohmann::json::parse(file("r1/report.json"));
    EXPECT_EQ(report["accuracies"].size(), 20u);
    EXPECT_EQ(report["descriptor"], "late");
    EXPECT_EQ(count_lines(file("r1/report.csv")), 21u);
    EXPECT_EQ(file("r1/confusion.csv").find("truth,L,M,H"), file("r1/confusion.csv").find('\n') + 1);

    // Direct manifest input gives the same report as the CSVs.
    ASSERT_EQ(run("eval -c late.toml -m d/manifest.csv -o r3").code, 0);
    EXPECT_EQ(file("r3/report.json"), file("r1/report.json"));

    // The environment seed replaces the config seed and changes the hash.
    ASSERT_EQ(run("eval -c late.toml --shapefeat sf.csv --borchiz bz.csv -o r4", "WEARCLASS_SEED=99").code, 0);
    const auto seeded = nlohmann::json::parse(file("r4/report.json"));
    EXPECT_EQ(seeded["seed"], 99);
    EXPECT_NE(seeded["config_hash"], report["config_hash"]);
    ASSERT_EQ(run("eval -c late.toml --shapefeat sf.csv --borchiz bz.csv -o r5 --seed 7", "WEARCLASS_SEED=99").code, 0);
    EXPECT_EQ(nlohmann::json::parse(file("r5/report.json"))["seed"], 7);

    for (const std::string kind : {"shapefeat", "borchiz", "early", "cotrans", "late"}) {
        ASSERT_EQ(run("train --shapefeat sf.csv --borchiz bz.csv -d " + kind + " -o model_" + kind + ".json").code, 0) << kind;
        ASSERT_EQ(run("predict --model model_" + kind + ".json --shapefeat sf.csv --borchiz bz.csv -o pred_" + kind + ".csv").code, 0);
        EXPECT_EQ(count_lines(file("pred_" + kind + ".csv")), 37u);
    }
}

TEST_F(Cli, RankNeedsTwoClasses) {
    ASSERT_EQ(run("synth -o k -n 12").code, 0);
    const auto multi = run("rank -m k/manifest.csv -o rank.csv");
    EXPECT_EQ(multi.code, 2);
    EXPECT_NE(multi.err.find("binarize"), std::string::npos);
    put("binary.toml", "[rank]\nrelabel = { M = \"H\" }\nrepeats = 2\n");
    ASSERT_EQ(run("rank -c binary.toml -m k/manifest.csv -o rank.csv").code, 0);
    const auto text = file("rank.csv");
    std::set<std::string> names;
    std::size_t start = text.find('\n', text.find("rank,feature")) + 1;
    while (start < text.size()) {
        const auto line = text.substr(start, text.find('\n', start) - start);
        const auto a = line.find(',');
        names.insert(line.substr(a + 1, line.find(',', a + 1) - a - 1));
        start += line.size() + 1;
    }
    EXPECT_EQ(names, (std::set<std::string>{"convex_area", "eccentricity", "perimeter", "equivalent_diameter", "extent",
                                            "filled_area", "minor_axis_length", "major_axis_length", "r", "solidity"}));
}

TEST_F(Cli, ErrorsMapToExitCodes) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("eval -o x").code, 1);
    put("bad.toml", "seed = 1\ncolour = \"red\"\n");
    const auto bad = run("synth -c bad.toml -o z");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("line 2: unknown key 'colour'"), std::string::npos);
    EXPECT_EQ(run("synth -o z", "WEARCLASS_SEED=abc").code, 1);
    EXPECT_EQ(run("extract -m nowhere.csv -d shapefeat -o x.csv").code, 2);
    EXPECT_EQ(run("eval --shapefeat nowhere.csv -d shapefeat -o x").code, 2);

    // A corrupt image fails its own row only.
    ASSERT_EQ(run("synth -o e -n 2").code, 0);
    put("e/masks/s0001.png", "not a png");
    const auto partial = run("extract -m e/manifest.csv -d shapefeat -o e.csv");
    EXPECT_EQ(partial.code, 2);
    EXPECT_NE(partial.err.find("(s0001)"), std::string::npos);
    EXPECT_EQ(wearclass::parse_descriptor_csv(file("e.csv"), "e.csv").rows.size(), 5u);

    // Unlabeled data cannot be evaluated.
    put("e/unlabeled.csv", "id,mask,image,side,completeness,label\na,masks/s0000.png,,,,\nb,masks/s0002.png,,,,\n");
    const auto unlabeled = run("eval -m e/unlabeled.csv -o u");
    EXPECT_EQ(unlabeled.code, 2);
    EXPECT_NE(unlabeled.err.find("no label"), std::string::npos);
}
