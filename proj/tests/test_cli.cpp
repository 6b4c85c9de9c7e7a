#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qin/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliSandbox {
    fs::path dir;
    CliSandbox() {
        dir = fs::temp_directory_path() /
              ("qin_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliSandbox() { fs::remove_all(dir); }

    fs::path write_config(const std::string& name, const json& config) {
        fs::path path = dir / name;
        std::ofstream out(path);
        out << config.dump(2);
        return path;
    }

    int run(const std::string& args) const {
        std::string command = std::string(QIN_CLI_PATH) + " " + args + " > " +
                              (dir / "stdout.txt").string() + " 2> " +
                              (dir / "stderr.txt").string();
        int status = std::system(command.c_str());
        return WEXITSTATUS(status);
    }

    std::string slurp(const fs::path& path) const {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
};

const json kChainDist{{"d", 1}, {"c", {0.0, 1.0}}};
const json kTreeDist{{"d", 2}, {"c", {0.25, 0.0, 0.75}}};

}  // namespace

TEST_CASE("cli: build-scheme writes the fixture table") {
    CliSandbox box;
    auto config = box.write_config(
        "build.json",
        json{{"scheme", {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}, {"normalized", true}}}});
    int code = box.run("build-scheme --config " + config.string() + " --out " +
                       (box.dir / "out").string());
    CHECK(code == 0);
    json table = json::parse(box.slurp(box.dir / "out" / "reward_table.json"));
    CHECK(table["h"] == 3);
    CHECK(table["kind"] == "chain_dr_normalized");
    bool found = false;
    for (const auto& entry : table["entries"]) {
        if (entry[0] == 1 && entry[1] == 0) {
            CHECK(entry[2] == 3.5);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("cli: build-scheme rejects an invalid horizon") {
    CliSandbox box;
    auto config = box.write_config(
        "bad.json", json{{"scheme", {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 0}}}});
    CHECK(box.run("build-scheme --config " + config.string()) == 2);
}

TEST_CASE("cli: unknown config keys are rejected") {
    CliSandbox box;
    auto config = box.write_config(
        "extra.json",
        json{{"scheme", {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}}}, {"typo", 1}});
    CHECK(box.run("build-scheme --config " + config.string()) == 2);
}

TEST_CASE("cli: missing or malformed config files") {
    CliSandbox box;
    CHECK(box.run("build-scheme --config " + (box.dir / "absent.json").string()) == 2);
    fs::path garbled = box.dir / "garbled.json";
    std::ofstream(garbled) << "{not json";
    CHECK(box.run("audit --config " + garbled.string()) == 2);
}

TEST_CASE("cli: audit exit codes") {
    CliSandbox box;
    auto verbatim = box.write_config(
        "verbatim.json",
        json{{"scheme",
              {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}, {"normalized", false}}}});
    CHECK(box.run("audit --config " + verbatim.string() + " --out " +
                  (box.dir / "v").string()) == 1);
    std::string witnesses = box.slurp(box.dir / "v" / "witnesses.csv");
    CHECK(witnesses.find("1,2,1") != std::string::npos);

    auto normalized = box.write_config(
        "normalized.json",
        json{{"scheme", {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}}}});
    CHECK(box.run("audit --config " + normalized.string() + " --out " +
                  (box.dir / "n").string()) == 0);

    auto split = box.write_config(
        "split.json",
        json{{"scheme", {{"kind", "split_counterexample"}, {"h", 2}, {"base", 4.0}}},
             {"n", 2.0}});
    CHECK(box.run("audit --config " + split.string() + " --out " +
                  (box.dir / "s").string()) == 1);
}

TEST_CASE("cli: audit a table loaded from file") {
    CliSandbox box;
    auto build = box.write_config(
        "build.json",
        json{{"scheme",
              {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}, {"normalized", false}}}});
    REQUIRE(box.run("build-scheme --config " + build.string() + " --out " +
                    (box.dir / "t").string()) == 0);
    auto audit = box.write_config(
        "audit.json",
        json{{"table_file", (box.dir / "t" / "reward_table.json").string()}, {"n", 2.0}});
    CHECK(box.run("audit --config " + audit.string() + " --out " +
                  (box.dir / "ta").string()) == 1);
    json report = json::parse(box.slurp(box.dir / "ta" / "audit_report.json"));
    CHECK(report["verdict"] == "violated");
}

TEST_CASE("cli: analyze-branching") {
    CliSandbox box;
    auto chain = box.write_config(
        "chain.json", json{{"distribution", kChainDist}, {"n", 2.0}, {"h", 5}});
    CHECK(box.run("analyze-branching --config " + chain.string() + " --out " +
                  (box.dir / "c").string()) == 0);
    std::string csv = box.slurp(box.dir / "c" / "phi_lambda.csv");
    CHECK(csv.find("0.5") != std::string::npos);
    CHECK(csv.find("0.03125") != std::string::npos);  // phi_5 = (1/2)^5

    auto forced = box.write_config("forced.json", json{{"distribution", kChainDist},
                                                       {"n", 2.0},
                                                       {"h", 5},
                                                       {"landmarks", true}});
    CHECK(box.run("analyze-branching --config " + forced.string()) == 2);
    CHECK(box.slurp(box.dir / "stderr.txt").find("branching factor") != std::string::npos);

    auto tree = box.write_config(
        "tree.json", json{{"distribution", kTreeDist}, {"n", 100.0}, {"h", 40}});
    CHECK(box.run("analyze-branching --config " + tree.string() + " --out " +
                  (box.dir / "t").string()) == 0);
    json landmarks = json::parse(box.slurp(box.dir / "t" / "landmarks.json"));
    CHECK(landmarks.contains("ellstar"));
    CHECK(landmarks["rho"].get<double>() > 1.0);
}

TEST_CASE("cli: simulate determinism and exit code") {
    CliSandbox box;
    json config{{"distribution", kChainDist},
                {"n", 2.0},
                {"h", 3},
                {"scheme", {{"kind", "chain_dr"}, {"n", 2.0}, {"h", 3}}},
                {"rule", "SP"},
                {"trials", 50000},
                {"seed", 42}};
    auto path = box.write_config("sim.json", config);
    CHECK(box.run("simulate --config " + path.string() + " --out " +
                  (box.dir / "a").string()) == 0);
    CHECK(box.run("simulate --config " + path.string() + " --out " +
                  (box.dir / "b").string()) == 0);
    CHECK(box.slurp(box.dir / "a" / "summary.json") ==
          box.slurp(box.dir / "b" / "summary.json"));
    CHECK(box.slurp(box.dir / "a" / "results.csv") ==
          box.slurp(box.dir / "b" / "results.csv"));

    // Seed override must change the outcome.
    CHECK(box.run("simulate --config " + path.string() + " --seed 43 --out " +
                  (box.dir / "d").string()) == 0);
    CHECK(box.slurp(box.dir / "a" / "summary.json") !=
          box.slurp(box.dir / "d" / "summary.json"));

    json single = config;
    single["trials"] = 1;
    auto single_path = box.write_config("single.json", single);
    CHECK(box.run("simulate --config " + single_path.string() + " --out " +
                  (box.dir / "e").string()) == 0);

    // RW on a branching tree: deltas are reported but not enforced, since the
    // walk may select past the first answer.
    json rw{{"distribution", kTreeDist},
            {"n", 4.0},
            {"h", 4},
            {"scheme", {{"kind", "tree_dr"}, {"h", 4}, {"distribution", kTreeDist}, {"n", 4.0}}},
            {"rule", "RW"},
            {"trials", 30000},
            {"seed", 11}};
    auto rw_path = box.write_config("rw.json", rw);
    CHECK(box.run("simulate --config " + rw_path.string() + " --out " +
                  (box.dir / "rw").string()) == 0);
}

TEST_CASE("cli: simulate with a deviation") {
    CliSandbox box;
    json config{{"distribution", kTreeDist},
                {"n", 4.0},
                {"h", 4},
                {"scheme", {{"kind", "tree_dr"}, {"h", 4}, {"distribution", kTreeDist}, {"n", 4.0}}},
                {"rule", "SP"},
                {"trials", 40000},
                {"seed", 7},
                {"deviation", {{"level", 1}, {"sybils", 1}, {"holder", false}}}};
    auto path = box.write_config("dev.json", config);
    CHECK(box.run("simulate --config " + path.string() + " --out " +
                  (box.dir / "dev").string()) == 0);
    json summary = json::parse(box.slurp(box.dir / "dev" / "summary.json"));
    CHECK(summary["estimate"].contains("dr_freq"));
}

TEST_CASE("cli: cost-scaling") {
    CliSandbox box;
    auto chain = box.write_config("scaling.json", json{{"distribution", kChainDist},
                                                       {"n", 50.0},
                                                       {"h_list", {8, 16}},
                                                       {"chain_variant", "verbatim"}});
    CHECK(box.run("cost-scaling --config " + chain.string() + " --out " +
                  (box.dir / "cs").string()) == 0);
    std::string csv = box.slurp(box.dir / "cs" / "cost_scaling.csv");
    CHECK(csv.find("bracket_lo") != std::string::npos);

    auto tree = box.write_config("scaling_tree.json", json{{"distribution", kTreeDist},
                                                           {"n", 100.0},
                                                           {"h_list", {5, 10}}});
    CHECK(box.run("cost-scaling --config " + tree.string() + " --out " +
                  (box.dir / "ct").string()) == 0);
}
