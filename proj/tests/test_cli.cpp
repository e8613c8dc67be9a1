#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "shillscore/shillscore.hpp"

#include "support.hpp"

using namespace shillscore;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const support::TempDir& tmp, const std::string& args) {
    static int counter = 0;
    const fs::path capture = tmp.file("cli_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(SHILLSCORE_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (fs::exists(capture)) r.output = read_file(capture);
    return r;
}

SimConfig paper_scale_config() {
    SimConfig cfg;
    cfg.seed = 77;
    cfg.honest_sellers = 6;
    cfg.honest_bidders = 50;
    cfg.zi_spec = {34000, 90000, 0.12, 300, 3000};
    cfg.shill_spec = {30, 180, 0.8, 0.6};
    cfg.scenario.colluding_sellers = {"seller_a", "seller_b", "seller_c", "seller_d"};
    cfg.scenario.auctions_per_seller = 3;
    cfg.scenario.shill_bidder = "shill_a";
    cfg.scenario.strategy = CollusionStrategy::alternating_even;
    cfg.scenario.shill_fraction = 0.5;
    cfg.auction_duration = 3600;
    cfg.min_increment = 100;
    cfg.reference_value_min = 30000;
    cfg.reference_value_max = 40000;
    return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

TEST_CASE("generate writes a reproducible dataset with a manifest") {
    support::TempDir tmp("cli_generate");
    write_file(tmp.file("sim.json"), sim_config_to_json_string(paper_scale_config()));

    const CliResult r1 = run_cli(tmp, "generate " + tmp.file("sim.json").string() + " " +
                                          tmp.file("d1.json").string() + " --quiet");
    REQUIRE(r1.exit_code == 0);
    const Dataset ds = load_dataset(tmp.file("d1.json"));
    CHECK(ds.sellers.size() == 10);
    CHECK(ds.bidders.size() == 51);
    CHECK(ds.auctions.size() == 30);

    SECTION("two invocations agree byte for byte") {
        const CliResult r2 = run_cli(tmp, "generate " + tmp.file("sim.json").string() + " " +
                                              tmp.file("d2.json").string() + " --quiet");
        REQUIRE(r2.exit_code == 0);
        CHECK(read_file(tmp.file("d1.json")) == read_file(tmp.file("d2.json")));
        CHECK(fnv1a64_hex(read_file(tmp.file("d1.json"))) ==
              fnv1a64_hex(read_file(tmp.file("d2.json"))));
    }
    SECTION("the manifest records the digest and seed") {
        const auto manifest = nlohmann::json::parse(read_file(tmp.file("d1.json.manifest.json")));
        CHECK(manifest["seed"] == 77);
        CHECK(manifest["outputs"][0]["digest"] == fnv1a64_hex(read_file(tmp.file("d1.json"))));
        CHECK(manifest["config"]["seed"] == 77);
    }
    SECTION("--seed overrides the configured stream") {
        const CliResult r2 = run_cli(tmp, "generate " + tmp.file("sim.json").string() + " " +
                                              tmp.file("d3.json").string() + " --seed 78 --quiet");
        REQUIRE(r2.exit_code == 0);
        CHECK(read_file(tmp.file("d1.json")) != read_file(tmp.file("d3.json")));
        const auto manifest = nlohmann::json::parse(read_file(tmp.file("d3.json.manifest.json")));
        CHECK(manifest["seed"] == 78);
    }
}

TEST_CASE("generate maps failure classes onto exit codes") {
    support::TempDir tmp("cli_generate_err");
    SECTION("missing config file exits 3 and names the path") {
        const CliResult r = run_cli(tmp, "generate " + tmp.file("absent.json").string() + " " +
                                             tmp.file("out.json").string());
        CHECK(r.exit_code == 3);
        CHECK(r.output.find("absent.json") != std::string::npos);
    }
    SECTION("malformed config exits 2") {
        write_file(tmp.file("bad.json"), "{\"seed\": }");
        const CliResult r = run_cli(tmp, "generate " + tmp.file("bad.json").string() + " " +
                                             tmp.file("out.json").string());
        CHECK(r.exit_code == 2);
    }
    SECTION("invalid scenario exits 2") {
        SimConfig cfg = paper_scale_config();
        cfg.scenario.colluding_sellers = {"lonely"};
        write_file(tmp.file("bad.json"), sim_config_to_json_string(cfg));
        const CliResult r = run_cli(tmp, "generate " + tmp.file("bad.json").string() + " " +
                                             tmp.file("out.json").string());
        CHECK(r.exit_code == 2);
    }
    SECTION("usage errors exit 2") {
        CHECK(run_cli(tmp, "generate").exit_code == 2);
        CHECK(run_cli(tmp, "frobnicate x y").exit_code == 2);
    }
}

TEST_CASE("score emits the per-pair table") {
    support::TempDir tmp("cli_score");
    save_dataset(support::table1_dataset(), tmp.file("t1.json"));
    const CliResult r = run_cli(tmp, "score " + tmp.file("t1.json").string() + " " +
                                         tmp.file("scores.csv").string() + " --quiet");
    REQUIRE(r.exit_code == 0);

    const auto rows = lines_of(read_file(tmp.file("scores.csv")));
    REQUIRE(rows.size() == 4);  // header + one row per bidder
    CHECK(rows[0] == kScoresCsvHeader);
    CHECK(rows[1].rfind("b1,s1,", 0) == 0);
    // b2: alpha=1, beta=7/15, gamma=1, epsilon=1
    CHECK(rows[2].rfind("b2,s1,1.0000,0.4667,1.0000,", 0) == 0);
    CHECK(rows[2].find(",1.0000,0.9952,") != std::string::npos);  // epsilon, zeta

    SECTION("an empty dataset gives a header-only table") {
        save_dataset(Dataset{}, tmp.file("empty.json"));
        const CliResult r2 = run_cli(tmp, "score " + tmp.file("empty.json").string() + " " +
                                              tmp.file("empty.csv").string() + " --quiet");
        REQUIRE(r2.exit_code == 0);
        CHECK(read_file(tmp.file("empty.csv")) == std::string(kScoresCsvHeader) + "\n");
    }
    SECTION("validation failures exit 2") {
        std::string broken = read_file(tmp.file("t1.json"));
        const auto pos = broken.find("\"amount\": 500");
        REQUIRE(pos != std::string::npos);
        broken.replace(pos, 13, "\"amount\": 150");
        write_file(tmp.file("broken.json"), broken);
        const CliResult r2 = run_cli(tmp, "score " + tmp.file("broken.json").string() + " " +
                                              tmp.file("x.csv").string());
        CHECK(r2.exit_code == 2);
        CHECK(r2.output.find("amounts strictly increase") != std::string::npos);
    }
}

TEST_CASE("detect writes reports, a summary and optional graphs") {
    support::TempDir tmp("cli_detect");
    save_dataset(support::worked_example_dataset(), tmp.file("we.json"));
    const CliResult r = run_cli(tmp, "detect " + tmp.file("we.json").string() + " " +
                                         tmp.file("out").string() + " --dot --quiet");
    REQUIRE(r.exit_code == 0);

    SECTION("summary flags exactly b1 on s2;s3") {
        const auto rows = lines_of(read_file(tmp.file("out") / "summary.csv"));
        REQUIRE(rows.size() == 5);  // header + b1,b2,b3,crowd
        CHECK(rows[0] == kSummaryCsvHeader);
        CHECK(rows[1].rfind("b1,collusion_detected,\"s2;s3\",", 0) == 0);
        CHECK(rows[2].rfind("b2,no_evidence,\"\",", 0) == 0);
        CHECK(rows[3].rfind("b3,no_evidence,\"\",", 0) == 0);
        CHECK(rows[4].rfind("crowd,no_evidence,\"\",", 0) == 0);
    }
    SECTION("per-bidder reports agree with the summary verdicts") {
        const auto rows = lines_of(read_file(tmp.file("out") / "summary.csv"));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto fields = detail::csv_split(rows[i], "summary");
            const StoredReport rep = stored_report_from_json_string(
                read_file(tmp.file("out") / ("report_" + fields[0] + ".json")), "report");
            CHECK(rep.bidder == fields[0]);
            CHECK(rep.verdict == fields[1]);
        }
    }
    SECTION("four stage graphs per bidder, strong edges bold") {
        for (const char* name :
             {"b1_stage1_sag.dot", "b1_stage2_sag_weighted.dot", "b1_stage3_sbag_mss.dot",
              "b1_stage4_sbag_final.dot"}) {
            CHECK(fs::exists(tmp.file("out") / "dot" / name));
        }
        const std::string weighted = read_file(tmp.file("out") / "dot" / "b1_stage2_sag_weighted.dot");
        CHECK(weighted.find("\"s2\" -- \"s3\" [label=\"0.3333\", style=bold]") !=
              std::string::npos);
        CHECK(weighted.find("\"s1\" [label=\"s1\\n(3)\"]") != std::string::npos);
        const std::string final_stage =
            read_file(tmp.file("out") / "dot" / "b1_stage4_sbag_final.dot");
        CHECK(final_stage.find("adj") != std::string::npos);
    }
    SECTION("scores.csv sits next to the reports for later merging") {
        CHECK(fs::exists(tmp.file("out") / "scores.csv"));
        CHECK(fs::exists(tmp.file("out") / "manifest.json"));
    }
    SECTION("--config steers the thresholds") {
        // a prune threshold above b1's modified scores empties every report
        write_file(tmp.file("strict.json"), "{\"mss_prune_threshold\": 9.9}");
        const CliResult r2 = run_cli(tmp, "detect " + tmp.file("we.json").string() + " " +
                                              tmp.file("strict").string() + " --config " +
                                              tmp.file("strict.json").string() + " --quiet");
        REQUIRE(r2.exit_code == 0);
        const auto rows = lines_of(read_file(tmp.file("strict") / "summary.csv"));
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].find("no_evidence") != std::string::npos);
    }
    SECTION("bad score configs map onto the exit contract") {
        write_file(tmp.file("broken.json"), "{\"median_band\": -1}");
        CHECK(run_cli(tmp, "detect " + tmp.file("we.json").string() + " " +
                               tmp.file("x").string() + " --config " +
                               tmp.file("broken.json").string())
                  .exit_code == 2);
        CHECK(run_cli(tmp, "detect " + tmp.file("we.json").string() + " " +
                               tmp.file("x").string() + " --config " +
                               tmp.file("not_there.json").string())
                  .exit_code == 3);
    }
}

TEST_CASE("a baseline and a collusion run compare through the merged table") {
    support::TempDir tmp("cli_compare");
    SimConfig collusion = paper_scale_config();
    collusion.seed = 22;
    collusion.scenario.auctions_per_seller = 4;
    SimConfig baseline = collusion;
    baseline.seed = 27;
    baseline.scenario = CollusionScenario{};
    baseline.scenario.auctions_per_seller = 4;
    baseline.honest_sellers = 10;
    write_file(tmp.file("collusion.json"), sim_config_to_json_string(collusion));
    write_file(tmp.file("baseline.json"), sim_config_to_json_string(baseline));

    for (const char* run : {"baseline", "collusion"}) {
        REQUIRE(run_cli(tmp, "generate " + tmp.file(std::string(run) + ".json").string() + " " +
                                 tmp.file(std::string(run) + "_ds.json").string() + " --quiet")
                    .exit_code == 0);
        REQUIRE(run_cli(tmp, "detect " + tmp.file(std::string(run) + "_ds.json").string() + " " +
                                 (tmp.path() / run).string() + " --quiet")
                    .exit_code == 0);
    }
    REQUIRE(run_cli(tmp, "report " + (tmp.path() / "baseline").string() + " " +
                             (tmp.path() / "collusion").string() + " -o " +
                             tmp.file("compare.csv").string() + " --quiet")
                .exit_code == 0);

    int flagged_rows = 0;
    for (const std::string& row : lines_of(read_file(tmp.file("compare.csv")))) {
        if (row.rfind("collusion,shill_a,", 0) != 0) continue;
        const auto f = detail::csv_split(row, "compare");
        REQUIRE(f.size() == 7);
        if (f[6] != "1") continue;
        ++flagged_rows;
        // the rescored value recovers above the depressed plain score
        CHECK(std::stod(f[5]) > std::stod(f[3]));
    }
    CHECK(flagged_rows == 4);  // all four colluding sellers survive
}

TEST_CASE("report merges runs and prefers pipeline-adjusted scores") {
    support::TempDir tmp("cli_report");
    save_dataset(support::worked_example_dataset(), tmp.file("we.json"));
    save_dataset(support::table1_dataset(), tmp.file("t1.json"));
    REQUIRE(run_cli(tmp, "detect " + tmp.file("we.json").string() + " " +
                             (tmp.path() / "run_a").string() + " --quiet")
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "detect " + tmp.file("t1.json").string() + " " +
                             (tmp.path() / "run_b").string() + " --quiet")
                .exit_code == 0);

    SECTION("two runs concatenate with run labels") {
        const CliResult r = run_cli(tmp, "report " + (tmp.path() / "run_a").string() + " " +
                                             (tmp.path() / "run_b").string() + " -o " +
                                             tmp.file("merged.csv").string() + " --quiet");
        REQUIRE(r.exit_code == 0);
        const auto rows = lines_of(read_file(tmp.file("merged.csv")));
        const auto a_rows = lines_of(read_file(tmp.path() / "run_a" / "scores.csv")).size() - 1;
        const auto b_rows = lines_of(read_file(tmp.path() / "run_b" / "scores.csv")).size() - 1;
        CHECK(rows.size() == 1 + a_rows + b_rows);
        CHECK(rows[0] == "run,bidder_id,seller_id,shill_score,mss,adjusted_score,detected");

        // b1/s2 was flagged, so its adjusted column carries the pipeline value
        const StoredReport rep = stored_report_from_json_string(
            read_file(tmp.path() / "run_a" / "report_b1.json"), "report_b1");
        REQUIRE_FALSE(rep.final.empty());
        bool found = false;
        for (const auto& row : rows) {
            if (row.rfind("run_a,b1,s2,", 0) != 0) continue;
            found = true;
            CHECK(row.find("," + fmt4(rep.final[0].adjusted_score) + ",1") != std::string::npos);
        }
        CHECK(found);
    }
    SECTION("a single run passes through") {
        const CliResult r = run_cli(tmp, "report " + (tmp.path() / "run_b").string() + " -o " +
                                             tmp.file("single.json").string() +
                                             " --format json --quiet");
        REQUIRE(r.exit_code == 0);
        const auto merged = nlohmann::json::parse(read_file(tmp.file("single.json")));
        CHECK(merged.size() ==
              lines_of(read_file(tmp.path() / "run_b" / "scores.csv")).size() - 1);
        for (const auto& row : merged) CHECK(row["detected"] == false);
    }
    SECTION("a malformed report exits 2 and names the file") {
        fs::create_directories(tmp.path() / "run_c");
        fs::copy_file(tmp.path() / "run_b" / "scores.csv", tmp.path() / "run_c" / "scores.csv");
        write_file(tmp.path() / "run_c" / "report_oops.json", "{ not json");
        const CliResult r = run_cli(tmp, "report " + (tmp.path() / "run_c").string() + " -o " +
                                             tmp.file("bad.csv").string());
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("report_oops.json") != std::string::npos);
    }
    SECTION("missing inputs exit 3") {
        const CliResult r = run_cli(tmp, "report " + (tmp.path() / "missing_dir").string() +
                                             " -o " + tmp.file("x.csv").string());
        CHECK(r.exit_code == 3);
    }
}
