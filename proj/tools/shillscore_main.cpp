#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shillscore/shillscore.hpp"

namespace fs = std::filesystem;
using namespace shillscore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;  // validation / config / parse problems
constexpr int kExitIo = 3;      // filesystem problems, missing inputs

struct Options {
    bool quiet = false;
    std::string score_config_path;
    std::optional<std::uint64_t> seed_override;
};

void info(const Options& opt, const std::string& msg) {
    if (!opt.quiet) std::cout << msg << "\n";
}

ScoreConfig score_config_for(const Options& opt) {
    if (opt.score_config_path.empty()) return ScoreConfig{};
    if (!fs::exists(opt.score_config_path))
        throw IoError("score config not found: " + opt.score_config_path);
    return load_score_config(opt.score_config_path);
}

std::int64_t now_epoch() { return static_cast<std::int64_t>(std::time(nullptr)); }

int cmd_generate(const Options& opt, const std::string& config_path, const std::string& out_path) {
    if (!fs::exists(config_path)) throw IoError("config not found: " + config_path);
    RunManifest manifest;
    manifest.started_at = now_epoch();

    SimConfig cfg = load_sim_config(config_path);
    if (opt.seed_override) cfg.seed = *opt.seed_override;
    const std::string config_bytes = sim_config_to_json_string(cfg);

    const Dataset ds = generate_dataset(cfg);
    const std::string bytes = format_for_path(out_path) == Format::json
                                  ? dataset_to_json_string(ds)
                                  : dataset_to_csv_string(ds);
    write_file(out_path, bytes);

    manifest.config_digest = fnv1a64_hex(config_bytes);
    manifest.seed = cfg.seed;
    manifest.inputs = {config_path};
    manifest.outputs = {{out_path, fnv1a64_hex(bytes)}};
    manifest.config = sim_config_to_json(cfg);
    manifest.finished_at = now_epoch();
    const std::string manifest_path = out_path + ".manifest.json";
    write_file(manifest_path, manifest_to_json_string(manifest));

    info(opt, "wrote " + out_path + " (" + std::to_string(ds.auctions.size()) + " auctions, " +
                  std::to_string(ds.bidders.size()) + " bidders, " +
                  std::to_string(ds.sellers.size()) + " sellers)");
    info(opt, "wrote " + manifest_path);
    return kExitOk;
}

int cmd_score(const Options& opt, const std::string& dataset_path, const std::string& out_csv) {
    if (!fs::exists(dataset_path)) throw IoError("dataset not found: " + dataset_path);
    const Dataset ds = load_dataset(dataset_path);
    const ScoreConfig cfg = score_config_for(opt);
    write_file(out_csv, write_scores_csv(ds, cfg));
    info(opt, "wrote " + out_csv);
    return kExitOk;
}

int cmd_detect(const Options& opt, const std::string& dataset_path, const std::string& out_dir,
               bool dot) {
    if (!fs::exists(dataset_path)) throw IoError("dataset not found: " + dataset_path);
    RunManifest manifest;
    manifest.started_at = now_epoch();

    const Dataset ds = load_dataset(dataset_path);
    const ScoreConfig cfg = score_config_for(opt);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    const ParticipationMatrix pm = participation_matrix(ds);
    std::vector<CollusionReport> reports;
    reports.reserve(ds.bidders.size());
    for (const BidderId& b : ds.bidders)
        reports.push_back(run_seller_collusion(ds, pm, b, cfg));

    auto emit = [&](const fs::path& p, const std::string& bytes) {
        write_file(p, bytes);
        manifest.outputs.emplace_back(p.string(), fnv1a64_hex(bytes));
    };

    emit(fs::path(out_dir) / "scores.csv", write_scores_csv(ds, cfg));
    emit(fs::path(out_dir) / "summary.csv", write_summary_csv(reports));
    for (const CollusionReport& rep : reports) {
        emit(fs::path(out_dir) / ("report_" + sanitize_for_filename(rep.bidder) + ".json"),
             collusion_report_to_json_string(rep));
    }
    if (dot) {
        const fs::path dot_dir = fs::path(out_dir) / "dot";
        fs::create_directories(dot_dir, ec);
        if (ec) throw IoError("cannot create " + dot_dir.string() + ": " + ec.message());
        for (const CollusionReport& rep : reports) {
            for (const StageDot& stage : report_stage_dots(rep))
                emit(dot_dir / stage.filename, stage.content);
        }
    }

    const std::string cfg_bytes = score_config_to_json(cfg).dump(2) + "\n";
    manifest.config_digest = fnv1a64_hex(cfg_bytes);
    manifest.config = score_config_to_json(cfg);
    manifest.inputs = {dataset_path};
    manifest.finished_at = now_epoch();
    write_file(fs::path(out_dir) / "manifest.json", manifest_to_json_string(manifest));

    int flagged = 0;
    for (const CollusionReport& rep : reports)
        flagged += rep.verdict == Verdict::collusion_detected ? 1 : 0;
    info(opt, "wrote " + out_dir + " (" + std::to_string(reports.size()) + " bidders, " +
                  std::to_string(flagged) + " flagged)");
    return kExitOk;
}

// Joins the per-run score tables, overriding the adjusted column with the
// pipeline value wherever the run's reports singled the seller out.
int cmd_report(const Options& opt, const std::vector<std::string>& run_dirs,
               const std::string& out_path, const std::string& format) {
    struct Row {
        std::string run, bidder, seller;
        std::string shill_score, mss, adjusted;
        bool detected = false;
    };
    std::vector<Row> rows;
    for (const std::string& dir : run_dirs) {
        const fs::path scores_path = fs::path(dir) / "scores.csv";
        if (!fs::exists(scores_path)) throw IoError("missing " + scores_path.string());
        const std::string run = fs::path(dir).filename().string();

        std::map<std::pair<std::string, std::string>, std::pair<std::string, bool>> overrides;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("report_", 0) != 0 || entry.path().extension() != ".json") continue;
            const StoredReport rep =
                stored_report_from_json_string(read_file(entry.path()), entry.path().string());
            for (const StoredFinding& f : rep.final)
                overrides[{rep.bidder, f.seller}] = {fmt4(f.adjusted_score), true};
        }

        const std::string text = read_file(scores_path);
        std::istringstream lines(text);
        std::string line;
        bool header = true;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (line.empty()) continue;
            if (header) {
                if (line != kScoresCsvHeader)
                    throw ParseError(scores_path.string() + ": unexpected header");
                header = false;
                continue;
            }
            const auto f = detail::csv_split(line, scores_path.string() + " line " +
                                                       std::to_string(lineno));
            if (f.size() != 11)
                throw ParseError(scores_path.string() + " line " + std::to_string(lineno) +
                                 ": expected 11 fields");
            Row row{run, f[0], f[1], f[8], f[9], f[10], false};
            auto it = overrides.find({row.bidder, row.seller});
            if (it != overrides.end()) {
                row.adjusted = it->second.first;
                row.detected = it->second.second;
            }
            rows.push_back(std::move(row));
        }
    }

    if (format == "json") {
        nlohmann::json out = nlohmann::json::array();
        for (const Row& r : rows) {
            out.push_back({{"run", r.run},
                           {"bidder_id", r.bidder},
                           {"seller_id", r.seller},
                           {"shill_score", std::stod(r.shill_score)},
                           {"mss", std::stod(r.mss)},
                           {"adjusted_score", std::stod(r.adjusted)},
                           {"detected", r.detected}});
        }
        write_file(out_path, out.dump(2) + "\n");
    } else {
        std::string out = "run,bidder_id,seller_id,shill_score,mss,adjusted_score,detected\n";
        for (const Row& r : rows) {
            out += detail::csv_quote(r.run) + "," + detail::csv_quote(r.bidder) + "," +
                   detail::csv_quote(r.seller) + "," + r.shill_score + "," + r.mss + "," +
                   r.adjusted + "," + (r.detected ? "1" : "0") + "\n";
        }
        write_file(out_path, out);
    }
    info(opt, "wrote " + out_path + " (" + std::to_string(rows.size()) + " rows)");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shill bidding detection toolkit: simulate auction datasets, score "
                 "bidder/seller pairs and flag colluding seller groups."};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_flag("--quiet", opt.quiet, "Suppress informational output");
    app.add_option("--config", opt.score_config_path,
                   "Score config JSON (weights, thresholds) for score/detect");
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_value, "Override the generator seed from the config");

    std::string gen_config, gen_out;
    CLI::App* generate = app.add_subcommand("generate", "Simulate a synthetic auction dataset");
    generate->add_option("config", gen_config, "SimConfig JSON path")->required();
    generate->add_option("out", gen_out, "Output dataset path (.json or .csv)")->required();

    std::string score_dataset, score_out;
    CLI::App* score = app.add_subcommand("score", "Score every (bidder, seller) pair");
    score->add_option("dataset", score_dataset, "Dataset path (.json or .csv)")->required();
    score->add_option("out", score_out, "Output CSV path")->required();

    std::string detect_dataset, detect_out;
    bool detect_dot = false;
    CLI::App* detect = app.add_subcommand("detect", "Run the seller collusion pipeline");
    detect->add_option("dataset", detect_dataset, "Dataset path (.json or .csv)")->required();
    detect->add_option("out_dir", detect_out, "Output directory")->required();
    detect->add_flag("--dot", detect_dot, "Also write per-stage DOT graphs");

    std::vector<std::string> report_dirs;
    std::string report_out, report_format = "csv";
    CLI::App* report = app.add_subcommand("report", "Merge detect runs into one table");
    report->add_option("runs", report_dirs, "One or more detect output directories")->required();
    report->add_option("-o,--out", report_out, "Output path")->required();
    report->add_option("--format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (seed_opt->count() > 0) opt.seed_override = seed_value;

    try {
        if (generate->parsed()) return cmd_generate(opt, gen_config, gen_out);
        if (score->parsed()) return cmd_score(opt, score_dataset, score_out);
        if (detect->parsed()) return cmd_detect(opt, detect_dataset, detect_out, detect_dot);
        if (report->parsed()) return cmd_report(opt, report_dirs, report_out, report_format);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
