#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "semint/scenario.hpp"

using namespace semint;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path p = fs::temp_directory_path() /
                 ("semint-test-" + tag + "-" + std::to_string(++counter));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

const char* kPainting = R"({"seed": 3, "counts": {"1": 10, "2": 2, "3": 88}})";

std::string with_painting(const std::string& tmpl) {
    std::string out = tmpl;
    const std::string token = "$P";
    auto pos = out.find(token);
    REQUIRE(pos != std::string::npos);
    out.replace(pos, token.size(), kPainting);
    return out;
}

const char* kSynthetic = R"({
  "type": "synthetic",
  "labels": ["A", "B"],
  "cells": [
    {"id": "a0", "label": "A", "mass": "1/4"},
    {"id": "a1", "label": "A", "mass": "1/4"},
    {"id": "b0", "label": "B", "mass": "1/4"},
    {"id": "b1", "label": "B", "mass": "1/4"}
  ]
})";

std::string with_synthetic(const std::string& tmpl) {
    std::string out = tmpl;
    const std::string token = "$S";
    auto pos = out.find(token);
    REQUIRE(pos != std::string::npos);
    out.replace(pos, token.size(), kSynthetic);
    return out;
}

}  // namespace

TEST_CASE("every scenario kind validates from a minimal config") {
    const std::vector<std::string> configs = {
        with_painting(R"({"kind": "puzzle-coords", "seed": 1, "painting": $P})"),
        with_painting(
            R"({"kind": "puzzle-borders", "seed": 1, "painting": $P, "replicas": 2})"),
        with_painting(
            R"({"kind": "probability-game", "seed": 1, "painting": $P, "draws": 500,
                "checkpoints": [100, 500]})"),
        with_synthetic(
            R"({"kind": "semint-run", "seed": 1, "phenomenon": $S,
                "integration": {"window": 100}})"),
        with_synthetic(
            R"({"kind": "lln-check", "seed": 1, "phenomenon": $S, "label": "A",
                "runs": 50, "trials": [50, 200]})"),
        with_synthetic(
            R"({"kind": "factualized-lln", "seed": 1, "phenomenon": $S, "label": "A",
                "runs": 40, "trials": 300, "integration": {"window": 100}})"),
        with_synthetic(
            R"({"kind": "laplace-oscillation", "seed": 1, "phenomenon": $S,
                "trials_per_round": 400})"),
        with_synthetic(
            R"({"kind": "compare", "seed": 1, "phenomenon": $S, "schedule": [50, 400],
                "integration": {"window": 100}})"),
        R"({"kind": "pre-tree", "seed": 1, "trunk": "t",
            "channels": [{"id": "c1", "universe": ["a", "b"],
                          "weights": ["1/2", "1/2"]}],
            "schedule": [50, 200], "threshold": 0.05})",
    };
    for (const auto& cfg : configs) {
        CAPTURE(cfg);
        ValidationResult v = validate_scenario_text(cfg);
        CHECK(v.ok);
        CHECK(v.diagnostics.empty());
    }
}

TEST_CASE("validation pinpoints the offending field") {
    ValidationResult missing_seed = validate_scenario_text(
        with_synthetic(R"({"kind": "semint-run", "phenomenon": $S})"));
    REQUIRE(!missing_seed.ok);
    REQUIRE(missing_seed.diagnostics.size() == 1);
    CHECK(missing_seed.diagnostics[0].find("scenario") != std::string::npos);
    CHECK(missing_seed.diagnostics[0].find("seed") != std::string::npos);

    ValidationResult typo = validate_scenario_text(
        with_painting(R"({"kind": "puzzle-coords", "seed": 1, "painting": $P,
                          "replica": 2})"));
    REQUIRE(!typo.ok);
    CHECK(typo.diagnostics[0].find("unknown field 'replica'") != std::string::npos);

    ValidationResult nested = validate_scenario_text(
        with_synthetic(R"({"kind": "semint-run", "seed": 1, "phenomenon": $S,
                           "integration": {"inflation": 1.2}})"));
    REQUIRE(!nested.ok);
    CHECK(nested.diagnostics[0].find("scenario.integration.inflation") !=
          std::string::npos);

    ValidationResult cell = validate_scenario_text(
        R"({"kind": "semint-run", "seed": 1,
            "phenomenon": {"type": "synthetic", "labels": ["A"],
                           "cells": [{"id": "x", "label": "A", "mass": "nope"}]}})");
    REQUIRE(!cell.ok);
    CHECK(cell.diagnostics[0].find("scenario.phenomenon.cells[0].mass") !=
          std::string::npos);

    ValidationResult garbage = validate_scenario_text("{not json");
    REQUIRE(!garbage.ok);
    CHECK(garbage.diagnostics[0].find("invalid JSON") != std::string::npos);

    ValidationResult unknown_kind =
        validate_scenario_text(R"({"kind": "mystery", "seed": 1})");
    REQUIRE(!unknown_kind.ok);
    CHECK(unknown_kind.diagnostics[0].find("unknown kind 'mystery'") != std::string::npos);
}

TEST_CASE("a probability game run writes report, trace, and manifest") {
    fs::path dir = fresh_dir("game");
    std::string cfg = with_painting(
        R"({"kind": "probability-game", "seed": 5, "painting": $P, "draws": 400,
            "checkpoints": [100, 400]})");
    RunOutcome out = run_scenario_text(cfg, dir.string());
    REQUIRE(out.exit_code == kExitOk);
    CHECK(out.error.empty());
    CHECK(out.outputs == std::vector<std::string>{"report.json", "trace.csv",
                                                  "manifest.json"});
    for (const auto& name : out.outputs) CHECK(fs::exists(dir / name));

    nlohmann::json report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report.at("kind") == "probability-game");
    std::uint64_t total = 0;
    for (const auto& item : report.at("counts").items()) {
        total += item.value().get<std::uint64_t>();
    }
    CHECK(total == 400);

    nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("tool_version") == kToolVersion);
    CHECK(manifest.at("kind") == "probability-game");
    CHECK(manifest.at("seed") == 5);
    CHECK(manifest.at("scenario_digest").get<std::string>().size() == 16);
    CHECK(manifest.at("outputs") == nlohmann::json({"report.json", "trace.csv"}));
    CHECK(manifest.contains("started_at"));
    CHECK(manifest.contains("finished_at"));
}

TEST_CASE("reports are byte-identical across reruns; only timestamps may move") {
    std::string cfg = with_synthetic(
        R"({"kind": "semint-run", "seed": 9, "phenomenon": $S,
            "integration": {"window": 100, "post_saturation_trials": 50}})");
    fs::path d1 = fresh_dir("rerun");
    fs::path d2 = fresh_dir("rerun");
    REQUIRE(run_scenario_text(cfg, d1.string()).exit_code == kExitOk);
    REQUIRE(run_scenario_text(cfg, d2.string()).exit_code == kExitOk);

    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "trace.csv") == slurp(d2 / "trace.csv"));

    nlohmann::json m1 = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    nlohmann::json m2 = nlohmann::json::parse(slurp(d2 / "manifest.json"));
    m1.erase("started_at");
    m1.erase("finished_at");
    m2.erase("started_at");
    m2.erase("finished_at");
    CHECK(m1 == m2);
}

TEST_CASE("the seed is mandatory unless forced from outside") {
    std::string cfg = with_synthetic(
        R"({"kind": "laplace-oscillation", "phenomenon": $S, "trials_per_round": 300})");
    fs::path dir = fresh_dir("seedless");
    RunOutcome bare = run_scenario_text(cfg, dir.string());
    CHECK(bare.exit_code == kExitValidation);
    CHECK(bare.error.find("seed") != std::string::npos);

    RunOutcome forced = run_scenario_text(cfg, dir.string(), 7);
    CHECK(forced.exit_code == kExitOk);
}

TEST_CASE("a forced seed overrides the configured one") {
    std::string with_seed_1 = with_synthetic(
        R"({"kind": "laplace-oscillation", "seed": 1, "phenomenon": $S,
            "trials_per_round": 300})");
    std::string with_seed_2 = with_synthetic(
        R"({"kind": "laplace-oscillation", "seed": 2, "phenomenon": $S,
            "trials_per_round": 300})");
    fs::path d1 = fresh_dir("override");
    fs::path d2 = fresh_dir("override");
    REQUIRE(run_scenario_text(with_seed_1, d1.string()).exit_code == kExitOk);
    REQUIRE(run_scenario_text(with_seed_2, d2.string(), 1).exit_code == kExitOk);
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
}

TEST_CASE("an unsaturated reference stops a factualized run as a breach") {
    std::string cfg = with_synthetic(
        R"({"kind": "factualized-lln", "seed": 4, "phenomenon": $S, "label": "A",
            "runs": 20, "trials": 100,
            "integration": {"window": 100, "max_trials": 3}})");
    fs::path dir = fresh_dir("breach");
    RunOutcome out = run_scenario_text(cfg, dir.string());
    CHECK(out.exit_code == kExitInvariant);
    CHECK(out.error.find("saturated") != std::string::npos);
    CHECK(!fs::exists(dir / "report.json"));
}

TEST_CASE("file entry points surface missing paths as validation errors") {
    RunOutcome run = run_scenario_file("/nonexistent/scenario.json", ".");
    CHECK(run.exit_code == kExitValidation);
    CHECK(!run.error.empty());
    ValidationResult v = validate_scenario_file("/nonexistent/scenario.json");
    CHECK(!v.ok);
}

TEST_CASE("convergence plots read game checkpoints and pre-tree branches") {
    fs::path dir = fresh_dir("plotconv");
    std::string cfg = with_painting(
        R"({"kind": "probability-game", "seed": 5, "painting": $P, "draws": 200,
            "checkpoints": [100, 200]})");
    REQUIRE(run_scenario_text(cfg, dir.string()).exit_code == kExitOk);
    PlotResult p = plot_report_file((dir / "report.json").string(), "convergence");
    REQUIRE(p.exit_code == kExitOk);
    std::istringstream lines(p.csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "N,label,freq");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 2 * 3);  // two checkpoints, three colours

    fs::path tdir = fresh_dir("plottree");
    std::string tree =
        R"({"kind": "pre-tree", "seed": 2, "trunk": "t",
            "channels": [{"id": "c1", "universe": ["a", "b"],
                          "weights": ["1/2", "1/2"]}],
            "schedule": [50, 100]})";
    REQUIRE(run_scenario_text(tree, tdir.string()).exit_code == kExitOk);
    PlotResult q = plot_report_file((tdir / "report.json").string(), "convergence");
    REQUIRE(q.exit_code == kExitOk);
    CHECK(q.csv.find("c1:a") != std::string::npos);
    CHECK(q.csv.find("c1:b") != std::string::npos);
}

TEST_CASE("saturation plots carry one row per trial") {
    fs::path dir = fresh_dir("plotsat");
    std::string cfg = with_synthetic(
        R"({"kind": "semint-run", "seed": 9, "phenomenon": $S,
            "integration": {"window": 100}})");
    REQUIRE(run_scenario_text(cfg, dir.string()).exit_code == kExitOk);
    nlohmann::json report = nlohmann::json::parse(slurp(dir / "report.json"));
    PlotResult p = plot_report_file((dir / "report.json").string(), "saturation");
    REQUIRE(p.exit_code == kExitOk);
    std::istringstream lines(p.csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "trial,replica,cells_on_Y1");
    std::uint64_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == report.at("trials").get<std::uint64_t>());
}

TEST_CASE("compare plots reproduce the comparison csv byte for byte") {
    fs::path dir = fresh_dir("plotcmp");
    std::string cfg = with_synthetic(
        R"({"kind": "compare", "seed": 3, "phenomenon": $S, "schedule": [50, 300],
            "integration": {"window": 100}})");
    REQUIRE(run_scenario_text(cfg, dir.string()).exit_code == kExitOk);
    PlotResult p = plot_report_file((dir / "report.json").string(), "compare");
    REQUIRE(p.exit_code == kExitOk);
    CHECK(p.csv == slurp(dir / "compare.csv"));
}

TEST_CASE("plots reject mismatched kinds and unknown plot names") {
    fs::path dir = fresh_dir("plotbad");
    std::string cfg = with_painting(R"({"kind": "puzzle-coords", "seed": 1,
                                        "painting": $P})");
    REQUIRE(run_scenario_text(cfg, dir.string()).exit_code == kExitOk);
    const std::string report = (dir / "report.json").string();

    PlotResult conv = plot_report_file(report, "convergence");
    CHECK(conv.exit_code == kExitValidation);
    CHECK(conv.error.find("puzzle-coords") != std::string::npos);

    PlotResult sat = plot_report_file(report, "saturation");
    CHECK(sat.exit_code == kExitValidation);

    PlotResult unknown = plot_report_file(report, "histogram");
    CHECK(unknown.exit_code == kExitValidation);
    CHECK(unknown.error.find("histogram") != std::string::npos);

    PlotResult missing = plot_report_file("/nonexistent/report.json", "compare");
    CHECK(missing.exit_code == kExitValidation);

    PlotResult not_json = plot_report_text("{oops", "compare");
    CHECK(not_json.exit_code == kExitValidation);
}
