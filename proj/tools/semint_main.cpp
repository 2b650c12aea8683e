#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "semint/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semantic integration toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(semint::kToolVersion));

    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed_value = 0;
    int jobs_value = 1;

    auto* run = app.add_subcommand("run", "run a scenario and write report, trace, manifest");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    run->add_option("--seed", seed_value, "override the scenario seed");
    run->add_option("--jobs", jobs_value, "worker threads for Monte-Carlo kinds")
        ->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "check a scenario configuration");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    std::string report_path;
    std::string plot_kind;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "extract plot data from a report as CSV");
    plot->add_option("report", report_path, "report JSON file")->required();
    plot->add_option("--kind", plot_kind, "convergence, saturation, or compare")->required();
    plot->add_option("--out", plot_out, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return semint::kExitValidation;
    }

    if (run->parsed()) {
        std::optional<std::uint64_t> seed;
        if (run->count("--seed")) seed = seed_value;
        std::optional<int> jobs;
        if (run->count("--jobs")) jobs = jobs_value;
        auto outcome = semint::run_scenario_file(scenario_path, out_dir, seed, jobs);
        if (outcome.exit_code != semint::kExitOk) {
            std::fprintf(stderr, "error: %s\n", outcome.error.c_str());
            return outcome.exit_code;
        }
        for (const auto& name : outcome.outputs) {
            std::printf("%s/%s\n", out_dir.c_str(), name.c_str());
        }
        return semint::kExitOk;
    }

    if (validate->parsed()) {
        auto result = semint::validate_scenario_file(scenario_path);
        if (result.ok) {
            std::printf("ok\n");
            return semint::kExitOk;
        }
        for (const auto& d : result.diagnostics) std::fprintf(stderr, "%s\n", d.c_str());
        return semint::kExitValidation;
    }

    auto result = semint::plot_report_file(report_path, plot_kind);
    if (result.exit_code != semint::kExitOk) {
        std::fprintf(stderr, "error: %s\n", result.error.c_str());
        return result.exit_code;
    }
    if (plot_out.empty()) {
        std::fputs(result.csv.c_str(), stdout);
    } else {
        std::ofstream f(plot_out, std::ios::binary);
        f << result.csv;
        if (!f) {
            std::fprintf(stderr, "error: failed writing %s\n", plot_out.c_str());
            return semint::kExitInvariant;
        }
    }
    return semint::kExitOk;
}
