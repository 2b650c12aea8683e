#include "semint/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "semint/analysis.hpp"
#include "semint/integration.hpp"
#include "semint/law.hpp"
#include "semint/painting.hpp"
#include "semint/phenomenon.hpp"
#include "semint/pre_tree.hpp"
#include "semint/puzzle.hpp"
#include "semint/rational.hpp"
#include "semint/rng.hpp"

namespace semint {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
    }
}

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return *it;
}

const json* opt(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected a boolean");
    return j.get<bool>();
}

std::uint64_t as_u64(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    fail(where, "expected a nonnegative integer");
}

std::uint64_t as_u64_min(const json& j, std::uint64_t min, const std::string& where) {
    std::uint64_t v = as_u64(j, where);
    if (v < min) fail(where, "expected an integer >= " + std::to_string(min));
    return v;
}

int as_int_min(const json& j, int min, const std::string& where) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected an integer");
    auto v = j.get<std::int64_t>();
    if (v < min || v > 1000000000) {
        fail(where, "expected an integer >= " + std::to_string(min));
    }
    return static_cast<int>(v);
}

double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

Rational as_rational(const json& j, const std::string& where) {
    if (!j.is_string() && !j.is_number()) {
        fail(where, "expected a rational (\"a/b\", decimal, or integer)");
    }
    try {
        return parse_rational(j.is_string() ? j.get<std::string>() : j.dump());
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

std::vector<std::string> as_string_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of strings");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<Rational> as_weights(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of weights");
    std::vector<Rational> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_rational(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::uint64_t> as_schedule(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        fail(where, "expected a non-empty array of trial counts");
    }
    std::vector<std::uint64_t> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        std::uint64_t v = as_u64_min(j[i], 1, at);
        if (!out.empty() && v <= out.back()) fail(at, "trial counts must be strictly increasing");
        out.push_back(v);
    }
    return out;
}

json rational_json(const Rational& q) {
    return json{{"num", numerator_of(q).str()}, {"den", denominator_of(q).str()}};
}

json law_json(const ProbabilityLaw& law) {
    json arr = json::array();
    for (const auto& [label, mass] : law.entries) {
        arr.push_back({{"label", label},
                       {"num", numerator_of(mass).str()},
                       {"den", denominator_of(mass).str()}});
    }
    return arr;
}

Painting painting_from_config(const json& j, const std::string& where) {
    check_keys(j, {"seed", "counts"}, where);
    std::uint64_t seed = as_u64(need(j, "seed", where), where + ".seed");
    const json& counts = need(j, "counts", where);
    if (!counts.is_object() || counts.empty()) {
        fail(where + ".counts", "expected an object mapping colour labels to counts");
    }
    std::vector<std::pair<std::string, int>> cc;
    for (const auto& item : counts.items()) {
        cc.emplace_back(item.key(),
                        as_int_min(item.value(), 1, where + ".counts." + item.key()));
    }
    try {
        return generate_painting(seed, cc);
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

std::unique_ptr<RandomPhenomenon> phenomenon_from_config(const json& j,
                                                         const std::string& where) {
    std::string type = as_string(need(j, "type", where), where + ".type");
    if (type == "dice") {
        check_keys(j,
                   {"type", "face_weights", "zone", "position_unit", "orientation_unit",
                    "right_face_weights"},
                   where);
        DiceConfig cfg;
        cfg.face_weights = as_weights(need(j, "face_weights", where), where + ".face_weights");
        if (const json* zone = opt(j, "zone")) {
            const std::string zw = where + ".zone";
            check_keys(*zone, {"x", "y"}, zw);
            auto span = [&](const char* axis, double& lo, double& hi) {
                if (const json* s = opt(*zone, axis)) {
                    const std::string sw = zw + "." + axis;
                    if (!s->is_array() || s->size() != 2) fail(sw, "expected [low, high]");
                    lo = as_double((*s)[0], sw + "[0]");
                    hi = as_double((*s)[1], sw + "[1]");
                }
            };
            span("x", cfg.zone_x0, cfg.zone_x1);
            span("y", cfg.zone_y0, cfg.zone_y1);
        }
        if (const json* u = opt(j, "position_unit")) {
            cfg.position_unit = as_double(*u, where + ".position_unit");
        }
        if (const json* u = opt(j, "orientation_unit")) {
            cfg.orientation_unit = as_double(*u, where + ".orientation_unit");
        }
        if (const json* w = opt(j, "right_face_weights")) {
            cfg.right_face_weights = as_weights(*w, where + ".right_face_weights");
        }
        try {
            return std::make_unique<DicePhenomenon>(std::move(cfg));
        } catch (const std::exception& e) {
            fail(where, e.what());
        }
    }
    if (type == "urn") {
        check_keys(j, {"type", "painting"}, where);
        Painting p = painting_from_config(need(j, "painting", where), where + ".painting");
        return std::make_unique<UrnPhenomenon>(std::move(p));
    }
    if (type == "synthetic") {
        check_keys(j, {"type", "labels", "cells", "stages", "label_axis", "cell_axis"}, where);
        SyntheticConfig cfg;
        cfg.labels = as_string_list(need(j, "labels", where), where + ".labels");
        const json& cells = need(j, "cells", where);
        if (!cells.is_array() || cells.empty()) {
            fail(where + ".cells", "expected a non-empty array of cells");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string cw = where + ".cells[" + std::to_string(i) + "]";
            check_keys(cells[i], {"id", "label", "mass", "path"}, cw);
            SyntheticCell cell;
            cell.id = as_string(need(cells[i], "id", cw), cw + ".id");
            cell.label = as_string(need(cells[i], "label", cw), cw + ".label");
            cell.mass = as_rational(need(cells[i], "mass", cw), cw + ".mass");
            if (const json* path = opt(cells[i], "path")) {
                cell.path = as_string_list(*path, cw + ".path");
            }
            cfg.cells.push_back(std::move(cell));
        }
        if (const json* s = opt(j, "stages")) cfg.stages = as_int_min(*s, 0, where + ".stages");
        if (const json* a = opt(j, "label_axis")) {
            cfg.label_axis_id = as_string(*a, where + ".label_axis");
        }
        if (const json* a = opt(j, "cell_axis")) {
            cfg.cell_axis_id = as_string(*a, where + ".cell_axis");
        }
        try {
            return std::make_unique<SyntheticPhenomenon>(std::move(cfg));
        } catch (const std::exception& e) {
            fail(where, e.what());
        }
    }
    fail(where + ".type",
         "unknown phenomenon type '" + type + "' (expected dice, urn, or synthetic)");
}

SemintConfig semint_config_from(const json& parent, const std::string& where) {
    SemintConfig cfg;
    const json* j = opt(parent, "integration");
    if (!j) return cfg;
    check_keys(*j,
               {"inflation", "window", "max_trials", "post_saturation_trials",
                "stop_at_replica_boundary"},
               where);
    if (const json* v = opt(*j, "inflation")) {
        cfg.inflation = as_double(*v, where + ".inflation");
        if (cfg.inflation < 1.5) fail(where + ".inflation", "expected at least 1.5");
    }
    if (const json* v = opt(*j, "window")) cfg.window = as_u64(*v, where + ".window");
    if (const json* v = opt(*j, "max_trials")) {
        cfg.max_trials = as_u64_min(*v, 1, where + ".max_trials");
    }
    if (const json* v = opt(*j, "post_saturation_trials")) {
        cfg.post_saturation_trials = as_u64(*v, where + ".post_saturation_trials");
    }
    if (const json* v = opt(*j, "stop_at_replica_boundary")) {
        cfg.stop_at_replica_boundary = as_bool(*v, where + ".stop_at_replica_boundary");
    }
    return cfg;
}

OscillationConfig oscillation_config_from(const json& j, const std::string& where) {
    OscillationConfig cfg;
    if (const json* v = opt(j, "trials_per_round")) {
        cfg.trials_per_round = as_u64_min(*v, 1, where + ".trials_per_round");
    }
    if (const json* v = opt(j, "level")) {
        cfg.level = as_double(*v, where + ".level");
        if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
            fail(where + ".level", "expected a level strictly between 0 and 1");
        }
    }
    if (const json* v = opt(j, "max_rounds")) {
        cfg.max_rounds = as_int_min(*v, 0, where + ".max_rounds");
    }
    return cfg;
}

struct Artifacts {
    json report;
    std::map<std::string, std::string> extra_files;  // file name -> content
};

Artifacts exec_puzzle_coords(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "painting"}, "scenario");
    Painting p = painting_from_config(need(s, "painting", "scenario"), "scenario.painting");
    if (dry) return {};
    ReconstructionReport rep = reconstruct_by_coordinates(p, seed);
    Artifacts a;
    a.report = json{{"kind", "puzzle-coords"},
                    {"extractions", rep.extractions},
                    {"misplacement_attempts", rep.misplacement_attempts},
                    {"replicas", rep.replicas},
                    {"complete", rep.complete},
                    {"grids_match_source", rep.grids_match_source}};
    return a;
}

Artifacts exec_puzzle_borders(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "painting", "replicas"}, "scenario");
    Painting p = painting_from_config(need(s, "painting", "scenario"), "scenario.painting");
    std::uint32_t replicas = 1;
    if (const json* v = opt(s, "replicas")) {
        replicas = static_cast<std::uint32_t>(as_u64_min(*v, 1, "scenario.replicas"));
    }
    if (dry) return {};
    ReconstructionReport rep = reconstruct_by_borders(p, replicas, seed);
    Artifacts a;
    a.report = json{{"kind", "puzzle-borders"},
                    {"extractions", rep.extractions},
                    {"misplacement_attempts", rep.misplacement_attempts},
                    {"replicas", rep.replicas},
                    {"complete", rep.complete},
                    {"grids_match_source", rep.grids_match_source}};
    return a;
}

Artifacts exec_probability_game(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "painting", "draws", "checkpoints"}, "scenario");
    Painting p = painting_from_config(need(s, "painting", "scenario"), "scenario.painting");
    std::uint64_t draws = as_u64_min(need(s, "draws", "scenario"), 1, "scenario.draws");
    std::vector<std::uint64_t> checkpoints;
    if (const json* v = opt(s, "checkpoints")) {
        checkpoints = as_schedule(*v, "scenario.checkpoints");
        if (checkpoints.back() > draws) {
            fail("scenario.checkpoints", "checkpoints must not exceed the draw count");
        }
    } else {
        for (std::uint64_t n : {std::uint64_t(1000), std::uint64_t(10000),
                                std::uint64_t(100000)}) {
            if (n < draws) checkpoints.push_back(n);
        }
    }
    if (checkpoints.empty() || checkpoints.back() != draws) checkpoints.push_back(draws);
    if (dry) return {};

    TrialTrace trace = probability_game(p, draws, seed);
    ProbabilityLaw freq = trace.frequency_law();
    ProbabilityLaw factual = factual_law(p);

    json counts = json::object();
    std::vector<std::uint64_t> per_label = trace.counts();
    for (std::size_t i = 0; i < trace.universe.size(); ++i) {
        counts[trace.universe[i]] = per_label[i];
    }

    json convergence = json::array();
    for (std::uint64_t n : checkpoints) {
        ProbabilityLaw at_n = trace.frequency_law(n);
        for (const auto& [label, mass] : at_n.entries) {
            convergence.push_back({{"n", n},
                                   {"label", label},
                                   {"num", numerator_of(mass).str()},
                                   {"den", denominator_of(mass).str()}});
        }
    }

    Artifacts a;
    a.report = json{{"kind", "probability-game"},
                    {"draws", draws},
                    {"counts", counts},
                    {"frequencies", law_json(freq)},
                    {"factual_law", law_json(factual)},
                    {"l1_to_factual", to_double(l1_distance(freq, factual))},
                    {"convergence", convergence}};
    a.extra_files["trace.csv"] = trace.to_csv();
    return a;
}

Artifacts exec_semint_run(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "phenomenon", "integration"}, "scenario");
    auto ph = phenomenon_from_config(need(s, "phenomenon", "scenario"), "scenario.phenomenon");
    SemintConfig cfg = semint_config_from(s, "scenario.integration");
    if (dry) return {};
    SemintResult result = run_semint(*ph, cfg, seed);
    Artifacts a;
    a.report = json::parse(semint_report_json(result));
    a.extra_files["trace.csv"] = result.trace.to_csv();
    return a;
}

Artifacts exec_lln_check(const json& s, bool dry, std::uint64_t seed,
                         std::optional<int> jobs_override) {
    check_keys(s, {"kind", "seed", "phenomenon", "label", "epsilon", "delta", "runs",
                   "trials", "jobs"},
               "scenario");
    auto ph = phenomenon_from_config(need(s, "phenomenon", "scenario"), "scenario.phenomenon");
    LLNConfig cfg;
    cfg.label = as_string(need(s, "label", "scenario"), "scenario.label");
    if (const json* v = opt(s, "epsilon")) cfg.epsilon = as_rational(*v, "scenario.epsilon");
    if (const json* v = opt(s, "delta")) cfg.delta = as_rational(*v, "scenario.delta");
    if (cfg.epsilon <= 0) fail("scenario.epsilon", "expected a positive rational");
    if (cfg.delta <= 0 || cfg.delta >= 1) {
        fail("scenario.delta", "expected a rational strictly between 0 and 1");
    }
    if (const json* v = opt(s, "runs")) cfg.runs = as_u64_min(*v, 1, "scenario.runs");
    const json& trials = need(s, "trials", "scenario");
    if (trials.is_array()) {
        cfg.trial_schedule = as_schedule(trials, "scenario.trials");
    } else {
        cfg.trial_schedule = {as_u64_min(trials, 1, "scenario.trials")};
    }
    if (const json* v = opt(s, "jobs")) cfg.jobs = as_int_min(*v, 1, "scenario.jobs");
    if (jobs_override) cfg.jobs = *jobs_override;

    const ProbabilityLaw* truth = ph->ground_truth();
    if (!truth) fail("scenario.phenomenon", "phenomenon provides no reference law");
    if (!truth->has(cfg.label)) {
        fail("scenario.label", "label '" + cfg.label + "' is not in the reference law");
    }
    if (dry) return {};

    LLNReport rep = lln_check(*ph, cfg, *truth, seed);
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back({{"n", e.n},
                           {"runs_within", e.runs_within},
                           {"fraction", rational_json(e.fraction)},
                           {"pass", e.pass}});
    }
    Artifacts a;
    a.report = json{{"kind", "lln-check"},
                    {"label", rep.label},
                    {"epsilon", rational_json(rep.epsilon)},
                    {"delta", rational_json(rep.delta)},
                    {"bound", rational_json(rep.bound)},
                    {"reference_mass", rational_json(rep.reference_mass)},
                    {"chebyshev_bound", chebyshev_sample_bound(rep.epsilon, rep.delta)},
                    {"runs", cfg.runs},
                    {"entries", entries},
                    {"empirical_N0",
                     rep.empirical_n0 ? json(*rep.empirical_n0) : json(nullptr)},
                    {"fraction", rational_json(rep.fraction)},
                    {"pass", rep.pass}};
    return a;
}

Artifacts exec_factualized_lln(const json& s, bool dry, std::uint64_t seed,
                               std::optional<int> jobs_override) {
    check_keys(s, {"kind", "seed", "phenomenon", "integration", "label", "epsilon", "delta",
                   "runs", "trials", "jobs"},
               "scenario");
    auto ph = phenomenon_from_config(need(s, "phenomenon", "scenario"), "scenario.phenomenon");
    SemintConfig icfg = semint_config_from(s, "scenario.integration");
    FactualizedLLNConfig cfg;
    cfg.label = as_string(need(s, "label", "scenario"), "scenario.label");
    if (const json* v = opt(s, "epsilon")) cfg.epsilon = as_rational(*v, "scenario.epsilon");
    if (const json* v = opt(s, "delta")) cfg.delta = as_rational(*v, "scenario.delta");
    if (cfg.epsilon <= 0) fail("scenario.epsilon", "expected a positive rational");
    if (cfg.delta <= 0 || cfg.delta >= 1) {
        fail("scenario.delta", "expected a rational strictly between 0 and 1");
    }
    if (const json* v = opt(s, "runs")) cfg.runs = as_u64_min(*v, 1, "scenario.runs");
    if (const json* v = opt(s, "trials")) cfg.trials = as_u64_min(*v, 1, "scenario.trials");
    if (const json* v = opt(s, "jobs")) cfg.jobs = as_int_min(*v, 1, "scenario.jobs");
    if (jobs_override) cfg.jobs = *jobs_override;
    if (dry) return {};

    // Stream 0 feeds the reference run, stream 1 the Monte-Carlo replays.
    SemintResult reference = run_semint(*ph, icfg, derive_seed(seed, 0));
    FactualizedLLNReport rep =
        factualized_lln_check(*ph, cfg, reference, derive_seed(seed, 1));

    Artifacts a;
    a.report = json{
        {"kind", "factualized-lln"},
        {"reference",
         {{"saturated", reference.saturated},
          {"saturation_trial", reference.saturation_trial},
          {"trials", reference.trace.size()},
          {"k", reference.form.k},
          {"n_t", reference.form.n_t},
          {"phantom_slots", reference.decomposition.phantom_slots},
          {"estimate", law_json(reference.estimate)}}},
        {"label", rep.label},
        {"epsilon", rational_json(rep.epsilon)},
        {"delta", rational_json(rep.delta)},
        {"bound", rational_json(rep.bound)},
        {"reference_mass", rational_json(rep.reference_mass)},
        {"runs", cfg.runs},
        {"trials", cfg.trials},
        {"runs_within", rep.runs_within},
        {"fraction", rational_json(rep.fraction)},
        {"pass", rep.pass},
        {"residual_forms_agree", rep.residual_forms_agree}};
    return a;
}

Artifacts exec_laplace_oscillation(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "phenomenon", "trials_per_round", "level", "max_rounds"},
               "scenario");
    auto ph = phenomenon_from_config(need(s, "phenomenon", "scenario"), "scenario.phenomenon");
    OscillationConfig cfg = oscillation_config_from(s, "scenario");
    if (dry) return {};
    OscillationHistory hist = laplace_oscillation(*ph, cfg, seed);
    json rounds = json::array();
    for (const auto& r : hist.rounds) {
        rounds.push_back({{"stage", r.stage},
                          {"universe", r.universe},
                          {"counts", r.counts},
                          {"statistic", r.statistic},
                          {"critical", r.critical},
                          {"rejected", r.rejected}});
    }
    Artifacts a;
    a.report = json{{"kind", "laplace-oscillation"},
                    {"trials_per_round", cfg.trials_per_round},
                    {"level", cfg.level},
                    {"verdict", hist.verdict},
                    {"rounds", rounds}};
    return a;
}

Artifacts exec_compare(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "phenomenon", "schedule", "integration", "oscillation"},
               "scenario");
    auto ph = phenomenon_from_config(need(s, "phenomenon", "scenario"), "scenario.phenomenon");
    std::vector<std::uint64_t> schedule =
        as_schedule(need(s, "schedule", "scenario"), "scenario.schedule");
    SemintConfig icfg = semint_config_from(s, "scenario.integration");
    OscillationConfig ocfg;
    if (const json* v = opt(s, "oscillation")) {
        check_keys(*v, {"trials_per_round", "level", "max_rounds"}, "scenario.oscillation");
        ocfg = oscillation_config_from(*v, "scenario.oscillation");
    }
    if (!ph->ground_truth()) fail("scenario.phenomenon", "phenomenon provides no ground truth");
    if (dry) return {};

    ComparisonTable table = estimator_comparison(*ph, schedule, icfg, ocfg, seed);
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"n", r.n},
                        {"estimator", r.estimator},
                        {"l1", r.l1},
                        {"saturated", r.saturated ? json(*r.saturated) : json(nullptr)},
                        {"k", r.k ? json(*r.k) : json(nullptr)}});
    }
    Artifacts a;
    a.report = json{{"kind", "compare"}, {"rows", rows}};
    a.extra_files["compare.csv"] = comparison_csv(table);
    return a;
}

Artifacts exec_pre_tree(const json& s, bool dry, std::uint64_t seed) {
    check_keys(s, {"kind", "seed", "trunk", "channels", "schedule", "threshold"}, "scenario");
    std::string trunk = as_string(need(s, "trunk", "scenario"), "scenario.trunk");
    if (trunk.empty()) fail("scenario.trunk", "expected a non-empty trunk id");
    const json& jchannels = need(s, "channels", "scenario");
    if (!jchannels.is_array() || jchannels.empty()) {
        fail("scenario.channels", "expected a non-empty array of channels");
    }
    std::vector<Channel> channels;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < jchannels.size(); ++i) {
        const std::string cw = "scenario.channels[" + std::to_string(i) + "]";
        const json& jc = jchannels[i];
        check_keys(jc, {"id", "universe", "weights", "weights_b", "switch_at"}, cw);
        Channel c;
        c.id = as_string(need(jc, "id", cw), cw + ".id");
        if (!ids.insert(c.id).second) fail(cw + ".id", "duplicate channel id '" + c.id + "'");
        c.source.universe = as_string_list(need(jc, "universe", cw), cw + ".universe");
        c.source.weights_a = as_weights(need(jc, "weights", cw), cw + ".weights");
        if (const json* v = opt(jc, "weights_b")) {
            c.source.weights_b = as_weights(*v, cw + ".weights_b");
            c.source.switch_at = as_u64_min(need(jc, "switch_at", cw), 1, cw + ".switch_at");
        }
        try {
            c.source.validate();
        } catch (const std::exception& e) {
            fail(cw, e.what());
        }
        channels.push_back(std::move(c));
    }
    std::vector<std::uint64_t> schedule =
        as_schedule(need(s, "schedule", "scenario"), "scenario.schedule");
    if (schedule.size() < 2) {
        fail("scenario.schedule", "expected at least two checkpoints");
    }
    double threshold = 0.05;
    if (const json* v = opt(s, "threshold")) {
        threshold = as_double(*v, "scenario.threshold");
        if (!(threshold > 0.0)) fail("scenario.threshold", "expected a positive threshold");
    }
    if (dry) return {};

    PreProbabilityTree tree = build_pre_probability_tree(trunk, channels, schedule, seed);
    json branches = json::array();
    for (const auto& b : tree.branches) {
        json checkpoints = json::array();
        for (const auto& cp : b.checkpoints) {
            json freqs = json::array();
            for (const auto& f : cp.frequencies) freqs.push_back(rational_json(f));
            checkpoints.push_back({{"n", cp.n}, {"frequencies", freqs}});
        }
        StabilityReport st = stability_check(b, threshold);
        branches.push_back({{"channel", b.channel},
                            {"universe", b.universe},
                            {"checkpoints", checkpoints},
                            {"pre_law", law_json(b.pre_law)},
                            {"stability",
                             {{"metric", st.metric},
                              {"penultimate", st.penultimate},
                              {"threshold", st.threshold},
                              {"stable", st.stable}}}});
    }
    Artifacts a;
    a.report = json{{"kind", "pre-tree"},
                    {"trunk", tree.trunk},
                    {"schedule", tree.schedule},
                    {"branches", branches}};
    return a;
}

Artifacts execute_scenario(const json& s, bool dry, std::uint64_t seed,
                           std::optional<int> jobs_override) {
    if (!s.is_object()) throw ConfigError("scenario: expected a JSON object");
    std::string kind = as_string(need(s, "kind", "scenario"), "scenario.kind");
    if (kind == "puzzle-coords") return exec_puzzle_coords(s, dry, seed);
    if (kind == "puzzle-borders") return exec_puzzle_borders(s, dry, seed);
    if (kind == "probability-game") return exec_probability_game(s, dry, seed);
    if (kind == "semint-run") return exec_semint_run(s, dry, seed);
    if (kind == "lln-check") return exec_lln_check(s, dry, seed, jobs_override);
    if (kind == "factualized-lln") return exec_factualized_lln(s, dry, seed, jobs_override);
    if (kind == "laplace-oscillation") return exec_laplace_oscillation(s, dry, seed);
    if (kind == "compare") return exec_compare(s, dry, seed);
    if (kind == "pre-tree") return exec_pre_tree(s, dry, seed);
    fail("scenario.kind",
         "unknown kind '" + kind +
             "' (expected puzzle-coords, puzzle-borders, probability-game, semint-run, "
             "lln-check, factualized-lln, laplace-oscillation, compare, or pre-tree)");
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_now() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

RunOutcome run_scenario_text(const std::string& scenario_json, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<int> jobs_override) {
    RunOutcome out;
    json s;
    try {
        s = json::parse(scenario_json);
    } catch (const std::exception& e) {
        out.exit_code = kExitValidation;
        out.error = std::string("scenario: invalid JSON: ") + e.what();
        return out;
    }

    const std::string started = iso8601_now();
    std::uint64_t seed = 0;
    Artifacts arts;
    try {
        if (!s.is_object()) throw ConfigError("scenario: expected a JSON object");
        // A seed is mandatory: either in the config or forced on the command
        // line. There is no ambient randomness.
        if (seed_override) {
            seed = *seed_override;
            if (const json* v = opt(s, "seed")) as_u64(*v, "scenario.seed");
        } else {
            seed = as_u64(need(s, "seed", "scenario"), "scenario.seed");
        }
        arts = execute_scenario(s, false, seed, jobs_override);
    } catch (const ConfigError& e) {
        out.exit_code = kExitValidation;
        out.error = e.what();
        return out;
    } catch (const std::exception& e) {
        out.exit_code = kExitInvariant;
        out.error = e.what();
        return out;
    }

    try {
        std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", arts.report.dump(2) + "\n");
        out.outputs.push_back("report.json");
        for (const auto& [name, content] : arts.extra_files) {
            write_file(dir / name, content);
            out.outputs.push_back(name);
        }
        json manifest{{"tool_version", kToolVersion},
                      {"kind", arts.report.at("kind").get<std::string>()},
                      {"scenario_digest", hex64(fnv1a64(s.dump()))},
                      {"seed", seed},
                      {"started_at", started},
                      {"finished_at", iso8601_now()},
                      {"outputs", out.outputs}};
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        out.outputs.push_back("manifest.json");
    } catch (const std::exception& e) {
        out.exit_code = kExitInvariant;
        out.error = e.what();
        return out;
    }
    return out;
}

RunOutcome run_scenario_file(const std::string& scenario_path, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<int> jobs_override) {
    std::string text;
    try {
        text = read_file(scenario_path);
    } catch (const std::exception& e) {
        RunOutcome out;
        out.exit_code = kExitValidation;
        out.error = e.what();
        return out;
    }
    return run_scenario_text(text, out_dir, seed_override, jobs_override);
}

ValidationResult validate_scenario_text(const std::string& scenario_json) {
    ValidationResult result;
    json s;
    try {
        s = json::parse(scenario_json);
    } catch (const std::exception& e) {
        result.diagnostics.push_back(std::string("scenario: invalid JSON: ") + e.what());
        return result;
    }
    try {
        if (!s.is_object()) throw ConfigError("scenario: expected a JSON object");
        as_u64(need(s, "seed", "scenario"), "scenario.seed");
        execute_scenario(s, true, 0, {});
        result.ok = true;
    } catch (const std::exception& e) {
        result.diagnostics.push_back(e.what());
    }
    return result;
}

ValidationResult validate_scenario_file(const std::string& scenario_path) {
    std::string text;
    try {
        text = read_file(scenario_path);
    } catch (const std::exception& e) {
        ValidationResult result;
        result.diagnostics.push_back(e.what());
        return result;
    }
    return validate_scenario_text(text);
}

namespace {

Rational rational_from_json(const json& j, const std::string& where) {
    const std::string num = as_string(need(j, "num", where), where + ".num");
    const std::string den = as_string(need(j, "den", where), where + ".den");
    return parse_rational(num + "/" + den);
}

std::string plot_convergence(const json& report) {
    std::string csv = "N,label,freq\n";
    const std::string kind = report.at("kind").get<std::string>();
    if (kind == "probability-game") {
        for (const auto& row : report.at("convergence")) {
            Rational q = rational_from_json(row, "report.convergence[]");
            csv += std::to_string(row.at("n").get<std::uint64_t>()) + "," +
                   row.at("label").get<std::string>() + "," + format_decimal(to_double(q)) +
                   "\n";
        }
        return csv;
    }
    if (kind == "pre-tree") {
        for (const auto& b : report.at("branches")) {
            const std::string channel = b.at("channel").get<std::string>();
            const auto universe = b.at("universe").get<std::vector<std::string>>();
            for (const auto& cp : b.at("checkpoints")) {
                const auto n = cp.at("n").get<std::uint64_t>();
                const json& freqs = cp.at("frequencies");
                for (std::size_t i = 0; i < universe.size(); ++i) {
                    Rational q = rational_from_json(freqs.at(i), "report frequencies");
                    csv += std::to_string(n) + "," + channel + ":" + universe[i] + "," +
                           format_decimal(to_double(q)) + "\n";
                }
            }
        }
        return csv;
    }
    throw ConfigError("report of kind '" + kind + "' carries no convergence data");
}

std::string plot_saturation(const json& report) {
    const std::string kind = report.at("kind").get<std::string>();
    if (kind != "semint-run") {
        throw ConfigError("report of kind '" + kind + "' carries no saturation trace");
    }
    std::string csv = "trial,replica,cells_on_Y1\n";
    for (const auto& row : report.at("saturation_trace")) {
        csv += std::to_string(row.at(0).get<std::uint64_t>()) + "," +
               std::to_string(row.at(1).get<std::uint32_t>()) + "," +
               std::to_string(row.at(2).get<std::uint64_t>()) + "\n";
    }
    return csv;
}

std::string plot_compare(const json& report) {
    const std::string kind = report.at("kind").get<std::string>();
    if (kind != "compare") {
        throw ConfigError("report of kind '" + kind + "' carries no comparison rows");
    }
    ComparisonTable table;
    for (const auto& row : report.at("rows")) {
        ComparisonRow r;
        r.n = row.at("n").get<std::uint64_t>();
        r.estimator = row.at("estimator").get<std::string>();
        r.l1 = row.at("l1").get<double>();
        if (!row.at("saturated").is_null()) r.saturated = row.at("saturated").get<bool>();
        if (!row.at("k").is_null()) r.k = row.at("k").get<std::uint32_t>();
        table.rows.push_back(std::move(r));
    }
    return comparison_csv(table);
}

}  // namespace

PlotResult plot_report_text(const std::string& report_json, const std::string& kind) {
    PlotResult out;
    json report;
    try {
        report = json::parse(report_json);
        if (!report.is_object() || !report.contains("kind")) {
            throw ConfigError("report: missing 'kind' field");
        }
        if (kind == "convergence") {
            out.csv = plot_convergence(report);
        } else if (kind == "saturation") {
            out.csv = plot_saturation(report);
        } else if (kind == "compare") {
            out.csv = plot_compare(report);
        } else {
            throw ConfigError("unknown plot kind '" + kind +
                              "' (expected convergence, saturation, or compare)");
        }
    } catch (const std::exception& e) {
        out.exit_code = kExitValidation;
        out.error = e.what();
    }
    return out;
}

PlotResult plot_report_file(const std::string& report_path, const std::string& kind) {
    std::string text;
    try {
        text = read_file(report_path);
    } catch (const std::exception& e) {
        PlotResult out;
        out.exit_code = kExitValidation;
        out.error = e.what();
        return out;
    }
    return plot_report_text(text, kind);
}

}  // namespace semint
