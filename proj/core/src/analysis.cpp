#include "semint/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

namespace semint {

namespace {

// Runs body(i) for i in [0, runs) across up to `jobs` threads. Results must
// be written to per-index slots so the aggregation stays deterministic.
template <class F>
void for_each_run(std::uint64_t runs, int jobs, F&& body) {
    if (jobs <= 1 || runs <= 1) {
        for (std::uint64_t i = 0; i < runs; ++i) body(i);
        return;
    }
    auto workers = static_cast<std::uint64_t>(jobs);
    if (workers > runs) workers = runs;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < runs; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

ProbabilityLaw empirical_law(const TrialTrace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("empirical law of an empty trace");
    return trace.frequency_law();
}

LLNReport lln_check(const RandomPhenomenon& ph, const LLNConfig& cfg,
                    const ProbabilityLaw& reference, std::uint64_t seed) {
    if (cfg.runs == 0) throw std::invalid_argument("lln_check needs runs >= 1");
    if (cfg.trial_schedule.empty()) {
        throw std::invalid_argument("lln_check needs at least one run length");
    }
    for (std::size_t i = 1; i < cfg.trial_schedule.size(); ++i) {
        if (cfg.trial_schedule[i] <= cfg.trial_schedule[i - 1]) {
            throw std::invalid_argument("run lengths must be strictly increasing");
        }
    }
    if (cfg.epsilon <= 0 || cfg.delta <= 0 || cfg.delta >= 1) {
        throw std::invalid_argument("lln_check needs epsilon > 0 and 0 < delta < 1");
    }

    LLNReport report;
    report.label = cfg.label;
    report.epsilon = cfg.epsilon;
    report.delta = cfg.delta;
    report.bound = Rational(1) - cfg.delta;
    report.reference_mass = reference.mass(cfg.label);  // domain error if absent

    for (std::size_t ni = 0; ni < cfg.trial_schedule.size(); ++ni) {
        const std::uint64_t n = cfg.trial_schedule[ni];
        std::vector<char> within(cfg.runs, 0);
        const std::uint64_t stream_base = derive_seed(seed, ni);
        for_each_run(cfg.runs, cfg.jobs, [&](std::uint64_t m) {
            Rng rng(derive_seed(stream_base, m));
            std::uint64_t hits = 0;
            for (std::uint64_t t = 0; t < n; ++t) {
                if (ph.sample_label(rng) == cfg.label) ++hits;
            }
            Rational deviation = rational_abs(Rational(BigInt(hits), BigInt(n)) -
                                              report.reference_mass);
            within[m] = deviation <= cfg.epsilon ? 1 : 0;
        });

        LLNEntry entry;
        entry.n = n;
        for (char c : within) entry.runs_within += c;
        entry.fraction = Rational(BigInt(entry.runs_within), BigInt(cfg.runs));
        entry.pass = entry.fraction >= report.bound;
        if (entry.pass && !report.empirical_n0) report.empirical_n0 = n;
        report.entries.push_back(std::move(entry));
    }

    report.fraction = report.entries.back().fraction;
    report.pass = report.entries.back().pass;
    return report;
}

FactualizedLLNReport factualized_lln_check(const RandomPhenomenon& ph,
                                           const FactualizedLLNConfig& cfg,
                                           const SemintResult& reference,
                                           std::uint64_t seed) {
    if (cfg.runs == 0 || cfg.trials == 0) {
        throw std::invalid_argument("factualized check needs runs and trials >= 1");
    }
    if (!reference.saturated || reference.form.n_t == 0) {
        throw std::invalid_argument("factualized check needs a saturated reference run");
    }
    if (cfg.epsilon <= 0 || cfg.delta <= 0 || cfg.delta >= 1) {
        throw std::invalid_argument("factualized check needs epsilon > 0 and 0 < delta < 1");
    }

    FactualizedLLNReport report;
    report.label = cfg.label;
    report.epsilon = cfg.epsilon;
    report.delta = cfg.delta;
    report.bound = Rational(1) - cfg.delta;
    report.reference_mass = reference.estimate.mass(cfg.label);

    const std::uint64_t n_t = reference.form.n_t;
    auto it_nr = reference.form.n_r.find(cfg.label);
    const std::uint64_t n_r = it_nr == reference.form.n_r.end() ? 0 : it_nr->second;
    const AspectAxis& label_axis = ph.label_axis();

    std::vector<char> within(cfg.runs, 0);
    std::vector<char> agree(cfg.runs, 0);
    for_each_run(cfg.runs, cfg.jobs, [&](std::uint64_t m) {
        Rng rng(derive_seed(seed, m));
        ReplicaSet rs(reference.grid.cell_count());
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            Sample s = ph.sample(rng);
            std::uint64_t cell = reference.grid.flatten(reference.grid.discretize_sample(s));
            rs.place(cell);
            if (label_axis.values[s.at(label_axis.id).category - 1] == cfg.label) ++hits;
        }
        std::uint32_t k = complete_replicas(rs, reference.form);
        auto n_prime = static_cast<std::int64_t>(cfg.trials) -
                       static_cast<std::int64_t>(k) * static_cast<std::int64_t>(n_t);
        auto n_prime_r = static_cast<std::int64_t>(hits) -
                         static_cast<std::int64_t>(k) * static_cast<std::int64_t>(n_r);
        ResidualComparison rc = residual_difference(k, n_t, n_r, n_prime, n_prime_r);
        agree[m] = rc.direct == rc.reduced ? 1 : 0;

        Rational plain = rational_abs(Rational(BigInt(hits), BigInt(cfg.trials)) -
                                      report.reference_mass);
        if (rc.direct != plain) agree[m] = 0;  // the decomposed route must match
        within[m] = rc.direct <= cfg.epsilon ? 1 : 0;
    });

    report.residual_forms_agree = true;
    for (std::uint64_t m = 0; m < cfg.runs; ++m) {
        report.runs_within += within[m];
        if (!agree[m]) report.residual_forms_agree = false;
    }
    report.fraction = Rational(BigInt(report.runs_within), BigInt(cfg.runs));
    report.pass = report.fraction >= report.bound && report.residual_forms_agree;
    return report;
}

OscillationHistory laplace_oscillation(const RandomPhenomenon& ph,
                                       const OscillationConfig& cfg, std::uint64_t seed) {
    if (cfg.trials_per_round == 0) {
        throw std::invalid_argument("oscillation needs trials_per_round >= 1");
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw std::invalid_argument("oscillation level must lie in (0, 1)");
    }
    int rounds = cfg.max_rounds > 0 ? cfg.max_rounds : ph.refinement_stage_count() + 1;

    OscillationHistory history;
    for (int round = 0; round < rounds; ++round) {
        int stage = round;
        if (stage > ph.refinement_stage_count()) break;

        OscillationRound r;
        r.stage = stage;
        r.universe = ph.universe_at_stage(stage);
        r.counts.assign(r.universe.size(), 0);

        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < r.universe.size(); ++i) index[r.universe[i]] = i;

        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(round)));
        for (std::uint64_t t = 0; t < cfg.trials_per_round; ++t) {
            Sample s = ph.sample(rng);
            r.counts[index.at(ph.stage_label(s, stage))]++;
        }

        if (r.universe.size() < 2) {
            r.statistic = 0.0;
            r.critical = 0.0;
            r.rejected = false;
        } else {
            double expected =
                static_cast<double>(cfg.trials_per_round) / static_cast<double>(r.universe.size());
            double stat = 0.0;
            for (std::uint64_t c : r.counts) {
                double d = static_cast<double>(c) - expected;
                stat += d * d / expected;
            }
            r.statistic = stat;
            boost::math::chi_squared dist(static_cast<double>(r.universe.size() - 1));
            r.critical = boost::math::quantile(dist, 1.0 - cfg.level);
            r.rejected = stat > r.critical;
        }

        bool rejected = r.rejected;
        history.rounds.push_back(std::move(r));
        if (!rejected) {
            history.verdict = "uniform-accepted";
            return history;
        }
        if (stage == ph.refinement_stage_count()) break;
    }
    history.verdict = "oscillation-unresolved";
    return history;
}

namespace {

// Projection of the uniform law on the final universe back onto the labels.
ProbabilityLaw final_posited_label_law(const RandomPhenomenon& ph, int final_stage) {
    std::map<std::string, std::string> label_of_group;
    for (const Sample& s : ph.complexified_support()) {
        label_of_group[ph.stage_label(s, final_stage)] = ph.label_of(s);
    }
    std::vector<std::string> universe = ph.universe_at_stage(final_stage);
    std::map<std::string, std::uint64_t> groups_per_label;
    for (const auto& g : universe) groups_per_label[label_of_group.at(g)] += 1;

    ProbabilityLaw law;
    for (const auto& [label, groups] : groups_per_label) {
        law.entries.emplace_back(label,
                                 Rational(BigInt(groups), BigInt(universe.size())));
    }
    law.validate();
    return law;
}

}  // namespace

ComparisonTable estimator_comparison(const RandomPhenomenon& ph,
                                     const std::vector<std::uint64_t>& schedule,
                                     const SemintConfig& semint_cfg,
                                     const OscillationConfig& osc_cfg, std::uint64_t seed) {
    if (schedule.empty()) throw std::invalid_argument("comparison needs a schedule");
    const ProbabilityLaw* truth = ph.ground_truth();
    if (!truth) throw std::invalid_argument("comparison needs a phenomenon with ground truth");

    ComparisonTable table;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const std::uint64_t n = schedule[i];
        if (n == 0 || (i > 0 && n <= schedule[i - 1])) {
            throw std::invalid_argument("comparison schedule must be strictly increasing");
        }

        SemintConfig cfg = semint_cfg;
        cfg.max_trials = n;
        cfg.post_saturation_trials = n;  // run to the cap regardless of saturation
        SemintResult run = run_semint(ph, cfg, seed);

        ComparisonRow semint_row;
        semint_row.n = n;
        semint_row.estimator = "semint";
        semint_row.l1 = to_double(l1_distance(run.estimate, *truth));
        semint_row.saturated = run.saturated;
        semint_row.k = run.form.k;
        table.rows.push_back(std::move(semint_row));

        ComparisonRow empirical_row;
        empirical_row.n = n;
        empirical_row.estimator = "empirical";
        empirical_row.l1 = to_double(l1_distance(empirical_law(run.trace), *truth));
        table.rows.push_back(std::move(empirical_row));

        OscillationConfig oc = osc_cfg;
        oc.trials_per_round = n;
        OscillationHistory osc = laplace_oscillation(ph, oc, derive_seed(seed, 1 + i));
        int final_stage = osc.rounds.empty() ? 0 : osc.rounds.back().stage;
        ComparisonRow laplace_row;
        laplace_row.n = n;
        laplace_row.estimator = "laplace-final";
        laplace_row.l1 = to_double(l1_distance(final_posited_label_law(ph, final_stage), *truth));
        table.rows.push_back(std::move(laplace_row));
    }
    return table;
}

std::string format_decimal(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::string comparison_csv(const ComparisonTable& table) {
    std::string out = "N,estimator,l1,saturated,K\n";
    for (const auto& row : table.rows) {
        out += std::to_string(row.n);
        out += ',';
        out += row.estimator;
        out += ',';
        out += format_decimal(row.l1);
        out += ',';
        if (row.saturated) out += *row.saturated ? "true" : "false";
        out += ',';
        if (row.k) out += std::to_string(*row.k);
        out += '\n';
    }
    return out;
}

}  // namespace semint
