#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semint/integration.hpp"
#include "semint/law.hpp"
#include "semint/phenomenon.hpp"
#include "semint/trace.hpp"

namespace semint {

// Exact frequency law n(r)/N over the trace universe.
ProbabilityLaw empirical_law(const TrialTrace& trace);

// Monte-Carlo check of the frequency concentration bound: the fraction of
// independent runs whose frequency of `label` lands within epsilon of the
// reference mass must reach 1 - delta.
struct LLNConfig {
    Rational epsilon = Rational(1, 20);
    Rational delta = Rational(1, 20);
    std::uint64_t runs = 1000;
    std::vector<std::uint64_t> trial_schedule;  // ascending run lengths to test
    std::string label;
    int jobs = 1;
};

struct LLNEntry {
    std::uint64_t n = 0;
    std::uint64_t runs_within = 0;
    Rational fraction;
    bool pass = false;
};

struct LLNReport {
    std::string label;
    Rational epsilon;
    Rational delta;
    Rational bound;  // 1 - delta
    Rational reference_mass;
    std::vector<LLNEntry> entries;                // one per tested run length
    std::optional<std::uint64_t> empirical_n0;    // smallest passing length
    Rational fraction;                            // at the largest tested length
    bool pass = false;
};

LLNReport lln_check(const RandomPhenomenon& ph, const LLNConfig& cfg,
                    const ProbabilityLaw& reference, std::uint64_t seed);

// Same concentration check against the support-ratio reference of a
// completed run. Each Monte-Carlo run replays its trials onto a fresh
// replica stack over the reference grid and evaluates its deviation through
// the decomposed counts; the two residual forms are compared exactly on
// every run.
struct FactualizedLLNConfig {
    Rational epsilon = Rational(1, 20);
    Rational delta = Rational(1, 20);
    std::uint64_t runs = 200;
    std::uint64_t trials = 2000;
    std::string label;
    int jobs = 1;
};

struct FactualizedLLNReport {
    std::string label;
    Rational epsilon;
    Rational delta;
    Rational bound;
    Rational reference_mass;  // support ratio from the reference run
    std::uint64_t runs_within = 0;
    Rational fraction;
    bool pass = false;
    bool residual_forms_agree = false;
};

FactualizedLLNReport factualized_lln_check(const RandomPhenomenon& ph,
                                           const FactualizedLLNConfig& cfg,
                                           const SemintResult& reference,
                                           std::uint64_t seed);

// Posits the uniform law on the current universe, tests it with a Pearson
// goodness-of-fit statistic, and refines the universe along the
// phenomenon's next complexification stage on rejection. Terminates with
// "uniform-accepted" or, when rejection survives every stage,
// "oscillation-unresolved".
struct OscillationConfig {
    std::uint64_t trials_per_round = 3000;
    double level = 0.01;  // significance of the rejection test
    int max_rounds = 0;   // 0 means one round per available stage
};

struct OscillationRound {
    int stage = 0;
    std::vector<std::string> universe;
    std::vector<std::uint64_t> counts;
    double statistic = 0.0;
    double critical = 0.0;
    bool rejected = false;
};

struct OscillationHistory {
    std::vector<OscillationRound> rounds;
    std::string verdict;  // "uniform-accepted" or "oscillation-unresolved"
};

OscillationHistory laplace_oscillation(const RandomPhenomenon& ph,
                                       const OscillationConfig& cfg, std::uint64_t seed);

// Side-by-side trajectory of the support-ratio estimate, the raw frequency
// law, and the final posited uniform law, each against ground truth.
struct ComparisonRow {
    std::uint64_t n = 0;
    std::string estimator;
    double l1 = 0.0;
    std::optional<bool> saturated;
    std::optional<std::uint32_t> k;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

ComparisonTable estimator_comparison(const RandomPhenomenon& ph,
                                     const std::vector<std::uint64_t>& schedule,
                                     const SemintConfig& semint_cfg,
                                     const OscillationConfig& osc_cfg, std::uint64_t seed);

// Header N,estimator,l1,saturated,K; decimals use 12 significant digits.
std::string comparison_csv(const ComparisonTable& table);

// Decimal rendering used in every CSV artifact: 12 significant digits,
// ties resolved by the round-half-even IEEE default.
std::string format_decimal(double value);

}  // namespace semint
