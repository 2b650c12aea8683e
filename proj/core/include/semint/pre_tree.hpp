#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semint/law.hpp"
#include "semint/rng.hpp"

namespace semint {

// Label sampler for one observation channel. With weights_b set, the law
// switches from weights_a to weights_b at trial switch_at (1-based), which
// models a nonstationary source.
struct LabelSource {
    std::vector<std::string> universe;
    std::vector<Rational> weights_a;
    std::vector<Rational> weights_b;
    std::uint64_t switch_at = 0;

    void validate() const;
    std::size_t draw(Rng& rng, std::uint64_t trial) const;  // index into universe
};

struct Channel {
    std::string id;
    LabelSource source;
};

// Exact frequencies of one branch at one checkpoint.
struct Checkpoint {
    std::uint64_t n = 0;
    std::vector<Rational> frequencies;  // per universe label, sums to 1
};

struct BranchRecord {
    std::string channel;
    std::vector<std::string> universe;
    std::vector<Checkpoint> checkpoints;
    ProbabilityLaw pre_law;  // frequencies at the final checkpoint
};

// Trunk with one branch per channel; every branch runs its own derived
// trial stream, so no two channels share a trial.
struct PreProbabilityTree {
    std::string trunk;
    std::vector<std::uint64_t> schedule;
    std::vector<BranchRecord> branches;
};

PreProbabilityTree build_pre_probability_tree(const std::string& trunk,
                                              const std::vector<Channel>& channels,
                                              const std::vector<std::uint64_t>& schedule,
                                              std::uint64_t seed);

// Drift of each checkpoint's frequencies from the final checkpoint:
// metric(k) = max over labels of |n_j/N_k - n_j/N_q|. The branch is stable
// when the penultimate checkpoint's drift stays below the threshold.
struct StabilityReport {
    std::string channel;
    std::vector<double> metric;  // one entry per checkpoint, final is 0
    double penultimate = 0.0;
    double threshold = 0.05;
    bool stable = false;
};

StabilityReport stability_check(const BranchRecord& branch, double threshold = 0.05);

}  // namespace semint
