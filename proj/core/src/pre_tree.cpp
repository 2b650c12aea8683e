#include "semint/pre_tree.hpp"

#include <optional>
#include <set>
#include <stdexcept>

#include "semint/phenomenon.hpp"

namespace semint {

void LabelSource::validate() const {
    if (universe.empty()) throw std::invalid_argument("label source needs a universe");
    std::set<std::string> seen(universe.begin(), universe.end());
    if (seen.size() != universe.size()) {
        throw std::invalid_argument("duplicate label in source universe");
    }
    auto check = [&](const std::vector<Rational>& w, const char* what) {
        if (w.size() != universe.size()) {
            throw std::invalid_argument(std::string(what) + " must match the universe size");
        }
        Rational total(0);
        for (const auto& x : w) {
            if (x < 0) throw std::invalid_argument("negative weight in label source");
            total += x;
        }
        if (total != 1) throw std::invalid_argument(std::string(what) + " must sum to 1");
    };
    check(weights_a, "first law");
    if (!weights_b.empty()) {
        check(weights_b, "second law");
        if (switch_at == 0) {
            throw std::invalid_argument("switching source needs switch_at >= 1");
        }
    }
}

std::size_t LabelSource::draw(Rng& rng, std::uint64_t trial) const {
    const auto& w = (!weights_b.empty() && trial >= switch_at) ? weights_b : weights_a;
    return draw_by_weights(w, rng);
}

PreProbabilityTree build_pre_probability_tree(const std::string& trunk,
                                              const std::vector<Channel>& channels,
                                              const std::vector<std::uint64_t>& schedule,
                                              std::uint64_t seed) {
    if (channels.empty()) throw std::invalid_argument("tree needs at least one channel");
    if (schedule.empty()) throw std::invalid_argument("tree needs a checkpoint schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
            throw std::invalid_argument("checkpoint schedule must be strictly increasing");
        }
    }
    std::set<std::string> ids;
    for (const auto& c : channels) {
        if (!ids.insert(c.id).second) {
            throw std::invalid_argument("duplicate channel id '" + c.id + "'");
        }
        c.source.validate();
    }

    PreProbabilityTree tree;
    tree.trunk = trunk;
    tree.schedule = schedule;

    for (std::size_t ci = 0; ci < channels.size(); ++ci) {
        const Channel& ch = channels[ci];
        Rng rng(derive_seed(seed, ci));  // disjoint stream per channel

        BranchRecord branch;
        branch.channel = ch.id;
        branch.universe = ch.source.universe;

        WeightedSampler first(ch.source.weights_a);
        std::optional<WeightedSampler> second;
        if (!ch.source.weights_b.empty()) second.emplace(ch.source.weights_b);

        std::vector<std::uint64_t> counts(ch.source.universe.size(), 0);
        std::size_t next_checkpoint = 0;
        const std::uint64_t final_n = schedule.back();
        for (std::uint64_t trial = 1; trial <= final_n; ++trial) {
            const WeightedSampler& s =
                (second && trial >= ch.source.switch_at) ? *second : first;
            counts[s.draw(rng)]++;
            if (trial == schedule[next_checkpoint]) {
                Checkpoint cp;
                cp.n = trial;
                for (std::uint64_t c : counts) {
                    cp.frequencies.emplace_back(Rational(BigInt(c), BigInt(trial)));
                }
                branch.checkpoints.push_back(std::move(cp));
                ++next_checkpoint;
            }
        }

        const Checkpoint& last = branch.checkpoints.back();
        for (std::size_t j = 0; j < branch.universe.size(); ++j) {
            branch.pre_law.entries.emplace_back(branch.universe[j], last.frequencies[j]);
        }
        branch.pre_law.validate();
        tree.branches.push_back(std::move(branch));
    }
    return tree;
}

StabilityReport stability_check(const BranchRecord& branch, double threshold) {
    if (branch.checkpoints.size() < 2) {
        throw std::invalid_argument("stability check needs at least two checkpoints");
    }
    StabilityReport report;
    report.channel = branch.channel;
    report.threshold = threshold;
    const Checkpoint& final_cp = branch.checkpoints.back();
    for (const Checkpoint& cp : branch.checkpoints) {
        Rational worst(0);
        for (std::size_t j = 0; j < cp.frequencies.size(); ++j) {
            Rational d = rational_abs(cp.frequencies[j] - final_cp.frequencies[j]);
            if (d > worst) worst = d;
        }
        report.metric.push_back(to_double(worst));
    }
    report.penultimate = report.metric[report.metric.size() - 2];
    report.stable = report.penultimate < threshold;
    return report;
}

}  // namespace semint
