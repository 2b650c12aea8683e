#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semint/rational.hpp"

namespace semint {

// Probability law over an ordered finite support with exact rational masses.
struct ProbabilityLaw {
    std::vector<std::pair<std::string, Rational>> entries;

    bool has(const std::string& label) const;
    // Mass of a support label; throws if absent.
    const Rational& mass(const std::string& label) const;
    // Mass of any label, zero when outside the support.
    Rational mass_or_zero(const std::string& label) const;
    std::vector<std::string> labels() const;

    // Nonnegative masses, unique labels, total exactly 1.
    void validate() const;
};

// A finite set of outcome labels drawn from a law's support.
using EventSet = std::set<std::string>;

// mass(label) = count(label) / sum(counts); order of entries preserved.
ProbabilityLaw law_from_counts(const std::vector<std::pair<std::string, std::uint64_t>>& counts);

// Sum of the masses of the event's labels; a label outside the law's
// support is a domain error.
Rational event_probability(const ProbabilityLaw& law, const EventSet& event);

// Sum over the union of supports of |mass_a - mass_b|.
Rational l1_distance(const ProbabilityLaw& a, const ProbabilityLaw& b);

// Equality as mass assignments: zero-mass entries and entry order ignored.
bool same_law(const ProbabilityLaw& a, const ProbabilityLaw& b);

}  // namespace semint
