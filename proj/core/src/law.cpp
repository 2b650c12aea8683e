#include "semint/law.hpp"

#include <map>
#include <stdexcept>

namespace semint {

bool ProbabilityLaw::has(const std::string& label) const {
    for (const auto& [l, m] : entries) {
        if (l == label) return true;
    }
    return false;
}

const Rational& ProbabilityLaw::mass(const std::string& label) const {
    for (const auto& [l, m] : entries) {
        if (l == label) return m;
    }
    throw std::domain_error("label '" + label + "' outside the law's support");
}

Rational ProbabilityLaw::mass_or_zero(const std::string& label) const {
    for (const auto& [l, m] : entries) {
        if (l == label) return m;
    }
    return Rational(0);
}

std::vector<std::string> ProbabilityLaw::labels() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& [l, m] : entries) out.push_back(l);
    return out;
}

void ProbabilityLaw::validate() const {
    Rational total(0);
    std::map<std::string, int> seen;
    for (const auto& [l, m] : entries) {
        if (m < 0) throw std::invalid_argument("negative mass for label '" + l + "'");
        if (++seen[l] > 1) throw std::invalid_argument("duplicate label '" + l + "'");
        total += m;
    }
    if (total != 1) {
        throw std::invalid_argument("masses sum to " + to_fraction_string(total) + ", not 1");
    }
}

ProbabilityLaw law_from_counts(
    const std::vector<std::pair<std::string, std::uint64_t>>& counts) {
    std::uint64_t total = 0;
    for (const auto& [l, c] : counts) total += c;
    if (total == 0) throw std::invalid_argument("law_from_counts needs a positive total");
    ProbabilityLaw law;
    for (const auto& [l, c] : counts) {
        law.entries.emplace_back(l, Rational(BigInt(c), BigInt(total)));
    }
    law.validate();
    return law;
}

Rational event_probability(const ProbabilityLaw& law, const EventSet& event) {
    Rational total(0);
    for (const auto& label : event) {
        total += law.mass(label);  // throws domain_error outside the support
    }
    return total;
}

Rational l1_distance(const ProbabilityLaw& a, const ProbabilityLaw& b) {
    std::map<std::string, Rational> diff;
    for (const auto& [l, m] : a.entries) diff[l] += m;
    for (const auto& [l, m] : b.entries) diff[l] -= m;
    Rational total(0);
    for (const auto& [l, d] : diff) total += rational_abs(d);
    return total;
}

bool same_law(const ProbabilityLaw& a, const ProbabilityLaw& b) {
    return l1_distance(a, b) == 0;
}

}  // namespace semint
