#include "semint/trace.hpp"

#include <stdexcept>

namespace semint {

std::uint32_t TrialTrace::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (universe[i] == label) return static_cast<std::uint32_t>(i);
    }
    throw std::out_of_range("label '" + label + "' not in trace universe");
}

std::vector<std::uint64_t> TrialTrace::counts() const {
    std::vector<std::uint64_t> c(universe.size(), 0);
    for (const auto& r : records) c.at(r.label)++;
    return c;
}

std::uint64_t TrialTrace::count_of(const std::string& label) const {
    return counts().at(label_index(label));
}

ProbabilityLaw TrialTrace::frequency_law(std::uint64_t n) const {
    if (n == 0) n = records.size();
    if (n > records.size()) {
        throw std::out_of_range("frequency_law over more trials than recorded");
    }
    std::vector<std::uint64_t> c(universe.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) c.at(records[i].label)++;
    ProbabilityLaw law;
    for (std::size_t j = 0; j < universe.size(); ++j) {
        law.entries.emplace_back(universe[j], Rational(BigInt(c[j]), BigInt(n)));
    }
    return law;
}

std::string TrialTrace::to_csv() const {
    std::string out = "trial,label,cell,replica\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += std::to_string(i + 1);
        out += ',';
        out += universe.at(r.label);
        out += ',';
        if (r.cell != kNoCell) out += std::to_string(r.cell);
        out += ',';
        if (r.replica != 0) out += std::to_string(r.replica);
        out += '\n';
    }
    return out;
}

}  // namespace semint
