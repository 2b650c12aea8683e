#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semint/law.hpp"

namespace semint {

inline constexpr std::uint64_t kNoCell = ~std::uint64_t(0);

// One observed trial. Placement fields are filled only by grid-driven runs.
struct TrialRecord {
    std::uint32_t label = 0;        // index into TrialTrace::universe
    std::uint64_t cell = kNoCell;   // flat grid cell, kNoCell when not gridded
    std::uint32_t replica = 0;      // 1-based replica occupied, 0 when not gridded
};

// Ordered log of all outcomes of a run.
struct TrialTrace {
    std::vector<std::string> universe;
    std::vector<TrialRecord> records;

    std::uint64_t size() const { return records.size(); }
    std::uint32_t label_index(const std::string& label) const;
    std::vector<std::uint64_t> counts() const;  // per universe label
    std::uint64_t count_of(const std::string& label) const;
    // Exact frequency law n(r)/N over the first n trials (n = 0 means all).
    ProbabilityLaw frequency_law(std::uint64_t n = 0) const;

    // Header "trial,label,cell,replica"; cell and replica blank if absent.
    std::string to_csv() const;
};

}  // namespace semint
