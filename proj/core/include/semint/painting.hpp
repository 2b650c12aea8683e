#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semint/law.hpp"

namespace semint {

enum Side : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

// One parcel of the painting. Border tokens model the colour gradient a
// player matches along a cut: interior tokens occur on exactly two opposing
// sides of neighbouring squares, boundary tokens (prefix "b", the visibly
// flat edges) occur once. cphi is the square's colour-form identity.
struct Square {
    int x = 0;  // 1..10, west to east
    int y = 0;  // 1..10, south to north
    std::array<std::string, 4> border;
    std::string ac;    // colour label
    std::string cphi;  // unique per square
};

struct Painting {
    static constexpr int kSide = 10;
    static constexpr int kSquares = kSide * kSide;

    std::vector<Square> squares;  // row-major: index = (y-1)*kSide + (x-1)

    const Square& at(int x, int y) const;
    std::set<std::string> labels() const;
    void validate() const;
};

// Deterministic painting with the given colour multiset; counts must sum to
// 100 over fewer than 100 distinct labels.
Painting generate_painting(std::uint64_t seed,
                           const std::vector<std::pair<std::string, int>>& colour_counts);

// mass(j) = n_P(j) / 100, the exact composition of the painting.
ProbabilityLaw factual_law(const Painting& p);

std::string painting_to_json(const Painting& p);
Painting painting_from_json(const std::string& text);

}  // namespace semint
