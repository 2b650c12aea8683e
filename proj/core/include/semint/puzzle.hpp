#pragma once

#include <cstdint>
#include <vector>

#include "semint/painting.hpp"
#include "semint/trace.hpp"

namespace semint {

struct ReconstructionReport {
    std::uint64_t extractions = 0;
    std::uint64_t misplacement_attempts = 0;
    std::uint32_t replicas = 1;
    bool complete = false;
    bool grids_match_source = false;
};

// Draws the 100 squares in seeded order without replacement and places each
// by its printed coordinates. Always 100 extractions, zero misplacements.
ReconstructionReport reconstruct_by_coordinates(const Painting& p, std::uint64_t seed);

// Pools `replicas` copies of every square, shuffles them by seed, and places
// each draw by greedy border matching across the partially built grids
// (lowest grid index first), never backtracking. Location and colour labels
// stay hidden during solving; only border tokens and the colour-form
// identity are read. A draw with no matching open frontier anywhere seeds a
// new cluster: the colour-form study pins its place on the lowest-index grid
// still lacking that colour-form. Every candidate slot rejected before the
// accepted one counts as one misplacement attempt.
ReconstructionReport reconstruct_by_borders(const Painting& p, std::uint32_t replicas,
                                            std::uint64_t seed);

// Same game with an explicit draw order over the pooled piece instances;
// instance i of the pool is square index (i % 100) of replica (i / 100).
ReconstructionReport reconstruct_by_borders_in_order(const Painting& p, std::uint32_t replicas,
                                                     const std::vector<std::uint32_t>& order);

// N draws with replacement from the bag of 100 squares, recording only the
// colour label of each draw.
TrialTrace probability_game(const Painting& p, std::uint64_t draws, std::uint64_t seed);

namespace detail {

// Side-parametric border game engine; the public API pins side to 10.
// squares must be row-major with coordinates in 1..side.
ReconstructionReport border_game(const std::vector<Square>& squares, int side,
                                 std::uint32_t replicas,
                                 const std::vector<std::uint32_t>& order);

}  // namespace detail

}  // namespace semint
