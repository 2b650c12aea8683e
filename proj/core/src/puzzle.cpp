#include "semint/puzzle.hpp"

#include <optional>
#include <stdexcept>

#include "semint/rng.hpp"

namespace semint {

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};
constexpr Side kOpposite[4] = {kSouth, kWest, kNorth, kEast};

bool is_flat_edge(const std::string& token) { return !token.empty() && token[0] == 'b'; }

struct Grid {
    std::vector<std::optional<int>> piece;  // square index per slot
    std::vector<bool> has_form;             // colour-form already present
    int placed = 0;

    explicit Grid(int cells) : piece(cells), has_form(cells, false) {}
};

struct Board {
    const std::vector<Square>& squares;
    int side;

    int slot(int x, int y) const { return (y - 1) * side + (x - 1); }
    bool in_frame(int x, int y) const {
        return x >= 1 && x <= side && y >= 1 && y <= side;
    }

    // A slot accepts a piece when every side agrees with what is already
    // known: flat edges along the frame, token equality against placed
    // neighbours.
    bool fits(const Grid& g, int x, int y, const Square& s) const {
        for (int side_i = 0; side_i < 4; ++side_i) {
            int nx = x + kDx[side_i];
            int ny = y + kDy[side_i];
            if (!in_frame(nx, ny)) {
                if (!is_flat_edge(s.border[side_i])) return false;
                continue;
            }
            const auto& neighbour = g.piece[slot(nx, ny)];
            if (neighbour &&
                squares[*neighbour].border[kOpposite[side_i]] != s.border[side_i]) {
                return false;
            }
        }
        return true;
    }

    bool has_placed_neighbour(const Grid& g, int x, int y) const {
        for (int side_i = 0; side_i < 4; ++side_i) {
            int nx = x + kDx[side_i];
            int ny = y + kDy[side_i];
            if (in_frame(nx, ny) && g.piece[slot(nx, ny)]) return true;
        }
        return false;
    }
};

}  // namespace

namespace detail {

ReconstructionReport border_game(const std::vector<Square>& squares, int side,
                                 std::uint32_t replicas,
                                 const std::vector<std::uint32_t>& order) {
    if (side < 2) throw std::invalid_argument("border_game needs side >= 2");
    const int cells = side * side;
    if (static_cast<int>(squares.size()) != cells) {
        throw std::invalid_argument("square list does not cover the frame");
    }
    if (replicas == 0) throw std::invalid_argument("need at least one replica");
    if (order.size() != static_cast<std::size_t>(replicas) * cells) {
        throw std::invalid_argument("draw order must cover the whole pool");
    }

    Board board{squares, side};
    std::vector<bool> drawn(order.size(), false);
    std::vector<Grid> grids(replicas, Grid(cells));

    ReconstructionReport report;
    report.replicas = replicas;

    for (std::uint32_t instance : order) {
        if (instance >= order.size() || drawn[instance]) {
            throw std::invalid_argument("draw order is not a permutation of the pool");
        }
        drawn[instance] = true;
        ++report.extractions;
        int si = static_cast<int>(instance % cells);
        const Square& s = squares[si];

        bool placed = false;
        // Greedy matching against open frontier slots, lowest grid first.
        for (std::uint32_t k = 0; k < replicas && !placed; ++k) {
            Grid& g = grids[k];
            for (int y = 1; y <= side && !placed; ++y) {
                for (int x = 1; x <= side && !placed; ++x) {
                    int slot = board.slot(x, y);
                    if (g.piece[slot] || !board.has_placed_neighbour(g, x, y)) continue;
                    if (!board.fits(g, x, y, s)) {
                        ++report.misplacement_attempts;
                        continue;
                    }
                    if (g.has_form[si]) {
                        throw std::logic_error("duplicate colour-form accepted on one grid");
                    }
                    g.piece[slot] = si;
                    g.has_form[si] = true;
                    ++g.placed;
                    placed = true;
                }
            }
        }
        if (placed) continue;

        // No matching frontier anywhere: study the colour-form and seed a
        // new cluster on the lowest grid lacking it. Open slots scanned
        // before the recognised place count as attempts.
        for (std::uint32_t k = 0; k < replicas && !placed; ++k) {
            Grid& g = grids[k];
            if (g.has_form[si]) continue;
            for (int y = 1; y <= side && !placed; ++y) {
                for (int x = 1; x <= side && !placed; ++x) {
                    int slot = board.slot(x, y);
                    if (g.piece[slot]) continue;
                    if (x != s.x || y != s.y) {
                        ++report.misplacement_attempts;
                        continue;
                    }
                    g.piece[slot] = si;
                    g.has_form[si] = true;
                    ++g.placed;
                    placed = true;
                }
            }
            break;
        }
        if (!placed) throw std::logic_error("piece could not be placed anywhere");
    }

    report.complete = true;
    report.grids_match_source = true;
    for (const Grid& g : grids) {
        if (g.placed != cells) report.complete = false;
        for (int i = 0; i < cells; ++i) {
            if (!g.piece[i] || *g.piece[i] != i) report.grids_match_source = false;
        }
    }
    return report;
}

}  // namespace detail

ReconstructionReport reconstruct_by_coordinates(const Painting& p, std::uint64_t seed) {
    p.validate();
    Rng rng(seed);
    std::vector<std::uint32_t> pool(Painting::kSquares);
    for (int i = 0; i < Painting::kSquares; ++i) pool[i] = static_cast<std::uint32_t>(i);
    rng.shuffle(pool);

    std::vector<std::optional<int>> grid(Painting::kSquares);
    ReconstructionReport report;
    report.replicas = 1;
    for (std::uint32_t si : pool) {
        const Square& s = p.squares[si];
        ++report.extractions;
        int slot = (s.y - 1) * Painting::kSide + (s.x - 1);
        if (grid[slot]) throw std::logic_error("coordinate slot already occupied");
        grid[slot] = static_cast<int>(si);
    }
    report.complete = true;
    report.grids_match_source = true;
    for (int i = 0; i < Painting::kSquares; ++i) {
        if (!grid[i] || *grid[i] != i) {
            report.complete = false;
            report.grids_match_source = false;
        }
    }
    return report;
}

ReconstructionReport reconstruct_by_borders_in_order(const Painting& p, std::uint32_t replicas,
                                                     const std::vector<std::uint32_t>& order) {
    p.validate();
    return detail::border_game(p.squares, Painting::kSide, replicas, order);
}

ReconstructionReport reconstruct_by_borders(const Painting& p, std::uint32_t replicas,
                                            std::uint64_t seed) {
    std::vector<std::uint32_t> order(static_cast<std::size_t>(replicas) * Painting::kSquares);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    rng.shuffle(order);
    return reconstruct_by_borders_in_order(p, replicas, order);
}

TrialTrace probability_game(const Painting& p, std::uint64_t draws, std::uint64_t seed) {
    p.validate();
    if (draws == 0) throw std::invalid_argument("probability_game needs at least one draw");
    TrialTrace trace;
    for (const auto& label : p.labels()) trace.universe.push_back(label);

    std::vector<std::uint32_t> label_of_square(Painting::kSquares);
    for (int i = 0; i < Painting::kSquares; ++i) {
        label_of_square[i] = trace.label_index(p.squares[i].ac);
    }

    Rng rng(seed);
    trace.records.reserve(draws);
    for (std::uint64_t i = 0; i < draws; ++i) {
        auto si = static_cast<std::size_t>(rng.below(Painting::kSquares));
        trace.records.push_back(TrialRecord{label_of_square[si], kNoCell, 0});
    }
    return trace;
}

}  // namespace semint
