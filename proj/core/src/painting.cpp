#include "semint/painting.hpp"

#include <map>
#include <stdexcept>

#include "json.hpp"
#include "semint/rng.hpp"

namespace semint {

namespace {

int index_of(int x, int y) { return (y - 1) * Painting::kSide + (x - 1); }

bool in_frame(int x, int y) {
    return x >= 1 && x <= Painting::kSide && y >= 1 && y <= Painting::kSide;
}

// Offset to the neighbour a side faces, and the side seen from there.
constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};
constexpr Side kOpposite[4] = {kSouth, kWest, kNorth, kEast};

}  // namespace

const Square& Painting::at(int x, int y) const {
    if (!in_frame(x, y)) {
        throw std::out_of_range("square (" + std::to_string(x) + "," + std::to_string(y) +
                                ") outside the 10x10 frame");
    }
    return squares.at(index_of(x, y));
}

std::set<std::string> Painting::labels() const {
    std::set<std::string> out;
    for (const auto& s : squares) out.insert(s.ac);
    return out;
}

void Painting::validate() const {
    if (static_cast<int>(squares.size()) != kSquares) {
        throw std::invalid_argument("painting needs exactly 100 squares");
    }
    std::set<std::string> cphis;
    for (int y = 1; y <= kSide; ++y) {
        for (int x = 1; x <= kSide; ++x) {
            const Square& s = squares.at(index_of(x, y));
            if (s.x != x || s.y != y) {
                throw std::invalid_argument("square stored out of place at (" +
                                            std::to_string(x) + "," + std::to_string(y) + ")");
            }
            if (s.ac.empty()) throw std::invalid_argument("square with empty colour label");
            if (!cphis.insert(s.cphi).second) {
                throw std::invalid_argument("duplicate colour-form identity '" + s.cphi + "'");
            }
        }
    }
    std::size_t q = labels().size();
    if (q >= kSquares) {
        throw std::invalid_argument("painting must use fewer than 100 colours");
    }
    std::map<std::string, int> occurrences;
    for (const auto& s : squares) {
        for (int side = 0; side < 4; ++side) occurrences[s.border[side]]++;
    }
    for (const auto& s : squares) {
        for (int side = 0; side < 4; ++side) {
            const std::string& token = s.border[side];
            int nx = s.x + kDx[side];
            int ny = s.y + kDy[side];
            if (in_frame(nx, ny)) {
                const Square& n = squares.at(index_of(nx, ny));
                if (n.border[kOpposite[side]] != token) {
                    throw std::invalid_argument("edge token mismatch between (" +
                                                std::to_string(s.x) + "," + std::to_string(s.y) +
                                                ") and (" + std::to_string(nx) + "," +
                                                std::to_string(ny) + ")");
                }
                if (occurrences.at(token) != 2) {
                    throw std::invalid_argument("interior token '" + token +
                                                "' does not occur exactly twice");
                }
            } else if (occurrences.at(token) != 1) {
                throw std::invalid_argument("boundary token '" + token +
                                            "' does not occur exactly once");
            }
        }
    }
}

Painting generate_painting(std::uint64_t seed,
                           const std::vector<std::pair<std::string, int>>& colour_counts) {
    int total = 0;
    for (const auto& [label, count] : colour_counts) {
        if (label.empty()) throw std::invalid_argument("empty colour label");
        if (count <= 0) throw std::invalid_argument("colour count for '" + label +
                                                    "' must be positive");
        total += count;
    }
    if (total != Painting::kSquares) {
        throw std::invalid_argument("colour counts must sum to 100, got " +
                                    std::to_string(total));
    }
    if (colour_counts.size() >= Painting::kSquares) {
        throw std::invalid_argument("painting must use fewer than 100 colours");
    }

    Rng rng(seed);

    std::vector<std::string> colours;
    colours.reserve(Painting::kSquares);
    for (const auto& [label, count] : colour_counts) {
        for (int i = 0; i < count; ++i) colours.push_back(label);
    }
    rng.shuffle(colours);

    std::vector<int> cphi_ids(Painting::kSquares);
    for (int i = 0; i < Painting::kSquares; ++i) cphi_ids[i] = i;
    rng.shuffle(cphi_ids);

    // 90 vertical + 90 horizontal interior edges, 40 boundary edges.
    std::vector<int> interior_ids(180), boundary_ids(40);
    for (std::size_t i = 0; i < interior_ids.size(); ++i) interior_ids[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < boundary_ids.size(); ++i) boundary_ids[i] = static_cast<int>(i);
    rng.shuffle(interior_ids);
    rng.shuffle(boundary_ids);

    Painting p;
    p.squares.resize(Painting::kSquares);
    for (int y = 1; y <= Painting::kSide; ++y) {
        for (int x = 1; x <= Painting::kSide; ++x) {
            Square& s = p.squares.at(index_of(x, y));
            s.x = x;
            s.y = y;
            s.ac = colours.at(index_of(x, y));
            s.cphi = "f" + std::to_string(cphi_ids.at(index_of(x, y)));
        }
    }

    std::size_t next_interior = 0, next_boundary = 0;
    auto interior_token = [&] { return "i" + std::to_string(interior_ids.at(next_interior++)); };
    auto boundary_token = [&] { return "b" + std::to_string(boundary_ids.at(next_boundary++)); };

    for (int y = 1; y <= Painting::kSide; ++y) {
        for (int x = 1; x < Painting::kSide; ++x) {
            std::string t = interior_token();
            p.squares.at(index_of(x, y)).border[kEast] = t;
            p.squares.at(index_of(x + 1, y)).border[kWest] = t;
        }
    }
    for (int y = 1; y < Painting::kSide; ++y) {
        for (int x = 1; x <= Painting::kSide; ++x) {
            std::string t = interior_token();
            p.squares.at(index_of(x, y)).border[kNorth] = t;
            p.squares.at(index_of(x, y + 1)).border[kSouth] = t;
        }
    }
    for (int x = 1; x <= Painting::kSide; ++x) {
        p.squares.at(index_of(x, 1)).border[kSouth] = boundary_token();
        p.squares.at(index_of(x, Painting::kSide)).border[kNorth] = boundary_token();
    }
    for (int y = 1; y <= Painting::kSide; ++y) {
        p.squares.at(index_of(1, y)).border[kWest] = boundary_token();
        p.squares.at(index_of(Painting::kSide, y)).border[kEast] = boundary_token();
    }

    p.validate();
    return p;
}

ProbabilityLaw factual_law(const Painting& p) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& s : p.squares) counts[s.ac]++;
    std::vector<std::pair<std::string, std::uint64_t>> ordered(counts.begin(), counts.end());
    return law_from_counts(ordered);
}

std::string painting_to_json(const Painting& p) {
    nlohmann::json squares = nlohmann::json::array();
    for (const auto& s : p.squares) {
        squares.push_back({{"x", s.x},
                           {"y", s.y},
                           {"borders",
                            {{"n", s.border[kNorth]},
                             {"e", s.border[kEast]},
                             {"s", s.border[kSouth]},
                             {"w", s.border[kWest]}}},
                           {"ac", s.ac},
                           {"cphi", s.cphi}});
    }
    return nlohmann::json{{"squares", squares}}.dump(2);
}

Painting painting_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Painting p;
    p.squares.resize(Painting::kSquares);
    const auto& arr = j.at("squares");
    if (arr.size() != Painting::kSquares) {
        throw std::invalid_argument("painting JSON needs exactly 100 squares");
    }
    for (const auto& e : arr) {
        Square s;
        s.x = e.at("x").get<int>();
        s.y = e.at("y").get<int>();
        const auto& b = e.at("borders");
        s.border[kNorth] = b.at("n").get<std::string>();
        s.border[kEast] = b.at("e").get<std::string>();
        s.border[kSouth] = b.at("s").get<std::string>();
        s.border[kWest] = b.at("w").get<std::string>();
        s.ac = e.at("ac").get<std::string>();
        s.cphi = e.at("cphi").get<std::string>();
        if (!in_frame(s.x, s.y)) {
            throw std::invalid_argument("painting JSON square outside frame");
        }
        p.squares.at(index_of(s.x, s.y)) = s;
    }
    p.validate();
    return p;
}

}  // namespace semint
