#include "semint/phenomenon.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include <boost/integer/common_factor.hpp>

namespace semint {

WeightedSampler::WeightedSampler(const std::vector<Rational>& weights) {
    if (weights.empty()) throw std::invalid_argument("sampler needs weights");
    Rational total(0);
    BigInt common(1);
    for (const auto& w : weights) {
        if (w < 0) throw std::invalid_argument("negative weight");
        total += w;
        common = boost::integer::lcm(common, denominator_of(w));
    }
    if (total != 1) throw std::invalid_argument("weights must sum to 1");
    if (common > BigInt(std::numeric_limits<std::uint64_t>::max())) {
        throw std::invalid_argument("weight denominators too fine for exact sampling");
    }
    denominator_ = common.convert_to<std::uint64_t>();
    std::uint64_t cumulative = 0;
    for (const auto& w : weights) {
        BigInt scaled = numerator_of(w) * (common / denominator_of(w));
        cumulative += scaled.convert_to<std::uint64_t>();
        cumulative_.push_back(cumulative);
    }
}

std::size_t WeightedSampler::draw(Rng& rng) const {
    std::uint64_t u = rng.below(denominator_);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) throw std::logic_error("weight draw fell past the buckets");
    return static_cast<std::size_t>(it - cumulative_.begin());
}

std::size_t draw_by_weights(const std::vector<Rational>& weights, Rng& rng) {
    return WeightedSampler(weights).draw(rng);
}

std::vector<std::string> RandomPhenomenon::universe_at_stage(int stage) const {
    if (stage != 0) {
        throw std::out_of_range("phenomenon has no refinement stage " + std::to_string(stage));
    }
    return label_axis().values;
}

std::string RandomPhenomenon::stage_label(const Sample& s, int stage) const {
    if (stage != 0) {
        throw std::out_of_range("phenomenon has no refinement stage " + std::to_string(stage));
    }
    return label_of(s);
}

const AspectAxis& RandomPhenomenon::label_axis() const {
    const View& v = label_view();
    if (v.axes.size() != 1 || v.axes[0].kind != AxisKind::kCategorical) {
        throw std::logic_error("label view must be a single categorical axis");
    }
    return v.axes[0];
}

std::string RandomPhenomenon::label_of(const Sample& s) const {
    const AspectAxis& axis = label_axis();
    auto it = s.find(axis.id);
    if (it == s.end() || it->second.kind != AspectValue::kCategory) {
        throw std::invalid_argument("sample lacks categorical value for axis '" + axis.id + "'");
    }
    int index = it->second.category;
    if (index < 1 || index > static_cast<int>(axis.values.size())) {
        throw std::out_of_range("sample category outside axis '" + axis.id + "'");
    }
    return axis.values[index - 1];
}

namespace {

void check_weight_vector(const std::vector<Rational>& w, std::size_t expected,
                         const std::string& what) {
    if (w.size() != expected) {
        throw std::invalid_argument(what + " needs exactly " + std::to_string(expected) +
                                    " weights");
    }
    Rational total(0);
    for (const auto& x : w) {
        if (x < 0) throw std::invalid_argument(what + " has a negative weight");
        total += x;
    }
    if (total != 1) throw std::invalid_argument(what + " weights must sum to 1");
}

double cell_lower(const AspectAxis& axis, int bin) {
    return axis.lower + (bin - 1) * axis.unit;
}

}  // namespace

DicePhenomenon::DicePhenomenon(DiceConfig cfg) : cfg_(std::move(cfg)) {
    check_weight_vector(cfg_.face_weights, 6, "face law");
    if (cfg_.right_face_weights) {
        check_weight_vector(*cfg_.right_face_weights, 6, "right-half face law");
    }

    AspectAxis face = AspectAxis::categorical("face", {"1", "2", "3", "4", "5", "6"});
    AspectAxis x = AspectAxis::measurable("x", cfg_.zone_x0, cfg_.zone_x1,
                                          cfg_.position_unit, /*spatial=*/true);
    AspectAxis y = AspectAxis::measurable("y", cfg_.zone_y0, cfg_.zone_y1,
                                          cfg_.position_unit, /*spatial=*/true);
    AspectAxis alpha = AspectAxis::measurable("alpha", 0.0, 360.0, cfg_.orientation_unit);

    label_view_ = View{{face}};
    complexified_view_ = View{{face, x, y, alpha}};
    complexified_view_.validate();

    nx_ = x.bin_count();
    ny_ = y.bin_count();
    nalpha_ = alpha.bin_count();
    nx_left_ = nx_;
    face_samplers_.emplace_back(cfg_.face_weights);
    if (cfg_.right_face_weights) {
        if (nx_ < 2) {
            throw std::invalid_argument("coupled face weights need at least two x cells");
        }
        nx_left_ = nx_ / 2;
        face_samplers_.emplace_back(*cfg_.right_face_weights);
    }

    // Exact face law marginalized over the uniform position cells.
    truth_ = ProbabilityLaw{};
    for (int f = 0; f < 6; ++f) {
        Rational mass;
        if (cfg_.right_face_weights) {
            mass = (Rational(nx_left_) * cfg_.face_weights[f] +
                    Rational(nx_ - nx_left_) * (*cfg_.right_face_weights)[f]) /
                   Rational(nx_);
        } else {
            mass = cfg_.face_weights[f];
        }
        truth_.entries.emplace_back(face.values[f], mass);
    }
    truth_.validate();
}

const WeightedSampler& DicePhenomenon::sampler_for_x_cell(int x_cell) const {
    if (cfg_.right_face_weights && x_cell > nx_left_) return face_samplers_[1];
    return face_samplers_[0];
}

int DicePhenomenon::draw_cells(Rng& rng, int& yc, int& ac) const {
    int xc = 1 + static_cast<int>(rng.below(nx_));
    yc = 1 + static_cast<int>(rng.below(ny_));
    ac = 1 + static_cast<int>(rng.below(nalpha_));
    return xc;
}

std::string DicePhenomenon::sample_label(Rng& rng) const {
    int yc = 0, ac = 0;
    int xc = draw_cells(rng, yc, ac);
    std::size_t face = sampler_for_x_cell(xc).draw(rng);
    return label_view_.axes[0].values[face];
}

Sample DicePhenomenon::sample(Rng& rng) const {
    const AspectAxis& x = complexified_view_.at("x");
    const AspectAxis& y = complexified_view_.at("y");
    const AspectAxis& alpha = complexified_view_.at("alpha");

    int yc = 0, ac = 0;
    int xc = draw_cells(rng, yc, ac);
    int face = 1 + static_cast<int>(sampler_for_x_cell(xc).draw(rng));

    Sample s;
    s["face"] = AspectValue::of_category(face);
    s["x"] = AspectValue::of_real(
        rng.in_upper_open_interval(cell_lower(x, xc), x.representative(xc)));
    s["y"] = AspectValue::of_real(
        rng.in_upper_open_interval(cell_lower(y, yc), y.representative(yc)));
    s["alpha"] = AspectValue::of_real(
        rng.in_upper_open_interval(cell_lower(alpha, ac), alpha.representative(ac)));
    return s;
}

std::vector<Sample> DicePhenomenon::complexified_support() const {
    const AspectAxis& x = complexified_view_.at("x");
    const AspectAxis& y = complexified_view_.at("y");
    const AspectAxis& alpha = complexified_view_.at("alpha");
    std::vector<Sample> out;
    for (int xc = 1; xc <= nx_; ++xc) {
        const auto& w = (cfg_.right_face_weights && xc > nx_left_) ? *cfg_.right_face_weights
                                                                   : cfg_.face_weights;
        for (int f = 0; f < 6; ++f) {
            if (w[f] == 0) continue;
            for (int yc = 1; yc <= ny_; ++yc) {
                for (int ac = 1; ac <= nalpha_; ++ac) {
                    Sample s;
                    s["face"] = AspectValue::of_category(f + 1);
                    s["x"] = AspectValue::of_real(x.representative(xc));
                    s["y"] = AspectValue::of_real(y.representative(yc));
                    s["alpha"] = AspectValue::of_real(alpha.representative(ac));
                    out.push_back(std::move(s));
                }
            }
        }
    }
    return out;
}

UrnPhenomenon::UrnPhenomenon(Painting p) : painting_(std::move(p)) {
    painting_.validate();

    std::vector<std::string> labels;
    for (const auto& l : painting_.labels()) labels.push_back(l);
    AspectAxis ac = AspectAxis::categorical("ac", labels);

    std::vector<std::string> coords;
    for (int i = 1; i <= Painting::kSide; ++i) coords.push_back(std::to_string(i));
    std::vector<std::string> cphis;
    for (const auto& s : painting_.squares) cphis.push_back(s.cphi);

    label_view_ = View{{ac}};
    complexified_view_ = View{{ac, AspectAxis::categorical("x", coords),
                               AspectAxis::categorical("y", coords),
                               AspectAxis::categorical("cphi", cphis)}};
    complexified_view_.validate();

    truth_ = factual_law(painting_);
    label_index_of_square_.resize(Painting::kSquares);
    for (int i = 0; i < Painting::kSquares; ++i) {
        label_index_of_square_[i] = static_cast<std::uint32_t>(ac.value_index(
            painting_.squares[i].ac));
    }
}

Sample UrnPhenomenon::sample_of_square(int index) const {
    const Square& sq = painting_.squares.at(index);
    Sample s;
    s["ac"] = AspectValue::of_category(static_cast<int>(label_index_of_square_[index]));
    s["x"] = AspectValue::of_category(sq.x);
    s["y"] = AspectValue::of_category(sq.y);
    s["cphi"] = AspectValue::of_category(index + 1);  // cphi values listed row-major
    return s;
}

Sample UrnPhenomenon::sample(Rng& rng) const {
    return sample_of_square(static_cast<int>(rng.below(Painting::kSquares)));
}

std::vector<Sample> UrnPhenomenon::complexified_support() const {
    std::vector<Sample> out;
    out.reserve(Painting::kSquares);
    for (int i = 0; i < Painting::kSquares; ++i) out.push_back(sample_of_square(i));
    return out;
}

UrnPhenomenon urn_from_painting(Painting p) { return UrnPhenomenon(std::move(p)); }

SyntheticPhenomenon::SyntheticPhenomenon(SyntheticConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.labels.empty()) throw std::invalid_argument("synthetic labels missing");
    if (cfg_.cells.empty()) throw std::invalid_argument("synthetic cells missing");
    if (cfg_.stages < 0) throw std::invalid_argument("negative refinement stage count");

    AspectAxis label_axis = AspectAxis::categorical(cfg_.label_axis_id, cfg_.labels);
    std::vector<std::string> ids;
    Rational total(0);
    std::set<std::string> seen;
    for (const auto& c : cfg_.cells) {
        if (!seen.insert(c.id).second) {
            throw std::invalid_argument("duplicate synthetic cell id '" + c.id + "'");
        }
        label_axis.value_index(c.label);  // throws on unknown label
        if (c.mass <= 0) {
            throw std::invalid_argument("cell '" + c.id + "' needs positive mass");
        }
        if (static_cast<int>(c.path.size()) != cfg_.stages) {
            throw std::invalid_argument("cell '" + c.id + "' path must have one id per stage");
        }
        total += c.mass;
        ids.push_back(c.id);
    }
    if (total != 1) throw std::invalid_argument("synthetic cell masses must sum to 1");

    // Each stage must refine the previous one: group ids map to a single
    // parent and the universe strictly grows.
    for (int t = 0; t <= cfg_.stages; ++t) {
        std::map<std::string, std::string> parent;
        for (const auto& c : cfg_.cells) {
            std::string id = t == 0 ? c.label : c.path[t - 1];
            std::string up = t <= 1 ? c.label : c.path[t - 2];
            auto [it, inserted] = parent.emplace(id, up);
            if (!inserted && it->second != up) {
                throw std::invalid_argument("stage id '" + id + "' refines two parents");
            }
        }
        if (t > 0 && parent.size() <= universe_at_stage(t - 1).size()) {
            throw std::invalid_argument("refinement stage " + std::to_string(t) +
                                        " does not strictly refine the universe");
        }
    }

    label_view_ = View{{label_axis}};
    complexified_view_ = View{{label_axis, AspectAxis::categorical(cfg_.cell_axis_id, ids)}};
    complexified_view_.validate();

    std::vector<Rational> weights;
    for (const auto& c : cfg_.cells) weights.push_back(c.mass);
    sampler_.emplace(weights);

    std::map<std::string, Rational> per_label;
    for (const auto& c : cfg_.cells) per_label[c.label] += c.mass;
    truth_ = ProbabilityLaw{};
    for (const auto& l : cfg_.labels) {
        auto it = per_label.find(l);
        truth_.entries.emplace_back(l, it == per_label.end() ? Rational(0) : it->second);
    }
    truth_.validate();
}

Sample SyntheticPhenomenon::sample(Rng& rng) const {
    std::size_t idx = sampler_->draw(rng);
    const SyntheticCell& c = cfg_.cells[idx];
    Sample s;
    s[cfg_.label_axis_id] =
        AspectValue::of_category(label_view_.axes[0].value_index(c.label));
    s[cfg_.cell_axis_id] = AspectValue::of_category(static_cast<int>(idx) + 1);
    return s;
}

std::string SyntheticPhenomenon::sample_label(Rng& rng) const {
    return cfg_.cells[sampler_->draw(rng)].label;
}

std::vector<Sample> SyntheticPhenomenon::complexified_support() const {
    std::vector<Sample> out;
    out.reserve(cfg_.cells.size());
    for (std::size_t i = 0; i < cfg_.cells.size(); ++i) {
        const SyntheticCell& c = cfg_.cells[i];
        Sample s;
        s[cfg_.label_axis_id] =
            AspectValue::of_category(label_view_.axes[0].value_index(c.label));
        s[cfg_.cell_axis_id] = AspectValue::of_category(static_cast<int>(i) + 1);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> SyntheticPhenomenon::universe_at_stage(int stage) const {
    if (stage == 0) return cfg_.labels;
    if (stage < 0 || stage > cfg_.stages) {
        throw std::out_of_range("no refinement stage " + std::to_string(stage));
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& c : cfg_.cells) {
        const std::string& id = c.path[stage - 1];
        if (seen.insert(id).second) out.push_back(id);
    }
    return out;
}

std::string SyntheticPhenomenon::stage_label(const Sample& s, int stage) const {
    if (stage == 0) return label_of(s);
    if (stage < 0 || stage > cfg_.stages) {
        throw std::out_of_range("no refinement stage " + std::to_string(stage));
    }
    auto it = s.find(cfg_.cell_axis_id);
    if (it == s.end() || it->second.kind != AspectValue::kCategory) {
        throw std::invalid_argument("sample lacks cell value");
    }
    return cfg_.cells.at(it->second.category - 1).path[stage - 1];
}

}  // namespace semint
