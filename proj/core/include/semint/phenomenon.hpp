#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semint/law.hpp"
#include "semint/painting.hpp"
#include "semint/rng.hpp"
#include "semint/view.hpp"

namespace semint {

// Raw value of one aspect before discretization: a real reading for
// measurable axes, a 1-based value index for categorical axes.
struct AspectValue {
    enum Kind { kReal, kCategory } kind = kReal;
    double real = 0.0;
    int category = 0;

    static AspectValue of_real(double v) { return {kReal, v, 0}; }
    static AspectValue of_category(int index) { return {kCategory, 0.0, index}; }
};

using Sample = std::map<std::string, AspectValue>;

// Exact discrete sampler over rational weights summing to 1. The draw maps
// a uniform integer below the common denominator through cumulative
// numerators, so masses are hit exactly.
class WeightedSampler {
public:
    explicit WeightedSampler(const std::vector<Rational>& weights);
    std::size_t draw(Rng& rng) const;
    std::size_t size() const { return cumulative_.size(); }

private:
    std::uint64_t denominator_ = 1;
    std::vector<std::uint64_t> cumulative_;
};

// One-shot convenience wrapper around WeightedSampler.
std::size_t draw_by_weights(const std::vector<Rational>& weights, Rng& rng);

// A repeatable random phenomenon observed through a label view and a
// complexified view that refines it. Ground truth and support enumeration
// exist for oracles and comparison tables only; estimators never read them.
class RandomPhenomenon {
public:
    virtual ~RandomPhenomenon() = default;

    virtual const View& label_view() const = 0;
    virtual const View& complexified_view() const = 0;
    virtual Sample sample(Rng& rng) const = 0;

    // Label of one fresh trial; consumes the same stream as sample().
    virtual std::string sample_label(Rng& rng) const { return label_of(sample(rng)); }

    virtual const ProbabilityLaw* ground_truth() const { return nullptr; }
    virtual std::vector<Sample> complexified_support() const { return {}; }

    // Ordered refinement stages for oscillation analysis; stage 0 is the
    // label view itself.
    virtual int refinement_stage_count() const { return 0; }
    virtual std::vector<std::string> universe_at_stage(int stage) const;
    virtual std::string stage_label(const Sample& s, int stage) const;

    // The single categorical axis of the label view.
    const AspectAxis& label_axis() const;
    std::string label_of(const Sample& s) const;
};

// Tabletop die throw: categorical face, spatial landing position inside a
// rectangular zone, orientation angle. Faces, position cell, and orientation
// cell are drawn independently unless coupled weights are set, in which case
// the right half of the zone (by x cell) uses its own face weights.
struct DiceConfig {
    std::vector<Rational> face_weights;  // six weights summing to 1
    double zone_x0 = 0.0, zone_x1 = 50.0;
    double zone_y0 = 0.0, zone_y1 = 50.0;
    double position_unit = 5.0;
    double orientation_unit = 5.0;
    std::optional<std::vector<Rational>> right_face_weights;
};

class DicePhenomenon : public RandomPhenomenon {
public:
    explicit DicePhenomenon(DiceConfig cfg);

    const View& label_view() const override { return label_view_; }
    const View& complexified_view() const override { return complexified_view_; }
    Sample sample(Rng& rng) const override;
    std::string sample_label(Rng& rng) const override;
    const ProbabilityLaw* ground_truth() const override { return &truth_; }
    std::vector<Sample> complexified_support() const override;

    const DiceConfig& config() const { return cfg_; }

private:
    int draw_cells(Rng& rng, int& yc, int& ac) const;  // returns x cell
    const WeightedSampler& sampler_for_x_cell(int x_cell) const;

    DiceConfig cfg_;
    View label_view_;
    View complexified_view_;
    ProbabilityLaw truth_;
    std::vector<WeightedSampler> face_samplers_;  // left (and right when coupled)
    int nx_ = 0, ny_ = 0, nalpha_ = 0, nx_left_ = 0;
};

// Urn of the painting's 100 squares, drawn uniformly with replacement.
// The complexified view individualizes every square (location and
// colour-form identity), so the factual composition is the ground truth.
class UrnPhenomenon : public RandomPhenomenon {
public:
    explicit UrnPhenomenon(Painting p);

    const View& label_view() const override { return label_view_; }
    const View& complexified_view() const override { return complexified_view_; }
    Sample sample(Rng& rng) const override;
    const ProbabilityLaw* ground_truth() const override { return &truth_; }
    std::vector<Sample> complexified_support() const override;

    const Painting& painting() const { return painting_; }

private:
    Sample sample_of_square(int index) const;

    Painting painting_;
    View label_view_;
    View complexified_view_;
    ProbabilityLaw truth_;
    std::vector<std::uint32_t> label_index_of_square_;
};

UrnPhenomenon urn_from_painting(Painting p);

// Fully specified discrete phenomenon: finest cells with exact masses, each
// carrying a label and an optional chain of refinement ids (path[t] names
// the cell's group at refinement stage t+1).
struct SyntheticCell {
    std::string id;
    std::string label;
    Rational mass;
    std::vector<std::string> path;
};

struct SyntheticConfig {
    std::vector<std::string> labels;
    std::vector<SyntheticCell> cells;
    int stages = 0;
    std::string label_axis_id = "r";
    std::string cell_axis_id = "cell";
};

class SyntheticPhenomenon : public RandomPhenomenon {
public:
    explicit SyntheticPhenomenon(SyntheticConfig cfg);

    const View& label_view() const override { return label_view_; }
    const View& complexified_view() const override { return complexified_view_; }
    Sample sample(Rng& rng) const override;
    std::string sample_label(Rng& rng) const override;
    const ProbabilityLaw* ground_truth() const override { return &truth_; }
    std::vector<Sample> complexified_support() const override;

    int refinement_stage_count() const override { return cfg_.stages; }
    std::vector<std::string> universe_at_stage(int stage) const override;
    std::string stage_label(const Sample& s, int stage) const override;

    const SyntheticConfig& config() const { return cfg_; }

private:
    SyntheticConfig cfg_;
    View label_view_;
    View complexified_view_;
    ProbabilityLaw truth_;
    std::optional<WeightedSampler> sampler_;
};

}  // namespace semint
