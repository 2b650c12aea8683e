#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semint/law.hpp"
#include "semint/phenomenon.hpp"
#include "semint/trace.hpp"
#include "semint/view.hpp"

namespace semint {

// Thrown when a run breaks a structural invariant (for example a sample
// falling outside the points grid, which indicates a mis-specified zone).
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite grid of points over a complexified view. Spatial axes are widened
// beyond the declared zone by the inflation factor (at least 1.5), snapped
// outward to whole units, so a form never touches the grid edge and its
// delimitation stays visible.
class PointsGrid {
public:
    explicit PointsGrid(const View& complexified, double inflation = 1.5);

    const View& axes() const { return axes_; }
    double inflation() const { return inflation_; }
    std::uint64_t cell_count() const { return cells_; }

    // Raw sample values -> grid bins. A value outside the inflated bounds
    // is an InvariantError.
    Description discretize_sample(const Sample& s) const;

    std::uint64_t flatten(const Description& d) const;
    Description unflatten(std::uint64_t cell) const;
    int axis_bin(std::uint64_t cell, const std::string& axis_id) const;
    std::string axis_value(std::uint64_t cell, const std::string& axis_id) const;

private:
    View axes_;
    double inflation_ = 1.5;
    std::vector<std::uint64_t> strides_;
    std::uint64_t cells_ = 1;
};

// Stack of replicas of the grid. A trial occupies the cell on the lowest
// replica where it is still free, so per-cell occupancy is contiguous from
// replica 1 upward and a depth per cell encodes the whole stack.
class ReplicaSet {
public:
    explicit ReplicaSet(std::uint64_t cell_count);

    // Occupies `cell` on the lowest free replica and returns its 1-based
    // index, appending a fresh replica when all existing ones are full.
    std::uint32_t place(std::uint64_t cell);

    // Grants occupancy up to `replicas` on a cell without consuming trials
    // (reproduction of a late novel cell on the already complete replicas).
    void mark_retroactive(std::uint64_t cell, std::uint32_t replicas);

    std::uint32_t depth(std::uint64_t cell) const;        // includes phantom slots
    std::uint32_t trial_depth(std::uint64_t cell) const;  // trial-backed only
    bool occupied(std::uint32_t replica, std::uint64_t cell) const;
    std::uint32_t replica_count() const;
    std::vector<std::uint64_t> occupied_cells() const;  // ascending cell id
    std::uint64_t occupied_cell_count() const { return states_.size(); }
    std::uint64_t trial_placements() const { return trial_placements_; }
    std::uint64_t phantom_slots() const { return phantom_slots_; }

private:
    struct CellState {
        std::uint32_t depth = 0;
        std::uint32_t phantom = 0;
    };

    std::uint64_t cell_count_;
    std::map<std::uint64_t, CellState> states_;
    std::uint64_t trial_placements_ = 0;
    std::uint64_t phantom_slots_ = 0;
};

// The completed points-form: the cells of replica 1 once saturation holds,
// with the label share of its cells.
struct PointsForm {
    std::vector<std::uint64_t> cells;          // ascending flat ids
    std::uint32_t k = 0;                       // replicas identical to the form
    std::uint64_t n_t = 0;                     // cells per replica
    std::map<std::string, std::uint64_t> n_r;  // cells carrying each label
};

// Number of replicas whose occupancy equals the form's cell set.
std::uint32_t complete_replicas(const ReplicaSet& rs, const PointsForm& form);

// Watches the run for saturation: replica 1 unchanged across the window
// while later replicas keep filling. A zero window means the dynamic
// default max(5 * |replica-1 cells|, 500).
class SaturationMonitor {
public:
    explicit SaturationMonitor(std::uint64_t fixed_window = 0)
        : fixed_window_(fixed_window) {}

    void observe(std::uint64_t trial, std::uint32_t replica, std::uint64_t phi1_cells);
    std::uint64_t window() const;
    bool saturated() const;

private:
    std::uint64_t fixed_window_ = 0;
    std::uint64_t trials_ = 0;
    std::uint64_t last_new_phi1_ = 0;
    std::uint64_t last_deep_ = 0;
    std::uint64_t phi1_ = 0;
};

// Reproduces a late novel cell on every currently complete replica and adds
// it to the form. Returns false (and changes nothing) when the cell is
// already part of the form, so repeated injections never double-count.
bool retroactive_update(ReplicaSet& rs, PointsForm& form, const PointsGrid& grid,
                        const std::string& label_axis_id, std::uint64_t cell);

// Support-ratio estimate: mass(r) = n_r / n_T over the label axis values.
ProbabilityLaw support_ratio_estimate(const PointsForm& form, const View& label_view);

// Exact split of the trial count into complete replicas plus remainder:
// n = k*n_t + n_prime and, per label, n(r) = k*n_r + n_prime_r. Counts are
// recounted from the trace. Phantom slots granted by retroactive updates
// inflate k*n_t relative to the raw replica indices in the trace; without
// them n_prime equals the number of trials placed beyond replica k, which
// is verified here.
struct Decomposition {
    std::uint64_t n = 0;
    std::uint32_t k = 0;
    std::uint64_t n_t = 0;
    std::int64_t n_prime = 0;
    std::map<std::string, std::pair<std::uint64_t, std::int64_t>> per_label;  // n_r, n_prime_r
    std::uint64_t phantom_slots = 0;
};

Decomposition decompose(const TrialTrace& trace, const ReplicaSet& rs, const PointsForm& form);

// The deviation |n(r)/N - n_r/n_T| written two ways: directly from the
// decomposed counts, and reduced over the common denominator where the
// replica count only scales the denominator. The two are equal exactly;
// the reduced form shrinks strictly as k grows with residuals held fixed.
struct ResidualComparison {
    Rational direct;
    Rational reduced;
};

ResidualComparison residual_difference(std::uint32_t k, std::uint64_t n_t, std::uint64_t n_r,
                                       std::int64_t n_prime, std::int64_t n_prime_r);

struct SemintConfig {
    double inflation = 1.5;
    std::uint64_t window = 0;  // 0 -> dynamic default
    std::uint64_t max_trials = 100000;
    std::uint64_t post_saturation_trials = 0;
    bool stop_at_replica_boundary = false;  // stop once n == k*n_t holds exactly
};

struct SemintResult {
    PointsGrid grid;
    ReplicaSet replicas;
    PointsForm form;
    TrialTrace trace;
    std::string label_axis_id;
    bool saturated = false;
    std::uint64_t saturation_trial = 0;
    std::uint32_t retro_events = 0;
    ProbabilityLaw estimate;
    Decomposition decomposition;
};

// Samples the phenomenon until saturation holds (plus any configured
// post-saturation trials) or the trial cap is reached, maintaining the
// replica stack and the points-form along the way.
SemintResult run_semint(const RandomPhenomenon& ph, const SemintConfig& cfg,
                        std::uint64_t seed);

// Full run artifact as JSON text: grid shape, form cells, k, n_t, per-label
// counts, decomposition, and the estimate as exact num/den pairs.
std::string semint_report_json(const SemintResult& result);

}  // namespace semint
