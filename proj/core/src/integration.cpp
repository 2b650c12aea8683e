#include "semint/integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace semint {

namespace {

AspectAxis inflate_axis(const AspectAxis& axis, double inflation) {
    if (axis.kind != AxisKind::kMeasurable || !axis.spatial) return axis;
    double span = axis.upper - axis.lower;
    double margin = (inflation - 1.0) / 2.0 * span;
    auto margin_units =
        static_cast<int>(std::ceil(margin / axis.unit - 1e-9));
    if (margin_units < 1) margin_units = 1;
    AspectAxis widened = axis;
    widened.lower = axis.lower - margin_units * axis.unit;
    widened.upper = axis.upper + margin_units * axis.unit;
    return widened;
}

}  // namespace

PointsGrid::PointsGrid(const View& complexified, double inflation) : inflation_(inflation) {
    complexified.validate();
    if (!(inflation >= 1.5)) {
        throw std::invalid_argument("points grid inflation must be at least 1.5");
    }
    axes_ = View{};
    for (const auto& axis : complexified.axes) {
        axes_.axes.push_back(inflate_axis(axis, inflation));
    }
    axes_.validate();

    strides_.assign(axes_.axes.size(), 1);
    cells_ = 1;
    for (std::size_t i = axes_.axes.size(); i-- > 0;) {
        strides_[i] = cells_;
        auto bins = static_cast<std::uint64_t>(axes_.axes[i].bin_count());
        if (bins == 0 || cells_ > std::numeric_limits<std::uint64_t>::max() / bins) {
            throw std::invalid_argument("points grid too large");
        }
        cells_ *= bins;
    }
}

Description PointsGrid::discretize_sample(const Sample& s) const {
    Description d;
    for (const auto& axis : axes_.axes) {
        auto it = s.find(axis.id);
        if (it == s.end()) {
            throw std::invalid_argument("sample lacks a value for axis '" + axis.id + "'");
        }
        const AspectValue& v = it->second;
        if (axis.kind == AxisKind::kMeasurable) {
            if (v.kind != AspectValue::kReal) {
                throw std::invalid_argument("axis '" + axis.id + "' expects a real value");
            }
            try {
                d.bins[axis.id] = discretize(v.real, axis);
            } catch (const std::out_of_range& e) {
                throw InvariantError(std::string("grid bounds: ") + e.what());
            }
        } else {
            if (v.kind != AspectValue::kCategory) {
                throw std::invalid_argument("axis '" + axis.id + "' expects a category");
            }
            if (v.category < 1 || v.category > axis.bin_count()) {
                throw InvariantError("grid bounds: category " + std::to_string(v.category) +
                                     " outside axis '" + axis.id + "'");
            }
            d.bins[axis.id] = v.category;
        }
    }
    return d;
}

std::uint64_t PointsGrid::flatten(const Description& d) const {
    std::uint64_t cell = 0;
    for (std::size_t i = 0; i < axes_.axes.size(); ++i) {
        const AspectAxis& axis = axes_.axes[i];
        int bin = d.at(axis.id);
        if (bin < 1 || bin > axis.bin_count()) {
            throw InvariantError("grid bounds: bin " + std::to_string(bin) +
                                 " outside axis '" + axis.id + "'");
        }
        cell += static_cast<std::uint64_t>(bin - 1) * strides_[i];
    }
    return cell;
}

Description PointsGrid::unflatten(std::uint64_t cell) const {
    if (cell >= cells_) throw InvariantError("grid bounds: cell id out of range");
    Description d;
    for (std::size_t i = 0; i < axes_.axes.size(); ++i) {
        auto bins = static_cast<std::uint64_t>(axes_.axes[i].bin_count());
        d.bins[axes_.axes[i].id] = static_cast<int>((cell / strides_[i]) % bins) + 1;
    }
    return d;
}

int PointsGrid::axis_bin(std::uint64_t cell, const std::string& axis_id) const {
    if (cell >= cells_) throw InvariantError("grid bounds: cell id out of range");
    for (std::size_t i = 0; i < axes_.axes.size(); ++i) {
        if (axes_.axes[i].id == axis_id) {
            auto bins = static_cast<std::uint64_t>(axes_.axes[i].bin_count());
            return static_cast<int>((cell / strides_[i]) % bins) + 1;
        }
    }
    throw std::out_of_range("grid has no axis '" + axis_id + "'");
}

std::string PointsGrid::axis_value(std::uint64_t cell, const std::string& axis_id) const {
    const AspectAxis& axis = axes_.at(axis_id);
    int bin = axis_bin(cell, axis_id);
    if (axis.kind == AxisKind::kCategorical) return axis.values[bin - 1];
    return std::to_string(axis.representative(bin));
}

ReplicaSet::ReplicaSet(std::uint64_t cell_count) : cell_count_(cell_count) {
    if (cell_count == 0) throw std::invalid_argument("replica set needs at least one cell");
}

std::uint32_t ReplicaSet::place(std::uint64_t cell) {
    if (cell >= cell_count_) throw InvariantError("grid bounds: cell id out of range");
    CellState& st = states_[cell];
    ++st.depth;
    ++trial_placements_;
    return st.depth;
}

void ReplicaSet::mark_retroactive(std::uint64_t cell, std::uint32_t replicas) {
    if (cell >= cell_count_) throw InvariantError("grid bounds: cell id out of range");
    CellState& st = states_[cell];
    if (st.depth == 0) {
        throw InvariantError("retroactive marking of a cell that was never observed");
    }
    if (st.depth >= replicas) return;
    std::uint32_t granted = replicas - st.depth;
    st.depth = replicas;
    st.phantom += granted;
    phantom_slots_ += granted;
}

std::uint32_t ReplicaSet::depth(std::uint64_t cell) const {
    auto it = states_.find(cell);
    return it == states_.end() ? 0 : it->second.depth;
}

std::uint32_t ReplicaSet::trial_depth(std::uint64_t cell) const {
    auto it = states_.find(cell);
    return it == states_.end() ? 0 : it->second.depth - it->second.phantom;
}

bool ReplicaSet::occupied(std::uint32_t replica, std::uint64_t cell) const {
    if (replica == 0) throw std::invalid_argument("replica indices are 1-based");
    return depth(cell) >= replica;
}

std::uint32_t ReplicaSet::replica_count() const {
    std::uint32_t deepest = 0;
    for (const auto& [cell, st] : states_) deepest = std::max(deepest, st.depth);
    return deepest;
}

std::vector<std::uint64_t> ReplicaSet::occupied_cells() const {
    std::vector<std::uint64_t> out;
    out.reserve(states_.size());
    for (const auto& [cell, st] : states_) out.push_back(cell);
    return out;
}

std::uint32_t complete_replicas(const ReplicaSet& rs, const PointsForm& form) {
    if (form.cells.empty()) return 0;
    std::uint32_t k = std::numeric_limits<std::uint32_t>::max();
    for (std::uint64_t cell : form.cells) k = std::min(k, rs.depth(cell));
    return k;
}

void SaturationMonitor::observe(std::uint64_t trial, std::uint32_t replica,
                                std::uint64_t phi1_cells) {
    trials_ = trial;
    if (replica == 1) {
        last_new_phi1_ = trial;
    } else {
        last_deep_ = trial;
    }
    phi1_ = phi1_cells;
}

std::uint64_t SaturationMonitor::window() const {
    if (fixed_window_ > 0) return fixed_window_;
    std::uint64_t dynamic = 5 * phi1_;
    return dynamic > 500 ? dynamic : 500;
}

bool SaturationMonitor::saturated() const {
    if (phi1_ == 0 || last_new_phi1_ == 0 || last_deep_ == 0) return false;
    std::uint64_t w = window();
    if (trials_ - last_new_phi1_ < w) return false;
    return last_deep_ + w > trials_;
}

bool retroactive_update(ReplicaSet& rs, PointsForm& form, const PointsGrid& grid,
                        const std::string& label_axis_id, std::uint64_t cell) {
    if (std::binary_search(form.cells.begin(), form.cells.end(), cell)) return false;
    std::uint32_t k = complete_replicas(rs, form);
    if (k > 0) rs.mark_retroactive(cell, k);
    form.cells.insert(std::upper_bound(form.cells.begin(), form.cells.end(), cell), cell);
    form.n_t += 1;
    form.n_r[grid.axis_value(cell, label_axis_id)] += 1;
    form.k = complete_replicas(rs, form);
    return true;
}

ProbabilityLaw support_ratio_estimate(const PointsForm& form, const View& label_view) {
    if (form.n_t == 0) throw InvariantError("support-ratio estimate over an empty form");
    if (label_view.axes.size() != 1 || label_view.axes[0].kind != AxisKind::kCategorical) {
        throw std::invalid_argument("label view must be a single categorical axis");
    }
    ProbabilityLaw law;
    for (const auto& value : label_view.axes[0].values) {
        auto it = form.n_r.find(value);
        std::uint64_t count = it == form.n_r.end() ? 0 : it->second;
        law.entries.emplace_back(value, Rational(BigInt(count), BigInt(form.n_t)));
    }
    law.validate();
    return law;
}

Decomposition decompose(const TrialTrace& trace, const ReplicaSet& rs,
                        const PointsForm& form) {
    Decomposition d;
    d.n = trace.size();
    d.k = complete_replicas(rs, form);
    d.n_t = form.n_t;
    d.phantom_slots = rs.phantom_slots();
    d.n_prime = static_cast<std::int64_t>(d.n) -
                static_cast<std::int64_t>(d.k) * static_cast<std::int64_t>(d.n_t);

    std::vector<std::uint64_t> counts = trace.counts();
    for (std::size_t j = 0; j < trace.universe.size(); ++j) {
        const std::string& label = trace.universe[j];
        auto it = form.n_r.find(label);
        std::uint64_t n_r = it == form.n_r.end() ? 0 : it->second;
        std::int64_t n_prime_r = static_cast<std::int64_t>(counts[j]) -
                                 static_cast<std::int64_t>(d.k) * static_cast<std::int64_t>(n_r);
        d.per_label[label] = {n_r, n_prime_r};
    }

    if (d.phantom_slots == 0) {
        // Without phantom slots the remainder must recount exactly as the
        // trials placed beyond replica k.
        std::uint64_t beyond = 0;
        for (const auto& r : trace.records) {
            if (r.replica > d.k) ++beyond;
        }
        if (static_cast<std::int64_t>(beyond) != d.n_prime) {
            throw InvariantError("decomposition remainder disagrees with the trace recount");
        }
    }
    return d;
}

ResidualComparison residual_difference(std::uint32_t k, std::uint64_t n_t, std::uint64_t n_r,
                                       std::int64_t n_prime, std::int64_t n_prime_r) {
    if (n_t == 0) throw std::invalid_argument("residual_difference needs n_t >= 1");
    BigInt K(k), NT(n_t), NR(n_r), NP(n_prime), NPR(n_prime_r);
    BigInt total = K * NT + NP;  // the trial count n
    if (total <= 0) throw std::invalid_argument("residual_difference needs k*n_t + n_prime >= 1");

    ResidualComparison out;
    Rational running(K * NR + NPR, total);
    Rational ratio(NR, NT);
    out.direct = rational_abs(running - ratio);
    out.reduced = Rational(boost::multiprecision::abs(NT * NPR - NR * NP),
                           K * NT * NT + NT * NP);
    return out;
}

SemintResult run_semint(const RandomPhenomenon& ph, const SemintConfig& cfg,
                        std::uint64_t seed) {
    if (cfg.max_trials == 0) throw std::invalid_argument("max_trials must be positive");

    PointsGrid grid(ph.complexified_view(), cfg.inflation);
    ReplicaSet rs(grid.cell_count());
    SaturationMonitor monitor(cfg.window);
    Rng rng(seed);

    const AspectAxis& label_axis = ph.label_axis();

    TrialTrace trace;
    trace.universe = label_axis.values;

    PointsForm form;
    bool ever_saturated = false;
    bool currently_saturated = false;
    std::uint64_t saturation_trial = 0;
    std::uint32_t retro_events = 0;

    for (std::uint64_t trial = 1; trial <= cfg.max_trials; ++trial) {
        Sample s = ph.sample(rng);
        Description d = grid.discretize_sample(s);
        std::uint64_t cell = grid.flatten(d);
        auto label_idx = static_cast<std::uint32_t>(s.at(label_axis.id).category - 1);

        bool novel = rs.depth(cell) == 0;
        std::uint32_t replica = rs.place(cell);
        trace.records.push_back(TrialRecord{label_idx, cell, replica});

        if (novel && ever_saturated) {
            retroactive_update(rs, form, grid, label_axis.id, cell);
            ++retro_events;
            currently_saturated = false;  // the clock restarts with the larger form
        }

        monitor.observe(trial, replica, rs.occupied_cell_count());

        if (!currently_saturated && monitor.saturated()) {
            currently_saturated = true;
            saturation_trial = trial;
            if (!ever_saturated) {
                ever_saturated = true;
                form.cells = rs.occupied_cells();
                form.n_t = form.cells.size();
                for (std::uint64_t c : form.cells) {
                    form.n_r[grid.axis_value(c, label_axis.id)] += 1;
                }
            }
        }

        if (currently_saturated) {
            if (cfg.stop_at_replica_boundary) {
                form.k = complete_replicas(rs, form);
                if (trial == static_cast<std::uint64_t>(form.k) * form.n_t) break;
            } else if (trial >= saturation_trial + cfg.post_saturation_trials) {
                break;
            }
        }
    }

    if (!ever_saturated) {
        // Cap reached first: expose the current occupancy, flagged unsaturated.
        form.cells = rs.occupied_cells();
        form.n_t = form.cells.size();
        for (std::uint64_t c : form.cells) {
            form.n_r[grid.axis_value(c, label_axis.id)] += 1;
        }
    }
    form.k = complete_replicas(rs, form);

    SemintResult result{std::move(grid), std::move(rs),     std::move(form),
                        std::move(trace), label_axis.id,     currently_saturated,
                        saturation_trial, retro_events,      ProbabilityLaw{},
                        Decomposition{}};
    result.estimate = support_ratio_estimate(result.form, ph.label_view());
    result.decomposition = decompose(result.trace, result.replicas, result.form);
    return result;
}

std::string semint_report_json(const SemintResult& result) {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : result.grid.axes().axes) {
        nlohmann::json ja{{"id", a.id}, {"bins", a.bin_count()}};
        if (a.kind == AxisKind::kMeasurable) {
            ja["kind"] = "measurable";
            ja["lower"] = a.lower;
            ja["upper"] = a.upper;
            ja["unit"] = a.unit;
            ja["spatial"] = a.spatial;
        } else {
            ja["kind"] = "categorical";
            ja["values"] = a.values;
        }
        axes.push_back(std::move(ja));
    }

    nlohmann::json form_labels = nlohmann::json::array();
    for (const auto& [label, count] : result.form.n_r) {
        form_labels.push_back({{"label", label}, {"n_r", count}});
    }

    nlohmann::json estimate = nlohmann::json::array();
    for (const auto& [label, mass] : result.estimate.entries) {
        estimate.push_back({{"label", label},
                            {"num", numerator_of(mass).str()},
                            {"den", denominator_of(mass).str()}});
    }

    nlohmann::json per_label = nlohmann::json::array();
    for (const auto& [label, counts] : result.decomposition.per_label) {
        per_label.push_back(
            {{"label", label}, {"n_r", counts.first}, {"n_prime_r", counts.second}});
    }

    nlohmann::json saturation_trace = nlohmann::json::array();
    std::uint64_t phi1 = 0;
    for (std::size_t i = 0; i < result.trace.records.size(); ++i) {
        const auto& r = result.trace.records[i];
        if (r.replica == 1) ++phi1;
        saturation_trace.push_back({i + 1, r.replica, phi1});
    }

    nlohmann::json j{
        {"kind", "semint-run"},
        {"grid", {{"inflation", result.grid.inflation()},
                  {"cells", result.grid.cell_count()},
                  {"axes", axes}}},
        {"saturated", result.saturated},
        {"saturation_trial", result.saturation_trial},
        {"retro_events", result.retro_events},
        {"trials", result.trace.size()},
        {"form", {{"cells", result.form.cells},
                  {"k", result.form.k},
                  {"n_t", result.form.n_t},
                  {"labels", form_labels}}},
        {"estimate", estimate},
        {"decomposition", {{"n", result.decomposition.n},
                           {"k", result.decomposition.k},
                           {"n_t", result.decomposition.n_t},
                           {"n_prime", result.decomposition.n_prime},
                           {"phantom_slots", result.decomposition.phantom_slots},
                           {"per_label", per_label}}},
        {"saturation_trace", saturation_trace},
    };
    return j.dump(2);
}

}  // namespace semint
