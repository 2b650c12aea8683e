#include <cstdint>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "semint/integration.hpp"
#include "semint/phenomenon.hpp"

using namespace semint;

namespace {

View dice_like_view() {
    return View{{AspectAxis::categorical("face", {"1", "2", "3", "4", "5", "6"}),
                 AspectAxis::measurable("x", 0.0, 50.0, 5.0, true),
                 AspectAxis::measurable("y", 0.0, 50.0, 5.0, true),
                 AspectAxis::measurable("alpha", 0.0, 360.0, 5.0)}};
}

SyntheticConfig single_cell() {
    SyntheticConfig cfg;
    cfg.labels = {"only"};
    cfg.cells = {{"c", "only", Rational(1), {}}};
    return cfg;
}

SyntheticConfig twelve_cells() {
    // Labels A (4 cells) and B (8 cells) with non-uniform masses.
    SyntheticConfig cfg;
    cfg.labels = {"A", "B"};
    for (int i = 0; i < 4; ++i) {
        cfg.cells.push_back({"a" + std::to_string(i), "A", Rational(1, 10), {}});
    }
    for (int i = 0; i < 8; ++i) {
        cfg.cells.push_back({"b" + std::to_string(i), "B", Rational(3, 40), {}});
    }
    return cfg;
}

}  // namespace

TEST_CASE("points grid inflates spatial axes outward to whole units") {
    PointsGrid grid(dice_like_view(), 1.5);
    const AspectAxis& x = grid.axes().at("x");
    // margin 0.25 * 50 = 12.5 -> 3 whole units of 5.
    CHECK(x.lower == -15.0);
    CHECK(x.upper == 65.0);
    CHECK(x.bin_count() == 16);
    const AspectAxis& alpha = grid.axes().at("alpha");
    CHECK(alpha.lower == 0.0);  // non-spatial axes stay put
    CHECK(alpha.bin_count() == 72);
    CHECK(grid.axes().at("face").bin_count() == 6);
    CHECK(grid.cell_count() == 6ull * 16 * 16 * 72);
}

TEST_CASE("inflation below the contract is rejected") {
    CHECK_THROWS_AS(PointsGrid(dice_like_view(), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PointsGrid(dice_like_view(), 1.49), std::invalid_argument);
    CHECK_NOTHROW(PointsGrid(dice_like_view(), 2.0));
}

TEST_CASE("grid round trips cells through descriptions") {
    PointsGrid grid(dice_like_view());
    std::mt19937_64 mix(3);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t cell = mix() % grid.cell_count();
        Description d = grid.unflatten(cell);
        CHECK(grid.flatten(d) == cell);
        for (const auto& [axis, bin] : d.bins) CHECK(grid.axis_bin(cell, axis) == bin);
    }
    CHECK_THROWS_AS(grid.unflatten(grid.cell_count()), InvariantError);
}

TEST_CASE("grid discretizes samples and flags out-of-bound values") {
    PointsGrid grid(dice_like_view());
    Sample s;
    s["face"] = AspectValue::of_category(2);
    s["x"] = AspectValue::of_real(12.0);
    s["y"] = AspectValue::of_real(0.5);
    s["alpha"] = AspectValue::of_real(359.0);
    Description d = grid.discretize_sample(s);
    CHECK(d.at("face") == 2);
    // Zone bin 3 maps to inflated bin 3 + 3 margin units.
    CHECK(d.at("x") == 6);
    CHECK(d.at("y") == 4);
    CHECK(d.at("alpha") == 72);

    s["x"] = AspectValue::of_real(9000.0);
    CHECK_THROWS_AS(grid.discretize_sample(s), InvariantError);
    s["x"] = AspectValue::of_real(12.0);
    s.erase("alpha");
    CHECK_THROWS_AS(grid.discretize_sample(s), std::invalid_argument);
}

TEST_CASE("replica placement keeps per-cell occupancy contiguous") {
    ReplicaSet rs(10);
    CHECK(rs.place(4) == 1);
    CHECK(rs.place(4) == 2);
    CHECK(rs.place(4) == 3);
    CHECK(rs.place(7) == 1);
    CHECK(rs.depth(4) == 3);
    CHECK(rs.depth(7) == 1);
    CHECK(rs.depth(9) == 0);
    CHECK(rs.occupied(1, 4));
    CHECK(rs.occupied(3, 4));
    CHECK(!rs.occupied(4, 4));
    CHECK(!rs.occupied(1, 9));
    CHECK(rs.replica_count() == 3);
    CHECK(rs.occupied_cells() == std::vector<std::uint64_t>{4, 7});
    CHECK(rs.trial_placements() == 4);
    CHECK_THROWS_AS(rs.place(10), InvariantError);
    CHECK_THROWS_AS(rs.occupied(0, 4), std::invalid_argument);
}

TEST_CASE("retroactive marking grants phantom slots without trials") {
    ReplicaSet rs(10);
    rs.place(2);
    rs.place(2);
    rs.place(5);
    rs.mark_retroactive(5, 2);
    CHECK(rs.depth(5) == 2);
    CHECK(rs.trial_depth(5) == 1);
    CHECK(rs.phantom_slots() == 1);
    CHECK(rs.trial_placements() == 3);
    // Marking below the current depth changes nothing.
    rs.mark_retroactive(5, 1);
    CHECK(rs.phantom_slots() == 1);
    CHECK_THROWS_AS(rs.mark_retroactive(9, 2), InvariantError);
}

TEST_CASE("complete_replicas is the minimum depth over the form") {
    ReplicaSet rs(10);
    PointsForm form;
    CHECK(complete_replicas(rs, form) == 0);
    for (int i = 0; i < 3; ++i) rs.place(1);
    for (int i = 0; i < 2; ++i) rs.place(2);
    form.cells = {1, 2};
    CHECK(complete_replicas(rs, form) == 2);
    form.cells = {1, 2, 3};
    CHECK(complete_replicas(rs, form) == 0);
}

TEST_CASE("saturation needs a quiet first replica and active deeper ones") {
    SaturationMonitor m(10);
    CHECK(m.window() == 10);
    m.observe(1, 1, 1);
    CHECK(!m.saturated());
    for (std::uint64_t t = 2; t <= 10; ++t) {
        m.observe(t, 2, 1);
        CHECK(!m.saturated());
    }
    m.observe(11, 2, 1);
    CHECK(m.saturated());

    // A new first-replica cell resets the quiet clock.
    m.observe(12, 1, 2);
    CHECK(!m.saturated());
}

TEST_CASE("dynamic window scales with the first replica size") {
    SaturationMonitor m;
    m.observe(1, 1, 1);
    CHECK(m.window() == 500);
    m.observe(2, 1, 200);
    CHECK(m.window() == 1000);
}

TEST_CASE("saturation requires deep activity inside the window") {
    SaturationMonitor m(10);
    m.observe(1, 1, 1);
    m.observe(2, 2, 1);
    // Nothing deep for a long stretch afterwards: replica 1 alone is not
    // saturation evidence.
    m.observe(50, 1, 2);
    m.observe(70, 1, 3);
    CHECK(!m.saturated());
}

TEST_CASE("single-cell phenomenon saturates right after the fixed window") {
    SyntheticPhenomenon ph(single_cell());
    SemintConfig cfg;
    cfg.window = 10;
    SemintResult r = run_semint(ph, cfg, 1);
    CHECK(r.saturated);
    CHECK(r.saturation_trial == 11);
    CHECK(r.trace.size() == 11);
    CHECK(r.form.n_t == 1);
    CHECK(r.form.k == 11);
    CHECK(r.estimate.mass("only") == Rational(1));
    CHECK(r.decomposition.n == 11);
    CHECK(r.decomposition.n_prime == 0);
    CHECK(r.retro_events == 0);
}

TEST_CASE("support ratio covers labels with zero cells") {
    PointsForm form;
    form.n_t = 12;
    form.n_r = {{"A", 4}, {"B", 8}};
    View labels{{AspectAxis::categorical("r", {"A", "B", "C"})}};
    ProbabilityLaw law = support_ratio_estimate(form, labels);
    CHECK(law.mass("A") == Rational(1, 3));
    CHECK(law.mass("B") == Rational(2, 3));
    CHECK(law.mass("C") == Rational(0));
    CHECK_THROWS_AS(support_ratio_estimate(PointsForm{}, labels), InvariantError);
}

TEST_CASE("twelve-cell run decomposes exactly and estimates the support ratio") {
    SyntheticPhenomenon ph(twelve_cells());
    SemintConfig cfg;
    cfg.window = 200;
    cfg.post_saturation_trials = 500;
    SemintResult r = run_semint(ph, cfg, 8);
    REQUIRE(r.saturated);
    CHECK(r.form.n_t == 12);
    CHECK(r.estimate.mass("A") == Rational(4, 12));
    CHECK(r.estimate.mass("B") == Rational(8, 12));

    const Decomposition& d = r.decomposition;
    CHECK(d.n == r.trace.size());
    CHECK(static_cast<std::int64_t>(d.n) ==
          static_cast<std::int64_t>(d.k) * static_cast<std::int64_t>(d.n_t) + d.n_prime);
    for (const auto& [label, parts] : d.per_label) {
        std::int64_t recount = static_cast<std::int64_t>(r.trace.count_of(label));
        CHECK(recount == static_cast<std::int64_t>(d.k) *
                                 static_cast<std::int64_t>(parts.first) +
                             parts.second);
    }
    CHECK(d.phantom_slots == 0);
}

TEST_CASE("stopping at the replica boundary zeroes the remainder") {
    // Equal depths across the form recur fast only for small supports; two
    // uniform cells hit the boundary within a few trials of saturation.
    SyntheticConfig two;
    two.labels = {"A", "B"};
    two.cells = {{"a", "A", Rational(1, 2), {}}, {"b", "B", Rational(1, 2), {}}};
    SyntheticPhenomenon ph(two);
    SemintConfig cfg;
    cfg.window = 50;
    cfg.stop_at_replica_boundary = true;
    SemintResult r = run_semint(ph, cfg, 8);
    REQUIRE(r.saturated);
    CHECK(r.decomposition.n_prime == 0);
    CHECK(r.trace.size() ==
          static_cast<std::uint64_t>(r.form.k) * r.form.n_t);
    // With N' = 0 the running ratio equals the support ratio for every label.
    for (const auto& [label, parts] : r.decomposition.per_label) {
        ResidualComparison rc = residual_difference(r.form.k, r.form.n_t, parts.first,
                                                    0, parts.second);
        CHECK(rc.direct == rc.reduced);
        CHECK(parts.second == 0);
        CHECK(rc.direct == Rational(0));
    }
}

TEST_CASE("retroactive update is idempotent and preserves the replica count") {
    View v{{AspectAxis::categorical("r", {"A", "B"})}};
    // Grid over the label axis alone: 2 cells.
    PointsGrid grid(v);
    ReplicaSet rs(grid.cell_count());
    for (int i = 0; i < 3; ++i) rs.place(0);

    PointsForm form;
    form.cells = {0};
    form.n_t = 1;
    form.n_r = {{"A", 1}};
    form.k = complete_replicas(rs, form);
    REQUIRE(form.k == 3);

    rs.place(1);  // the late novel cell arrives as a real trial
    CHECK(retroactive_update(rs, form, grid, "r", 1));
    CHECK(form.n_t == 2);
    CHECK(form.k == 3);
    CHECK(rs.depth(1) == 3);
    CHECK(rs.trial_depth(1) == 1);
    CHECK(rs.phantom_slots() == 2);

    // Repeating the injection changes nothing.
    CHECK(!retroactive_update(rs, form, grid, "r", 1));
    CHECK(form.n_t == 2);
    CHECK(rs.phantom_slots() == 2);
    CHECK(form.n_r.at("B") == 1);
}

TEST_CASE("a rare cell triggers one retroactive update during a long run") {
    SyntheticConfig cfg;
    cfg.labels = {"A", "B"};
    cfg.cells = {{"a1", "A", Rational(4999, 10000), {}},
                 {"b1", "B", Rational(1, 2), {}},
                 {"a2", "A", Rational(1, 10000), {}}};
    SyntheticPhenomenon ph(cfg);

    SemintConfig run_cfg;
    run_cfg.window = 300;
    run_cfg.max_trials = 200000;
    run_cfg.post_saturation_trials = 200000;
    SemintResult r = run_semint(ph, run_cfg, 5);

    REQUIRE(r.retro_events == 1);
    CHECK(r.form.n_t == 3);
    CHECK(r.estimate.mass("A") == Rational(2, 3));
    CHECK(r.estimate.mass("B") == Rational(1, 3));
    CHECK(r.decomposition.phantom_slots > 0);
    CHECK_NOTHROW(r.estimate.validate());

    // Identities hold under phantom slots as well.
    const Decomposition& d = r.decomposition;
    CHECK(static_cast<std::int64_t>(d.n) ==
          static_cast<std::int64_t>(d.k) * static_cast<std::int64_t>(d.n_t) + d.n_prime);
}

TEST_CASE("residual forms agree exactly on random states") {
    std::mt19937_64 mix(42);
    for (int i = 0; i < 1000; ++i) {
        std::uint32_t k = 1 + static_cast<std::uint32_t>(mix() % 50);
        std::uint64_t n_t = 1 + mix() % 100;
        std::uint64_t n_r = mix() % (n_t + 1);
        std::int64_t n_prime = static_cast<std::int64_t>(mix() % (3 * n_t + 1));
        std::int64_t n_prime_r = n_prime == 0 ? 0
                                              : static_cast<std::int64_t>(
                                                    mix() % (n_prime + 1));
        ResidualComparison rc = residual_difference(k, n_t, n_r, n_prime, n_prime_r);
        REQUIRE(rc.direct == rc.reduced);
    }
}

TEST_CASE("the reduced residual shrinks strictly as replicas accumulate") {
    // Residuals held fixed: only K grows.
    Rational prev(-1);
    for (std::uint32_t k = 1; k <= 20; ++k) {
        ResidualComparison rc = residual_difference(k, 12, 4, 7, 5);
        CHECK(rc.direct == rc.reduced);
        if (k > 1) CHECK(rc.reduced < prev);
        prev = rc.reduced;
    }
}

TEST_CASE("semint report is valid json with the run's key facts") {
    SyntheticPhenomenon ph(single_cell());
    SemintConfig cfg;
    cfg.window = 10;
    SemintResult r = run_semint(ph, cfg, 1);
    nlohmann::json j = nlohmann::json::parse(semint_report_json(r));
    CHECK(j.at("kind") == "semint-run");
    CHECK(j.at("saturated") == true);
    CHECK(j.at("saturation_trial") == 11);
    CHECK(j.at("form").at("n_t") == 1);
    CHECK(j.at("estimate")[0].at("num") == "1");
    CHECK(j.at("saturation_trace").size() == r.trace.size());
}

TEST_CASE("runs are deterministic in the seed") {
    SyntheticPhenomenon ph(twelve_cells());
    SemintConfig cfg;
    cfg.window = 200;
    SemintResult a = run_semint(ph, cfg, 3);
    SemintResult b = run_semint(ph, cfg, 3);
    CHECK(semint_report_json(a) == semint_report_json(b));
    CHECK(a.trace.to_csv() == b.trace.to_csv());
}
