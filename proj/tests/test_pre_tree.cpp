#include <stdexcept>

#include "doctest.h"
#include "semint/pre_tree.hpp"

using namespace semint;

namespace {

Channel fair_channel(const std::string& id) {
    return Channel{id, {{"h", "t"}, {Rational(1, 2), Rational(1, 2)}, {}, 0}};
}

Channel drifting_channel(const std::string& id, std::uint64_t switch_at) {
    return Channel{id,
                   {{"h", "t"},
                    {Rational(1, 2), Rational(1, 2)},
                    {Rational(3, 10), Rational(7, 10)},
                    switch_at}};
}

}  // namespace

TEST_CASE("label source validation") {
    CHECK_NOTHROW(fair_channel("c").source.validate());
    CHECK_NOTHROW(drifting_channel("c", 100).source.validate());

    LabelSource empty;
    CHECK_THROWS(empty.validate());

    LabelSource dup{{"h", "h"}, {Rational(1, 2), Rational(1, 2)}, {}, 0};
    CHECK_THROWS(dup.validate());

    LabelSource off{{"h", "t"}, {Rational(1, 2), Rational(1, 3)}, {}, 0};
    CHECK_THROWS(off.validate());

    LabelSource no_switch{{"h", "t"},
                          {Rational(1, 2), Rational(1, 2)},
                          {Rational(1), Rational(0)},
                          0};
    CHECK_THROWS(no_switch.validate());
}

TEST_CASE("switching source changes law at the switch trial") {
    // Degenerate laws make the switch point visible without statistics.
    LabelSource src{{"h", "t"}, {Rational(1), Rational(0)}, {Rational(0), Rational(1)}, 3};
    src.validate();
    Rng rng(1);
    CHECK(src.draw(rng, 1) == 0);
    CHECK(src.draw(rng, 2) == 0);
    CHECK(src.draw(rng, 3) == 1);
    CHECK(src.draw(rng, 4) == 1);
}

TEST_CASE("tree keeps one branch per channel with exact checkpoint frequencies") {
    PreProbabilityTree tree = build_pre_probability_tree(
        "G", {fair_channel("u1"), drifting_channel("u2", 1200)}, {100, 400, 1000, 4000}, 2);

    CHECK(tree.trunk == "G");
    REQUIRE(tree.branches.size() == 2);
    for (const auto& b : tree.branches) {
        REQUIRE(b.checkpoints.size() == 4);
        for (const auto& cp : b.checkpoints) {
            Rational total(0);
            for (const auto& f : cp.frequencies) total += f;
            CHECK(total == Rational(1));
        }
        CHECK_NOTHROW(b.pre_law.validate());
        // Pre-law is the final checkpoint, entry for entry.
        for (std::size_t j = 0; j < b.universe.size(); ++j) {
            CHECK(b.pre_law.mass(b.universe[j]) == b.checkpoints.back().frequencies[j]);
        }
    }
}

TEST_CASE("channels draw from disjoint streams") {
    PreProbabilityTree one = build_pre_probability_tree("G", {fair_channel("a")}, {500}, 7);
    PreProbabilityTree two = build_pre_probability_tree(
        "G", {fair_channel("a"), fair_channel("b")}, {500}, 7);
    // Adding a channel leaves the first branch untouched.
    CHECK(one.branches[0].pre_law.mass("h") == two.branches[0].pre_law.mass("h"));
    // And the two branches see different samples.
    CHECK(two.branches[0].pre_law.mass("h") != two.branches[1].pre_law.mass("h"));
}

TEST_CASE("stability separates iid from drifting sources") {
    PreProbabilityTree tree = build_pre_probability_tree(
        "G", {fair_channel("u1"), drifting_channel("u2", 1200)}, {100, 400, 1000, 4000}, 2);

    StabilityReport iid = stability_check(tree.branches[0], 0.05);
    StabilityReport drift = stability_check(tree.branches[1], 0.05);

    CHECK(iid.metric.back() == 0.0);
    CHECK(drift.metric.back() == 0.0);
    CHECK(iid.stable);
    CHECK(!drift.stable);
    CHECK(iid.penultimate < 0.05);
    CHECK(drift.penultimate >= 0.05);
}

TEST_CASE("build validates inputs") {
    CHECK_THROWS(build_pre_probability_tree("G", {}, {100, 200}, 1));
    CHECK_THROWS(build_pre_probability_tree("G", {fair_channel("a")}, {}, 1));
    CHECK_THROWS(build_pre_probability_tree("G", {fair_channel("a")}, {200, 100}, 1));
    CHECK_THROWS(build_pre_probability_tree("G", {fair_channel("a"), fair_channel("a")},
                                            {100, 200}, 1));
    CHECK_THROWS(stability_check(
        build_pre_probability_tree("G", {fair_channel("a")}, {100}, 1).branches[0], 0.05));
}

TEST_CASE("tree construction is deterministic") {
    PreProbabilityTree a = build_pre_probability_tree(
        "G", {drifting_channel("c", 50)}, {100, 200}, 9);
    PreProbabilityTree b = build_pre_probability_tree(
        "G", {drifting_channel("c", 50)}, {100, 200}, 9);
    CHECK(a.branches[0].pre_law.mass("h") == b.branches[0].pre_law.mass("h"));
}
