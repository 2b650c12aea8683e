#include <stdexcept>

#include "doctest.h"
#include "semint/view.hpp"

using namespace semint;

namespace {

AspectAxis position_axis() { return AspectAxis::measurable("x", 0.0, 50.0, 5.0, true); }

View dice_view() {
    return View{{AspectAxis::categorical("face", {"1", "2", "3", "4", "5", "6"}),
                 position_axis(),
                 AspectAxis::measurable("alpha", 0.0, 360.0, 5.0)}};
}

}  // namespace

TEST_CASE("measurable axis bins are half-open upper-closed unit intervals") {
    AspectAxis x = position_axis();
    CHECK(x.bin_count() == 10);
    CHECK(discretize(12.0, x) == 3);
    CHECK(discretize(10.0, x) == 2);  // falls in (5, 10]
    CHECK(discretize(7.0, x) == 2);
    CHECK(discretize(0.1, x) == 1);
    CHECK(discretize(50.0, x) == 10);
    CHECK_THROWS_AS(discretize(0.0, x), std::out_of_range);   // lower bound excluded
    CHECK_THROWS_AS(discretize(50.5, x), std::out_of_range);
    CHECK_THROWS_AS(discretize(-1.0, x), std::out_of_range);
}

TEST_CASE("bin count rounds a fractional final interval up") {
    AspectAxis a = AspectAxis::measurable("a", 0.0, 11.0, 5.0);
    CHECK(a.bin_count() == 3);
    CHECK(discretize(11.0, a) == 3);
}

TEST_CASE("representative returns the bin's upper endpoint, clamped to the axis") {
    AspectAxis x = position_axis();
    CHECK(x.representative(1) == 5.0);
    CHECK(x.representative(10) == 50.0);
    AspectAxis a = AspectAxis::measurable("a", 0.0, 11.0, 5.0);
    CHECK(a.representative(3) == 11.0);
}

TEST_CASE("categorical axis indexes values from 1") {
    AspectAxis face = AspectAxis::categorical("face", {"1", "2", "3"});
    CHECK(face.bin_count() == 3);
    CHECK(face.value_index("1") == 1);
    CHECK(face.value_index("3") == 3);
    CHECK_THROWS(face.value_index("7"));
}

TEST_CASE("axis validation") {
    CHECK_THROWS(AspectAxis::measurable("x", 10.0, 5.0, 1.0).validate());
    CHECK_THROWS(AspectAxis::measurable("x", 0.0, 5.0, 0.0).validate());
    CHECK_THROWS(AspectAxis::categorical("c", {}).validate());
    CHECK_THROWS(AspectAxis::categorical("c", {"a", "a"}).validate());
    CHECK_NOTHROW(position_axis().validate());
}

TEST_CASE("view lookup and validation") {
    View v = dice_view();
    CHECK_NOTHROW(v.validate());
    CHECK(v.find("face") != nullptr);
    CHECK(v.find("nope") == nullptr);
    CHECK(v.at("x").unit == 5.0);
    CHECK_THROWS(v.at("nope"));

    View dup{{position_axis(), position_axis()}};
    CHECK_THROWS(dup.validate());
}

TEST_CASE("subview relation requires every axis to match") {
    View full = dice_view();
    View label{{AspectAxis::categorical("face", {"1", "2", "3", "4", "5", "6"})}};
    CHECK(label.is_subview_of(full));
    CHECK(!full.is_subview_of(label));

    View other{{AspectAxis::categorical("face", {"1", "2"})}};
    CHECK(!other.is_subview_of(full));
}

TEST_CASE("descriptions project onto subviews") {
    View full = dice_view();
    View label{{AspectAxis::categorical("face", {"1", "2", "3", "4", "5", "6"})}};
    Description d{{{"face", 4}, {"x", 2}, {"alpha", 17}}};
    CHECK_NOTHROW(validate_description(d, full));

    Description p = project(d, label);
    CHECK(p.bins.size() == 1);
    CHECK(p.at("face") == 4);

    Description missing{{{"face", 4}}};
    CHECK_THROWS(project(missing, full));
}

TEST_CASE("description bin bounds are checked against the view") {
    View label{{AspectAxis::categorical("face", {"1", "2", "3"})}};
    CHECK_THROWS(validate_description(Description{{{"face", 0}}}, label));
    CHECK_THROWS(validate_description(Description{{{"face", 4}}}, label));
    CHECK_NOTHROW(validate_description(Description{{{"face", 3}}}, label));
}
