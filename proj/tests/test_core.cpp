#include "skelfuse/core.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace skelfuse;

namespace {

Clip one_frame_clip() {
    Clip c;
    c.source_id = "c";
    ClipFrame f;
    f.skeleton.frame_index = 0;
    f.skeleton.persons.push_back(Person{});
    f.skeleton.persons[0][0] = {10.0, 20.0, 0.9};
    c.frames.push_back(f);
    return c;
}

} // namespace

TEST_CASE("channel manifest lists joints then objects") {
    const auto m = channel_manifest();
    REQUIRE(m.size() == 24);
    CHECK(m[0] == "nose");
    CHECK(m[9] == "left-wrist");
    CHECK(m[10] == "right-wrist");
    CHECK(m[16] == "right-ankle");
    CHECK(m[17] == "table top");
    CHECK(m[23] == "rear panel");
}

TEST_CASE("name lookups round-trip and reject unknown names") {
    for (std::size_t i = 0; i < kNumJoints; ++i) {
        CHECK(index_of(joint_from_name(joint_name(joint_from_index(i)))) == i);
    }
    for (std::size_t i = 0; i < kNumObjectClasses; ++i) {
        CHECK(index_of(object_from_name(object_name(object_from_index(i)))) == i);
    }
    CHECK_THROWS_AS(object_from_name("chair"), LookupError);
    CHECK_THROWS_AS(joint_from_name("tail"), LookupError);
    CHECK_THROWS_AS(object_from_index(7), LookupError);
    CHECK(view_from_name(view_name(View::Side)) == View::Side);
    CHECK_THROWS_AS(view_from_name("back"), LookupError);
}

TEST_CASE("mask centroid") {
    CHECK(mask_centroid(Mask({{0, 0}, {0, 1}, {1, 0}, {1, 1}})) == Point2{0.5, 0.5});
    CHECK(mask_centroid(Mask({{7, 3}})) == Point2{7.0, 3.0});
    CHECK_THROWS_AS(mask_centroid(Mask{}), ValidationError);

    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto m = testing::random_mask(rng, 100, 100, 50);
        CHECK(mask_centroid(m) == testing::oracle_centroid(m.pixels()));
    }
}

TEST_CASE("mask drops duplicate pixels") {
    const Mask m({{1, 1}, {1, 1}, {3, 1}});
    CHECK(m.size() == 2);
    CHECK(mask_centroid(m) == Point2{2.0, 1.0});
}

TEST_CASE("object instance validates its score and caches the centroid") {
    const ObjectInstance o(ObjectClass::Leg, 0.7, Mask({{2, 4}, {4, 4}}));
    CHECK(o.centroid() == Point2{3.0, 4.0});
    CHECK_THROWS_AS(ObjectInstance(ObjectClass::Leg, 1.5, Mask({{0, 0}})), ValidationError);
    CHECK_THROWS_AS(ObjectInstance(ObjectClass::Leg, -0.1, Mask({{0, 0}})), ValidationError);
    CHECK_THROWS_AS(ObjectInstance(ObjectClass::Leg, 0.5, Mask{}), ValidationError);
}

TEST_CASE("reference person has the highest mean score, first on ties") {
    SkeletonFrame f;
    Person a{}, b{}, c{};
    a[0].score = 0.5;
    b[0].score = 0.9;
    c[0].score = 0.9;
    f.persons = {a, b, c};
    CHECK(f.reference_person() == 1u);
    CHECK_FALSE(SkeletonFrame{}.reference_person().has_value());
}

TEST_CASE("clip validation") {
    CHECK_NOTHROW(validate(one_frame_clip()));

    CHECK_THROWS_AS(validate(Clip{}), ValidationError);

    auto c = one_frame_clip();
    c.frames.push_back(c.frames[0]);
    CHECK_THROWS_AS(validate(c), ValidationError);  // repeated frame index
    c.frames[1].skeleton.frame_index = 1;
    CHECK_NOTHROW(validate(c));

    auto bad_score = one_frame_clip();
    bad_score.frames[0].skeleton.persons[0][3].score = 1.2;
    CHECK_THROWS_AS(validate(bad_score), ValidationError);

    auto nan = one_frame_clip();
    nan.frames[0].skeleton.persons[0][0].x = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(nan), ValidationError);

    auto negative = one_frame_clip();
    negative.frames[0].skeleton.frame_index = -1;
    CHECK_THROWS_AS(validate(negative), ValidationError);
}

TEST_CASE("normalizer needs a proper range") {
    CHECK_NOTHROW(Normalizer(0.0, 1.0));
    CHECK_THROWS_AS(Normalizer(5.0, 5.0), ValidationError);
    CHECK_THROWS_AS(Normalizer(2.0, 1.0), ValidationError);
    CHECK_THROWS_AS(Normalizer(0.0, std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("heatmap volume layout is channel-major") {
    HeatmapVolume v(2, 3, 4, 5);
    CHECK(v.values.size() == 120);
    CHECK(v.offset(0, 0, 0, 1) == 1);
    CHECK(v.offset(0, 0, 1, 0) == 5);
    CHECK(v.offset(0, 1, 0, 0) == 20);
    CHECK(v.offset(1, 0, 0, 0) == 60);
}
