#include <doctest.h>

#include <algorithm>

#include "bbsig/gaze.hpp"
#include "bbsig/rng.hpp"

using namespace bbsig;

namespace {

GazeMap gaze_of(std::initializer_list<std::pair<int, std::vector<GazePoint>>> frames) {
    GazeMap m;
    for (const auto& [f, pts] : frames) {
        GazeSample s;
        s.frame = f;
        s.points = pts;
        m.emplace(f, std::move(s));
    }
    return m;
}

// sort-based reference median with zero padding
double median_oracle(std::vector<double> v, int n) {
    while (int(v.size()) < n) v.push_back(0.0);
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

TEST_CASE("recorded fixations pass through unchanged") {
    const auto g = gaze_of({{5, {{512, 384}}}});
    const auto s = resolve_fixations(g, 5, ImageDims{1920, 1080});
    REQUIRE(s.has_value());
    CHECK(s->points == std::vector<GazePoint>{{512, 384}});
    CHECK(s->provenance == GazeProvenance::Recorded);
}

TEST_CASE("a missing frame extrapolates linearly from the two previous frames") {
    const auto g = gaze_of({{1, {{10, 10}}}, {2, {{20, 20}}}});
    const auto s = resolve_fixations(g, 3, ImageDims{1920, 1080});
    REQUIRE(s.has_value());
    CHECK(s->points == std::vector<GazePoint>{{30, 30}});
    CHECK(s->provenance == GazeProvenance::Extrapolated);
}

TEST_CASE("extrapolation clamps to the frame bounds") {
    const auto g = gaze_of({{1, {{100, 5}}}, {2, {{40, 2}}}});
    const auto s = resolve_fixations(g, 3, ImageDims{200, 100});
    REQUIRE(s.has_value());
    CHECK(s->points.at(0).x == 0.0);   // raw -20 clamped
    CHECK(s->points.at(0).y == 0.0);   // raw -1 clamped
}

TEST_CASE("frames with no recorded or extrapolable gaze are skipped") {
    const auto g = gaze_of({{1, {{10, 10}}}});
    CHECK_FALSE(resolve_fixations(g, 3, ImageDims{100, 100}).has_value());  // t-1 empty
    CHECK_FALSE(resolve_fixations(gaze_of({}), 2, ImageDims{100, 100}).has_value());
    // a frame recorded with zero points counts as empty, not extrapolable
    const auto g2 = gaze_of({{1, {{10, 10}}}, {2, {}}});
    CHECK_FALSE(resolve_fixations(g2, 3, ImageDims{100, 100}).has_value());
}

TEST_CASE("extrapolated frames never seed further extrapolation") {
    const auto g = gaze_of({{1, {{10, 10}}}, {2, {{20, 20}}}});
    CHECK(resolve_fixations(g, 3, ImageDims{1920, 1080}).has_value());
    CHECK_FALSE(resolve_fixations(g, 4, ImageDims{1920, 1080}).has_value());
}

TEST_CASE("dwell counts frames whose fixation lies inside the box") {
    std::vector<std::pair<int, BoundingBox>> track;
    for (int f = 1; f <= 10; ++f) track.emplace_back(f, BoundingBox{100, 100, 50, 50});
    GazeMap g;
    for (int f = 1; f <= 10; ++f) {
        GazeSample s;
        s.frame = f;
        s.points = {f <= 5 ? GazePoint{120, 120} : GazePoint{500, 500}};
        g.emplace(f, s);
    }
    const auto r = gaze_duration(track, g, 25.0, ImageDims{1920, 1080});
    CHECK(r.frames_gazed == 5);
    CHECK(r.gaze_ms == doctest::Approx(200.0).epsilon(1e-12));  // 5 frames at 40 ms
    CHECK(r.frames_visible == 10);
}

TEST_CASE("a fixation exactly on the box edge counts as gazed") {
    std::vector<std::pair<int, BoundingBox>> track{{1, BoundingBox{100, 100, 50, 50}}};
    const auto g = gaze_of({{1, {{100, 100}}}});
    CHECK(gaze_duration(track, g, 25.0, ImageDims{1920, 1080}).frames_gazed == 1);
    const auto g2 = gaze_of({{1, {{150, 150}}}});
    CHECK(gaze_duration(track, g2, 25.0, ImageDims{1920, 1080}).frames_gazed == 1);
}

TEST_CASE("no fixation inside the box means 0 ms") {
    std::vector<std::pair<int, BoundingBox>> track{{1, BoundingBox{0, 0, 10, 10}}};
    const auto g = gaze_of({{1, {{500, 500}}}});
    CHECK(gaze_duration(track, g, 25.0, ImageDims{1920, 1080}).gaze_ms == 0.0);
}

TEST_CASE("either of the two fixation points can trigger a gazed frame") {
    std::vector<std::pair<int, BoundingBox>> track{{1, BoundingBox{0, 0, 10, 10}}};
    const auto g = gaze_of({{1, {{500, 500}, {5, 5}}}});
    CHECK(gaze_duration(track, g, 25.0, ImageDims{1920, 1080}).frames_gazed == 1);
}

TEST_CASE("median aggregation pads to the driver count") {
    CHECK(aggregate_significance({0, 0, 0, 0, 0, 0, 0, 0}, 8) == 0.0);
    CHECK(aggregate_significance({100, 200, 300}, 8) == 0.0);  // 5 padded zeros fill both middles
    CHECK(aggregate_significance({100, 200, 300}, 4) == doctest::Approx(150.0));  // one padded zero
    CHECK(aggregate_significance({120}, 1) == 120.0);
    CHECK(aggregate_significance({100, 300}, 2) == doctest::Approx(200.0));
}

TEST_CASE("median matches a sort-based reference on random vectors") {
    Rng rng(321);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + int(rng.uniform_int(12));
        const int present = int(rng.uniform_int(std::uint64_t(n + 1)));
        std::vector<double> v;
        for (int i = 0; i < present; ++i) v.push_back(rng.uniform(0, 800));
        CHECK(aggregate_significance(v, n) ==
              doctest::Approx(median_oracle(v, n)).epsilon(1e-12));
    }
}

TEST_CASE("category thresholds: 0 / 1-249 / 250+ ms") {
    CHECK(categorize(0.0) == SignificanceCategory::None);
    CHECK(categorize(1.0) == SignificanceCategory::Short);
    CHECK(categorize(100.0) == SignificanceCategory::Short);
    CHECK(categorize(249.0) == SignificanceCategory::Short);
    CHECK(categorize(249.999) == SignificanceCategory::Short);
    CHECK(categorize(250.0) == SignificanceCategory::Long);
    CHECK(categorize(10000.0) == SignificanceCategory::Long);
    CHECK_THROWS_AS(categorize(-1.0), std::invalid_argument);
}

TEST_CASE("category names round trip") {
    for (auto c : {SignificanceCategory::None, SignificanceCategory::Short,
                   SignificanceCategory::Long})
        CHECK(category_from_string(to_string(c)) == c);
    CHECK_FALSE(category_from_string("Medium").has_value());
}
