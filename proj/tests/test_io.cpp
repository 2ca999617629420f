#include <doctest.h>

#include <functional>
#include <sstream>

#include "bbsig/io.hpp"
#include "bbsig/rng.hpp"

using namespace bbsig;

namespace {

int error_line(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("detection line parses per the MOT-style format") {
    std::istringstream in("3,-1,100,200,50,40,0.90\n");
    const auto m = parse_detections(in);
    REQUIRE(m.size() == 1);
    const auto& d = m.at(3).at(0);
    CHECK(d.frame == 3);
    CHECK(d.id == -1);
    CHECK(d.box == BoundingBox{100, 200, 50, 40});
    CHECK(d.confidence == 0.9);
}

TEST_CASE("detection confidence defaults to 1 and extra columns are ignored") {
    std::istringstream in("1,7,0,0,10,10\n2,8,5,5,10,10,0.5,-1,-1,-1\n");
    const auto m = parse_detections(in);
    CHECK(m.at(1).at(0).confidence == 1.0);
    CHECK(m.at(2).at(0).confidence == 0.5);
}

TEST_CASE("empty detection stream parses to an empty map") {
    std::istringstream in("");
    CHECK(parse_detections(in).empty());
}

TEST_CASE("detection round trip on random records") {
    Rng rng(7);
    std::vector<FrameDetection> dets;
    for (int i = 0; i < 300; ++i) {
        FrameDetection d;
        d.frame = 1 + int(rng.uniform_int(50));
        d.id = int(rng.uniform_int(30)) - 1;
        d.box = {rng.uniform(-100, 1900), rng.uniform(-100, 1000),
                 rng.uniform(0.5, 400), rng.uniform(0.5, 300)};
        d.confidence = rng.uniform();
        dets.push_back(d);
    }
    std::ostringstream out;
    write_detections(out, dets);
    std::istringstream in(out.str());
    const auto parsed = parse_detections(in);

    DetectionMap expected;
    for (const auto& d : dets) expected[d.frame].push_back(d);
    CHECK(parsed == expected);
}

TEST_CASE("malformed detection lines report the offending line number") {
    CHECK(error_line([] {
        std::istringstream in("1,1,0,0,10,10\n2,2,bad,0,10,10\n");
        parse_detections(in);
    }) == 2);
    CHECK(error_line([] {
        std::istringstream in("1,1,0,0,10,10\n\n3,3,0,0,10\n");
        parse_detections(in);
    }) == 3);
    CHECK(error_line([] {
        std::istringstream in("0,1,0,0,10,10\n");  // frames start at 1
        parse_detections(in);
    }) == 1);
    CHECK(error_line([] {
        std::istringstream in("1,1,0,0,10,-5\n");
        parse_detections(in);
    }) == 1);
    CHECK(error_line([] {
        std::istringstream in("1,1,0,0,10,10,1.5\n");
        parse_detections(in);
    }) == 1);
}

TEST_CASE("gaze lines carry zero, one, or two fixation points") {
    std::istringstream in("7,512.0,384.0\n9\n4,10,20,30,40\n");
    const auto g = parse_gaze(in);
    REQUIRE(g.size() == 3);
    CHECK(g.at(7).points == std::vector<GazePoint>{{512, 384}});
    CHECK(g.at(9).points.empty());
    CHECK(g.at(4).points == std::vector<GazePoint>{{10, 20}, {30, 40}});
    CHECK(g.at(7).provenance == GazeProvenance::Recorded);
}

TEST_CASE("gaze rejects dangling coordinates, extra points, and duplicates") {
    CHECK(error_line([] {
        std::istringstream in("1,10\n");
        parse_gaze(in);
    }) == 1);
    CHECK(error_line([] {
        std::istringstream in("1,1,1,2,2,3,3\n");
        parse_gaze(in);
    }) == 1);
    CHECK(error_line([] {
        std::istringstream in("1,10,20\n2\n1,30,40\n");
        parse_gaze(in);
    }) == 3);
}

TEST_CASE("gaze round trip on random samples") {
    Rng rng(13);
    GazeMap gaze;
    for (int f = 1; f <= 200; ++f) {
        GazeSample s;
        s.frame = f;
        const auto n = rng.uniform_int(3);
        for (std::uint64_t i = 0; i < n; ++i)
            s.points.push_back({rng.uniform(0, 1920), rng.uniform(0, 1080)});
        gaze.emplace(f, std::move(s));
    }
    std::ostringstream out;
    write_gaze(out, gaze);
    std::istringstream in(out.str());
    const auto parsed = parse_gaze(in);
    REQUIRE(parsed.size() == gaze.size());
    for (const auto& [f, s] : gaze) CHECK(parsed.at(f).points == s.points);
}

TEST_CASE("PGM parse reads bytes in row-major order") {
    std::string data = "P5\n# a comment\n2 2\n255\n";
    data += '\x00';
    data += '\x32';
    data += '\x33';
    data += '\xff';
    std::istringstream in(data);
    const auto g = parse_saliency_grid(in);
    CHECK(g.dims == ImageDims{2, 2});
    CHECK(g.values == std::vector<std::uint8_t>{0, 50, 51, 255});
    CHECK(g.at(1, 0) == 50);
    CHECK(g.at(0, 1) == 51);
}

TEST_CASE("PGM rejects wrong magic, maxval, and truncation") {
    {
        std::istringstream in("P2\n2 2\n255\n");
        CHECK_THROWS_AS(parse_saliency_grid(in), ParseError);
    }
    {
        std::istringstream in("P5\n2 2\n65535\nxxxxxxxx");
        CHECK_THROWS_WITH_AS(parse_saliency_grid(in), "unsupported maxval (only 255)",
                             ParseError);
    }
    {
        std::istringstream in(std::string("P5\n2 2\n255\nab"));
        CHECK_THROWS_WITH_AS(parse_saliency_grid(in), "truncated PGM payload", ParseError);
    }
}

TEST_CASE("PGM round trip preserves bytes exactly") {
    Rng rng(99);
    SaliencyGrid g;
    g.dims = {37, 21};
    g.values.resize(37 * 21);
    for (auto& v : g.values) v = std::uint8_t(rng.uniform_int(256));
    std::ostringstream out;
    write_saliency_grid(out, g);
    std::istringstream in(out.str());
    CHECK(parse_saliency_grid(in) == g);
}

TEST_CASE("meta requires dimensions, defaults fps, and rejects unknown keys") {
    {
        std::istringstream in("width=1920\nheight=1080\n");
        const auto m = parse_meta(in);
        CHECK(m.dims == ImageDims{1920, 1080});
        CHECK(m.fps == 25.0);
    }
    {
        std::istringstream in("name=run1\nfps=29.97\nwidth=960\nheight=540\ndriver=d01\n");
        const auto m = parse_meta(in);
        CHECK(m.name == "run1");
        CHECK(m.fps == 29.97);
        CHECK(m.driver_id == "d01");
    }
    {
        std::istringstream in("width=10\n");
        CHECK_THROWS_AS(parse_meta(in), ParseError);
    }
    CHECK(error_line([] {
        std::istringstream in("width=10\nheight=10\nffps=25\n");
        parse_meta(in);
    }) == 3);
}

TEST_CASE("meta round trip") {
    SequenceMeta m;
    m.name = "seq";
    m.fps = 30.0;
    m.dims = {960, 540};
    m.driver_id = "d07";
    std::ostringstream out;
    write_meta(out, m);
    std::istringstream in(out.str());
    const auto parsed = parse_meta(in);
    CHECK(parsed.name == m.name);
    CHECK(parsed.fps == m.fps);
    CHECK(parsed.dims == m.dims);
    CHECK(parsed.driver_id == m.driver_id);
}

TEST_CASE("format_double renders shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3");
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-1e6, 1e6);
        CHECK(std::stod(format_double(v)) == v);
    }
}
