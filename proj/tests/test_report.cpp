#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "bbsig/report.hpp"

using namespace bbsig;

namespace {

ReportHeader header_with(std::vector<std::pair<std::string, std::string>> cfg) {
    ReportHeader h;
    h.config = std::move(cfg);
    return h;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("format_metric renders one decimal on a 0-100 scale") {
    CHECK(format_metric(0.385) == "38.5");
    CHECK(format_metric(1.0) == "100.0");
    CHECK(format_metric(0.0) == "0.0");
    CHECK(format_metric(0.91649) == "91.6");
}

TEST_CASE("CSV reports open with the provenance header") {
    std::ostringstream out;
    write_hota_report(out, {}, ReportFormat::Csv, false,
                      header_with({{"seed", "42"}, {"iou_threshold", "0.3"}}));
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "# bbsig 1.0.0");
    CHECK(ls[1] == "# seed=42");
    CHECK(ls[2] == "# iou_threshold=0.3");
    CHECK(ls[3] == "Method,HOTA,DetPr,DetRe,DetA,AssPr,AssRe,AssA,Loc");
}

TEST_CASE("HOTA CSV rows scale metrics by 100") {
    HotaReportRow row;
    row.method = "tracker";
    row.result.hota = 0.5;
    row.result.det_pr = 1.0;
    row.result.det_re = 0.25;
    row.result.det_a = 0.25;
    row.result.ass_pr = 1.0;
    row.result.ass_re = 1.0;
    row.result.ass_a = 1.0;
    row.result.loc_a = 0.987;
    std::ostringstream out;
    write_hota_report(out, {row}, ReportFormat::Csv, false, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 3);
    CHECK(ls[2] == "tracker,50.0,100.0,25.0,25.0,100.0,100.0,100.0,98.7");
}

TEST_CASE("per-alpha CSV rows carry the alpha in the method column") {
    HotaReportRow row;
    row.method = "m";
    HotaAlphaRecord a;
    a.alpha = 0.05;
    a.hota = 1.0;
    a.det_pr = a.det_re = a.det_a = 1.0;
    a.ass_pr = a.ass_re = a.ass_a = 1.0;
    a.loc_a = 1.0;
    row.result.per_alpha = {a};
    std::ostringstream out;
    write_hota_report(out, {row}, ReportFormat::Csv, true, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 4);
    CHECK(ls[3] == "m@alpha=0.05,100.0,100.0,100.0,100.0,100.0,100.0,100.0,100.0");
}

TEST_CASE("HOTA JSON report is valid JSON with header and methods") {
    HotaReportRow row;
    row.method = "tracker";
    row.result.hota = 0.75;
    std::ostringstream out;
    write_hota_report(out, {row}, ReportFormat::Json, false,
                      header_with({{"seed", "7"}}));
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc.at("tool") == "bbsig");
    CHECK(doc.at("version") == "1.0.0");
    CHECK(doc.at("config").at("seed") == "7");
    REQUIRE(doc.at("methods").size() == 1);
    CHECK(doc.at("methods")[0].at("method") == "tracker");
    CHECK(doc.at("methods")[0].at("HOTA").get<double>() == doctest::Approx(0.75));
}

TEST_CASE("method names containing commas are quoted in CSV") {
    HotaReportRow row;
    row.method = "a,b";
    std::ostringstream out;
    write_hota_report(out, {row}, ReportFormat::Csv, false, ReportHeader{});
    const auto ls = lines_of(out.str());
    CHECK(ls.back().rfind("\"a,b\",", 0) == 0);
}

TEST_CASE("dwell CSV renders exact values") {
    DwellRecord r;
    r.billboard_id = 3;
    r.driver_id = "d01";
    r.frames_gazed = 5;
    r.gaze_ms = 200.0;
    r.frames_visible = 80;
    std::ostringstream out;
    write_dwell_report(out, {r}, ReportFormat::Csv, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 3);
    CHECK(ls[1] == "billboard_id,driver_id,frames_gazed,gaze_ms,frames_visible");
    CHECK(ls[2] == "3,d01,5,200,80");
}

TEST_CASE("category CSV lists counts then per-billboard rows with medians") {
    CategoryReport rep;
    rep.counts = {1, 0, 2};
    rep.per_billboard = {{1, SignificanceCategory::None},
                         {2, SignificanceCategory::Long},
                         {5, SignificanceCategory::Long}};
    rep.median_ms = {{1, 0.0}, {2, 400.0}, {5, 250.0}};
    std::ostringstream out;
    write_category_report(out, rep, ReportFormat::Csv, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 9);
    CHECK(ls[1] == "category,count");
    CHECK(ls[2] == "None,1");
    CHECK(ls[3] == "Short,0");
    CHECK(ls[4] == "Long,2");
    CHECK(ls[5] == "billboard_id,category,median_ms");
    CHECK(ls[6] == "1,None,0");
    CHECK(ls[7] == "2,Long,400");
    CHECK(ls[8] == "5,Long,250");
}

TEST_CASE("confusion CSV has fixed axes") {
    std::array<std::array<int, 3>, 3> m{{{5, 1, 0}, {0, 4, 2}, {0, 0, 8}}};
    std::ostringstream out;
    write_confusion_report(out, m, ReportFormat::Csv, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 5);
    CHECK(ls[1] == "true\\pred,None,Short,Long");
    CHECK(ls[2] == "None,5,1,0");
    CHECK(ls[3] == "Short,0,4,2");
    CHECK(ls[4] == "Long,0,0,8");
}

TEST_CASE("features CSV round-trips") {
    FeatureRow r;
    r.billboard_id = 7;
    r.features.f1_visibility_frames = 80.0;
    r.features.f2_region_code = 1.0;
    r.features.f3_center_distance = 123.456;
    r.features.f4_mean_area = 0.0125;
    r.features.f5_top10_area = 0.03;
    r.features.f6_mean_saliency = 88.25;
    r.features.f7_saliency_ratio = 1.75;
    r.label = "Short";
    std::ostringstream out;
    write_features_csv(out, {r});
    std::istringstream in(out.str());
    const auto rows = parse_features_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].billboard_id == 7);
    CHECK(rows[0].features.f1_visibility_frames == 80.0);
    CHECK(rows[0].features.f3_center_distance == 123.456);
    CHECK(rows[0].features.f4_mean_area == 0.0125);
    CHECK(rows[0].features.f6_mean_saliency == 88.25);
    CHECK(rows[0].features.f7_saliency_ratio == 1.75);
    CHECK(rows[0].label == "Short");
}

TEST_CASE("features CSV accepts unlabeled rows") {
    std::istringstream in("billboard_id,f1,f2,f3,f4,f5,f6,f7,label\n"
                          "1,10,0,5.5,0.01,0.02,12,1.1\n");
    const auto rows = parse_features_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].label.empty());
}

TEST_CASE("features CSV parse errors carry line numbers") {
    {
        std::istringstream in("billboard_id,f1,f2,f3,f4,f5,f6,f7,label\n"
                              "1,10,0\n");
        try {
            parse_features_csv(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    {
        std::istringstream in("1,abc,0,0,0,0,0,0,None\n");
        CHECK_THROWS_AS(parse_features_csv(in), ParseError);
    }
    {
        std::istringstream in("1,1,0,0,0,0,0,0,Bogus\n");
        CHECK_THROWS_AS(parse_features_csv(in), ParseError);
    }
}

TEST_CASE("importance CSV names the features") {
    std::vector<double> mdi{0.5, 0.1, 0.1, 0.1, 0.1, 0.05, 0.05};
    std::vector<double> perm{0.25, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    std::ostringstream out;
    write_importance_report(out, mdi, perm, ReportFormat::Csv, ReportHeader{});
    const auto ls = lines_of(out.str());
    REQUIRE(ls.size() == 9);
    CHECK(ls[1] == "feature,mdi,permutation");
    CHECK(ls[2] == "f1_visibility_frames,0.5,0.25");
    CHECK(ls[8] == "f7_saliency_ratio,0.05,0");
}
