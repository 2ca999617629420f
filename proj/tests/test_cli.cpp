#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bbsig/synth.hpp"

using namespace bbsig;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path log =
        fs::temp_directory_path() / ("bbsig_cli_" + std::to_string(counter++) + ".log");
    const std::string cmd =
        std::string(BBSIG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = raw == -1 ? -1 : WEXITSTATUS(raw);
    std::ifstream f(log);
    std::ostringstream os;
    os << f.rdbuf();
    r.output = os.str();
    fs::remove(log);
    return r;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p);
    f << content;
    return p;
}

}  // namespace

TEST_CASE("--version prints the tool version and exits 0") {
    const auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1.0.0") != std::string::npos);
}

TEST_CASE("--help lists the subcommands") {
    const auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub : {"track", "eval-hota", "gaze", "features", "train",
                            "classify", "importance", "saliency-metrics", "synth",
                            "pipeline"})
        CHECK(r.output.find(sub) != std::string::npos);
}

TEST_CASE("missing required options exit 1 with a usage message") {
    const auto r = run_cli("eval-hota --pred /dev/null");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("--gt") != std::string::npos);
}

TEST_CASE("unknown subcommands exit 1") {
    CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("eval-hota on identical track files reports 100.0 across the board") {
    const auto tracks = write_temp("bbsig_cli_tracks.txt",
                                   "1,1,10,10,40,20\n"
                                   "2,1,12,10,40,20\n"
                                   "2,2,100,50,30,15\n"
                                   "3,2,102,50,30,15\n");
    const auto r = run_cli("eval-hota --gt " + tracks.string() + " --pred " + tracks.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Method,HOTA") != std::string::npos);
    CHECK(r.output.find("100.0,100.0,100.0,100.0,100.0,100.0,100.0,100.0") !=
          std::string::npos);
    fs::remove(tracks);
}

TEST_CASE("malformed data files exit 2 with the offending line") {
    const auto bad = write_temp("bbsig_cli_bad.txt", "1,1,10,10,40,20\nnot,a,number\n");
    const auto ok = write_temp("bbsig_cli_ok.txt", "1,1,10,10,40,20\n");
    const auto r = run_cli("eval-hota --gt " + bad.string() + " --pred " + ok.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("error") != std::string::npos);
    CHECK(r.output.find("2") != std::string::npos);
    fs::remove(bad);
    fs::remove(ok);
}

TEST_CASE("nonexistent input files exit 2") {
    const auto r = run_cli("eval-hota --gt /nonexistent/gt.txt --pred /nonexistent/p.txt");
    CHECK(r.exit_code == 2);
    CHECK(r.output.rfind("error", 0) == 0);
}

TEST_CASE("synth then pipeline runs end to end") {
    const fs::path dir = fs::temp_directory_path() / "bbsig_cli_scenario";
    fs::remove_all(dir);
    const auto synth = run_cli("synth --out " + dir.string() +
                               " --seed 5 --drivers 2 --billboards 4 --frames 400");
    REQUIRE(synth.exit_code == 0);
    CHECK(fs::exists(dir / "scenario.json"));

    const fs::path out = fs::temp_directory_path() / "bbsig_cli_pipe_out";
    fs::remove_all(out);
    const auto pipe = run_cli("pipeline --scenario " + dir.string() + " --out " +
                              out.string() + " --min-hits 1");
    CHECK(pipe.exit_code == 0);
    CHECK(pipe.output.find("HOTA=100.0") != std::string::npos);
    CHECK(fs::exists(out / "hota.csv"));
    CHECK(fs::exists(out / "model.json"));
    fs::remove_all(dir);
    fs::remove_all(out);
}

TEST_CASE("track subcommand writes confirmed tracks") {
    const auto dets = write_temp("bbsig_cli_dets.txt",
                                 "1,-1,10,10,40,20,0.9\n"
                                 "2,-1,12,10,40,20,0.9\n"
                                 "3,-1,14,10,40,20,0.9\n");
    const auto meta = write_temp("bbsig_cli_meta.txt", "width=960\nheight=540\n");
    const fs::path out = fs::temp_directory_path() / "bbsig_cli_tracked.txt";
    fs::remove(out);
    const auto r = run_cli("track --detections " + dets.string() + " --meta " +
                           meta.string() + " --out " + out.string() + " --min-hits 1");
    CHECK(r.exit_code == 0);
    std::ifstream f(out);
    std::string line;
    int rows = 0;
    while (std::getline(f, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 3);
    fs::remove(dets);
    fs::remove(out);
}

TEST_CASE("gaze subcommand reports dwell per billboard") {
    const auto dets = write_temp("bbsig_cli_gaze_dets.txt",
                                 "1,1,10,10,40,20\n"
                                 "2,1,10,10,40,20\n"
                                 "3,1,10,10,40,20\n");
    const auto gaze = write_temp("bbsig_cli_gaze.txt",
                                 "1,20,20\n"
                                 "2,20,20\n"
                                 "3,500,500\n");
    const auto meta = write_temp("bbsig_cli_gaze_meta.txt", "width=960\nheight=540\n");
    const auto r = run_cli("gaze --detections " + dets.string() + " --gaze " +
                           gaze.string() + " --meta " + meta.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("billboard_id,driver_id,frames_gazed,gaze_ms,frames_visible") !=
          std::string::npos);
    CHECK(r.output.find("80") != std::string::npos);  // 2 frames at 25 fps
    fs::remove(dets);
    fs::remove(gaze);
}
