#include "bbsig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bbsig/rng.hpp"
#include "bbsig/saliency.hpp"

namespace bbsig {

namespace {

constexpr double kAspect = 2.0;       // billboard w/h
constexpr double kEdgeMargin = 8.0;   // px the box keeps from frame borders
constexpr GazePoint kRoadPoint{4.0, 4.0};  // off-billboard fixation target

struct PassPlan {
    int start_frame = 1;  // first visible frame
    double x_from = 0.0, x_to = 0.0;
    double y_from = 0.0, y_to = 0.0;
};

int default_dwell_frames(const ScenarioConfig& cfg, int driver, int billboard_id) {
    const auto it = cfg.dwell_override.find({driver, billboard_id});
    if (it != cfg.dwell_override.end()) return it->second;
    switch ((billboard_id - 1) % 3) {
        case 0: return 0;                      // None
        case 1: return 4 + driver % 2;         // Short: 160/200 ms at 25 fps
        default: return 10 + driver % 2;       // Long: 400/440 ms at 25 fps
    }
}

BoundingBox pass_box(const ScenarioConfig& cfg, const PassPlan& plan, int frame) {
    const int t = frame - plan.start_frame;
    const double a0 = cfg.start_area_fraction * cfg.dims.area();
    const double area = a0 * std::pow(cfg.growth_ratio, t);
    const double w = std::sqrt(area * kAspect);
    const double h = area / w;
    const double u = cfg.frames_per_pass > 1 ? double(t) / (cfg.frames_per_pass - 1) : 0.0;
    double cx = plan.x_from + (plan.x_to - plan.x_from) * u;
    double cy = plan.y_from + (plan.y_to - plan.y_from) * u;
    cx = std::clamp(cx, kEdgeMargin + 0.5 * w, cfg.dims.width - kEdgeMargin - 0.5 * w);
    cy = std::clamp(cy, kEdgeMargin + 0.5 * h, cfg.dims.height - kEdgeMargin - 0.5 * h);
    return BoundingBox{cx - 0.5 * w, cy - 0.5 * h, w, h};
}

}  // namespace

Scenario generate(const ScenarioConfig& cfg) {
    if (cfg.n_billboards < 0 || cfg.n_drivers < 1 || cfg.fps <= 0.0 ||
        !cfg.dims.valid() || !cfg.saliency_dims.valid() ||
        cfg.frames_per_pass < 1 || cfg.frames_per_driver < cfg.frames_per_pass)
        throw std::invalid_argument("invalid scenario configuration");
    if (cfg.noise.miss_prob < 0.0 || cfg.noise.miss_prob > 1.0 ||
        cfg.noise.fp_rate < 0.0)
        throw std::invalid_argument("invalid noise configuration");
    const double max_area =
        cfg.start_area_fraction * cfg.dims.area() *
        std::pow(cfg.growth_ratio, cfg.frames_per_pass - 1);
    if (max_area > 0.25 * cfg.dims.area())
        throw std::invalid_argument("pass grows the box beyond a quarter of the frame");

    const bool noiseless = cfg.noise.center_jitter == 0.0 && cfg.noise.size_jitter == 0.0 &&
                           cfg.noise.miss_prob == 0.0 && cfg.noise.fp_rate == 0.0;

    Scenario sc;
    sc.config = cfg;
    const Rng root(cfg.seed);

    // planned dwell bookkeeping
    std::vector<BillboardOracle> oracle(std::size_t(cfg.n_billboards));
    for (int b = 0; b < cfg.n_billboards; ++b) oracle[std::size_t(b)].billboard_id = b + 1;

    for (int d = 0; d < cfg.n_drivers; ++d) {
        Rng rng = root.fork(0x1000 + std::uint64_t(d));
        DriverSequence seq;
        {
            char buf[8];
            std::snprintf(buf, sizeof buf, "d%02d", d + 1);
            seq.meta.driver_id = buf;
            seq.meta.name = std::string("synth-") + buf;
        }
        seq.meta.fps = cfg.fps;
        seq.meta.dims = cfg.dims;

        // stagger passes across the sequence
        const int span = cfg.frames_per_driver - cfg.frames_per_pass;
        std::vector<PassPlan> plans(std::size_t(cfg.n_billboards));
        for (int b = 0; b < cfg.n_billboards; ++b) {
            PassPlan p;
            p.start_frame =
                1 + (cfg.n_billboards > 1 ? (span * b) / (cfg.n_billboards - 1) : span / 2);
            Rng brng = root.fork(0x2000 + std::uint64_t(d) * 8191 + std::uint64_t(b));
            p.x_from = cfg.dims.width * (0.35 + 0.30 * brng.uniform());
            p.x_to = cfg.dims.width * (b % 2 == 0 ? 0.80 : 0.20);
            p.y_from = cfg.dims.height * (0.40 + 0.20 * brng.uniform());
            p.y_to = cfg.dims.height * 0.5;
            plans[std::size_t(b)] = p;
        }

        // billboard boxes per frame
        std::map<int, std::vector<std::pair<int, BoundingBox>>> boxes;  // frame -> (b, box)
        for (int b = 0; b < cfg.n_billboards; ++b) {
            const auto& plan = plans[std::size_t(b)];
            for (int t = 0; t < cfg.frames_per_pass; ++t) {
                const int frame = plan.start_frame + t;
                boxes[frame].emplace_back(b, pass_box(cfg, plan, frame));
            }
        }

        // place each billboard's dwell window inside its pass so the planned
        // fixation (the box center) touches no other billboard's box and no
        // frame carries more than two fixation points
        std::map<int, std::vector<std::pair<int, GazePoint>>> fixations;  // frame -> (b, pt)
        constexpr double kClearance = 16.0;
        auto box_at = [&](int frame, int b) {
            return pass_box(cfg, plans[std::size_t(b)], frame);
        };
        auto window_ok = [&](int b, int first, int dwell) {
            for (int f = first; f < first + dwell; ++f) {
                const auto fit = fixations.find(f);
                const std::size_t existing = fit == fixations.end() ? 0 : fit->second.size();
                if (existing >= 2) return false;
                const BoundingBox own = box_at(f, b);
                const GazePoint pt{own.center_x(), own.center_y()};
                for (const auto& [ob, obox] : boxes.at(f)) {
                    if (ob == b) continue;
                    const BoundingBox inflated{obox.x - kClearance, obox.y - kClearance,
                                               obox.w + 2 * kClearance, obox.h + 2 * kClearance};
                    if (inflated.contains(pt.x, pt.y)) return false;
                }
                if (fit != fixations.end())
                    for (const auto& [ob, opt] : fit->second)
                        if (own.contains(opt.x, opt.y)) return false;
            }
            return true;
        };
        for (int b = 0; b < cfg.n_billboards; ++b) {
            const int dwell = default_dwell_frames(cfg, d, b + 1);
            if (dwell > cfg.frames_per_pass)
                throw std::invalid_argument("dwell plan exceeds frames_per_pass");
            if (dwell == 0) continue;
            const int start = plans[std::size_t(b)].start_frame;
            const int mid_off = (cfg.frames_per_pass - dwell) / 2;
            int chosen = -1;
            for (int step = 0; step <= cfg.frames_per_pass - dwell; ++step) {
                for (int sgn : {+1, -1}) {
                    const int off = mid_off + sgn * step;
                    if (off < 0 || off > cfg.frames_per_pass - dwell) continue;
                    if (window_ok(b, start + off, dwell)) {
                        chosen = start + off;
                        break;
                    }
                    if (step == 0) break;  // mid offset tried once
                }
                if (chosen >= 0) break;
            }
            if (chosen < 0)
                throw std::invalid_argument("could not place a collision-free dwell window");
            for (int f = chosen; f < chosen + dwell; ++f) {
                const BoundingBox own = box_at(f, b);
                fixations[f].emplace_back(b, GazePoint{own.center_x(), own.center_y()});
            }
        }

        for (int frame = 1; frame <= cfg.frames_per_driver; ++frame) {
            GazeSample gs;
            gs.frame = frame;
            const auto fit = fixations.find(frame);
            if (fit != fixations.end())
                for (const auto& [b, pt] : fit->second) gs.points.push_back(pt);

            const auto bit = boxes.find(frame);
            if (bit != boxes.end()) {
                for (const auto& [b, box] : bit->second) {
                    FrameDetection g;
                    g.frame = frame;
                    g.id = b + 1;
                    g.box = box;
                    g.confidence = 1.0;
                    seq.gt.push_back(g);

                    if (noiseless) {
                        seq.detections.push_back(g);
                        continue;
                    }
                    if (rng.uniform() < cfg.noise.miss_prob) continue;
                    FrameDetection det = g;
                    det.id = -1;
                    det.box.x += rng.normal(0.0, cfg.noise.center_jitter);
                    det.box.y += rng.normal(0.0, cfg.noise.center_jitter);
                    det.box.w = std::max(1.0, det.box.w + rng.normal(0.0, cfg.noise.size_jitter));
                    det.box.h = std::max(1.0, det.box.h + rng.normal(0.0, cfg.noise.size_jitter));
                    det.confidence = 0.75 + 0.2 * rng.uniform();
                    seq.detections.push_back(det);
                }
            }

            if (!noiseless) {
                double expected = cfg.noise.fp_rate;
                while (expected > 0.0 && rng.uniform() < expected) {
                    FrameDetection fp;
                    fp.frame = frame;
                    fp.id = -1;
                    fp.box.w = rng.uniform(20.0, 100.0);
                    fp.box.h = rng.uniform(10.0, 60.0);
                    fp.box.x = rng.uniform(0.0, cfg.dims.width - fp.box.w);
                    fp.box.y = rng.uniform(0.0, cfg.dims.height - fp.box.h);
                    fp.confidence = rng.uniform(cfg.conf_low, cfg.conf_high);
                    seq.detections.push_back(fp);
                    expected -= 1.0;
                }
            }

            if (gs.points.empty()) gs.points.push_back(kRoadPoint);
            seq.gaze.emplace(frame, std::move(gs));
        }

        // realized dwell per billboard: frames whose fixation set hits the box
        for (int b = 0; b < cfg.n_billboards; ++b) {
            int gazed = 0;
            for (const auto& [frame, vec] : boxes) {
                const BoundingBox* own = nullptr;
                for (const auto& [bb, box] : vec)
                    if (bb == b) own = &box;
                if (!own) continue;
                const auto& gs = seq.gaze.at(frame);
                for (const auto& p : gs.points) {
                    if (own->contains(p.x, p.y)) {
                        ++gazed;
                        break;
                    }
                }
            }
            oracle[std::size_t(b)].per_driver_ms.push_back(gazed * 1000.0 / cfg.fps);
        }
        sc.drivers.push_back(std::move(seq));
    }

    for (auto& bo : oracle) {
        std::vector<double> sorted = bo.per_driver_ms;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        bo.median_ms = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        bo.category = bo.median_ms == 0.0
                          ? SignificanceCategory::None
                          : (bo.median_ms < 250.0 ? SignificanceCategory::Short
                                                  : SignificanceCategory::Long);
    }
    sc.oracle = std::move(oracle);
    return sc;
}

SaliencyGrid synth_saliency_frame(const GazeSample& sample, const ScenarioConfig& cfg) {
    const double sx = double(cfg.saliency_dims.width) / cfg.dims.width;
    const double sy = double(cfg.saliency_dims.height) / cfg.dims.height;
    FixationSet fix;
    for (const auto& p : sample.points) fix.points.push_back(GazePoint{p.x * sx, p.y * sy});
    if (fix.points.empty()) {
        SaliencyGrid g;
        g.dims = cfg.saliency_dims;
        g.values.assign(std::size_t(cfg.saliency_dims.width) * cfg.saliency_dims.height, 0);
        return g;
    }
    return fixation_density(fix, cfg.saliency_dims, cfg.saliency_sigma);
}

namespace {

nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
    nlohmann::ordered_json j;
    j["seed"] = c.seed;
    j["n_billboards"] = c.n_billboards;
    j["n_drivers"] = c.n_drivers;
    j["fps"] = c.fps;
    j["width"] = c.dims.width;
    j["height"] = c.dims.height;
    j["saliency_width"] = c.saliency_dims.width;
    j["saliency_height"] = c.saliency_dims.height;
    j["frames_per_driver"] = c.frames_per_driver;
    j["frames_per_pass"] = c.frames_per_pass;
    j["growth_ratio"] = c.growth_ratio;
    j["start_area_fraction"] = c.start_area_fraction;
    j["center_jitter"] = c.noise.center_jitter;
    j["size_jitter"] = c.noise.size_jitter;
    j["miss_prob"] = c.noise.miss_prob;
    j["fp_rate"] = c.noise.fp_rate;
    j["saliency_sigma"] = c.saliency_sigma;
    j["conf_low"] = c.conf_low;
    j["conf_high"] = c.conf_high;
    return j;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid scenario config: ") + e.what());
    }
    // accept both a bare config object and a full scenario.json document
    if (j.is_object() && j.contains("config") && j.at("config").is_object())
        j = j.at("config");
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("n_billboards", c.n_billboards);
    get("n_drivers", c.n_drivers);
    get("fps", c.fps);
    get("width", c.dims.width);
    get("height", c.dims.height);
    get("saliency_width", c.saliency_dims.width);
    get("saliency_height", c.saliency_dims.height);
    get("frames_per_driver", c.frames_per_driver);
    get("frames_per_pass", c.frames_per_pass);
    get("growth_ratio", c.growth_ratio);
    get("start_area_fraction", c.start_area_fraction);
    get("center_jitter", c.noise.center_jitter);
    get("size_jitter", c.noise.size_jitter);
    get("miss_prob", c.noise.miss_prob);
    get("fp_rate", c.noise.fp_rate);
    get("saliency_sigma", c.saliency_sigma);
    get("conf_low", c.conf_low);
    get("conf_high", c.conf_high);
    return c;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    nlohmann::ordered_json doc;
    doc["config"] = config_to_json(scenario.config);
    auto& bills = doc["oracle"]["billboards"] = nlohmann::ordered_json::array();
    for (const auto& bo : scenario.oracle) {
        bills.push_back({{"id", bo.billboard_id},
                         {"per_driver_ms", bo.per_driver_ms},
                         {"median_ms", bo.median_ms},
                         {"category", to_string(bo.category)}});
    }
    {
        std::ofstream f(dir / "scenario.json");
        if (!f) throw std::runtime_error("cannot write scenario.json");
        f << doc.dump(1) << '\n';
    }

    for (const auto& seq : scenario.drivers) {
        const fs::path ddir = dir / "drivers" / seq.meta.driver_id;
        fs::create_directories(ddir / "saliency");
        {
            std::ofstream f(ddir / "meta.txt");
            write_meta(f, seq.meta);
        }
        save_detections(ddir / "gt.txt", seq.gt);
        save_detections(ddir / "det.txt", seq.detections);
        {
            std::ofstream f(ddir / "gaze.txt");
            write_gaze(f, seq.gaze);
        }

        // saliency grids only for frames where some billboard is visible
        std::set<int> visible;
        for (const auto& g : seq.gt) visible.insert(g.frame);
        for (int frame : visible) {
            const auto it = seq.gaze.find(frame);
            static const GazeSample kEmpty;
            const GazeSample& gs = it == seq.gaze.end() ? kEmpty : it->second;
            save_saliency_grid(ddir / "saliency" / saliency_frame_name(frame),
                               synth_saliency_frame(gs, scenario.config));
        }
    }
}

std::vector<BillboardOracle> load_scenario_oracle(const std::filesystem::path& scenario_json) {
    std::ifstream f(scenario_json);
    if (!f) throw std::runtime_error("cannot open " + scenario_json.string());
    nlohmann::json doc;
    f >> doc;
    std::vector<BillboardOracle> out;
    for (const auto& jb : doc.at("oracle").at("billboards")) {
        BillboardOracle bo;
        bo.billboard_id = jb.at("id").get<int>();
        bo.per_driver_ms = jb.at("per_driver_ms").get<std::vector<double>>();
        bo.median_ms = jb.at("median_ms").get<double>();
        const auto cat = category_from_string(jb.at("category").get<std::string>());
        if (!cat) throw std::runtime_error("unknown category in scenario oracle");
        bo.category = *cat;
        out.push_back(std::move(bo));
    }
    return out;
}

std::vector<std::string> oracle_check(
    const Scenario& scenario,
    const std::map<int, SignificanceCategory>& recovered_categories,
    const std::map<int, double>& recovered_median_ms,
    std::optional<double> hota_on_noiseless) {
    std::vector<std::string> mismatches;
    const double frame_ms = 1000.0 / scenario.config.fps;
    for (const auto& bo : scenario.oracle) {
        const auto cit = recovered_categories.find(bo.billboard_id);
        if (cit == recovered_categories.end()) {
            mismatches.push_back("billboard " + std::to_string(bo.billboard_id) +
                                 ": no recovered category");
        } else if (cit->second != bo.category) {
            mismatches.push_back("billboard " + std::to_string(bo.billboard_id) +
                                 ": category " + to_string(cit->second) + " != planned " +
                                 to_string(bo.category));
        }
        const auto mit = recovered_median_ms.find(bo.billboard_id);
        if (mit != recovered_median_ms.end() &&
            std::abs(mit->second - bo.median_ms) > frame_ms + 1e-9) {
            std::ostringstream os;
            os << "billboard " << bo.billboard_id << ": median " << mit->second
               << " ms deviates from planned " << bo.median_ms << " ms";
            mismatches.push_back(os.str());
        }
    }
    if (hota_on_noiseless && std::abs(*hota_on_noiseless - 1.0) > 1e-12)
        mismatches.push_back("noiseless HOTA " + std::to_string(*hota_on_noiseless) + " != 1.0");
    return mismatches;
}

}  // namespace bbsig
