#include "bbsig/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bbsig {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& raw, int line, const char* field) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, std::string("invalid ") + field + " '" + s + "'");
    if (!std::isfinite(v))
        throw ParseError(line, std::string("non-finite ") + field);
    return v;
}

int parse_int(const std::string& raw, int line, const char* field) {
    const std::string s = trim(raw);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, std::string("invalid ") + field + " '" + s + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

DetectionMap parse_detections(std::istream& in) {
    DetectionMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 6)
            throw ParseError(lineno, "expected frame,id,x,y,w,h[,conf]");
        FrameDetection d;
        d.frame = parse_int(fields[0], lineno, "frame");
        if (d.frame < 1) throw ParseError(lineno, "frame index must be >= 1");
        d.id = parse_int(fields[1], lineno, "id");
        d.box.x = parse_number(fields[2], lineno, "x");
        d.box.y = parse_number(fields[3], lineno, "y");
        d.box.w = parse_number(fields[4], lineno, "w");
        d.box.h = parse_number(fields[5], lineno, "h");
        if (d.box.w <= 0.0 || d.box.h <= 0.0)
            throw ParseError(lineno, "box width/height must be positive");
        if (fields.size() >= 7) {
            d.confidence = parse_number(fields[6], lineno, "conf");
            if (d.confidence < 0.0 || d.confidence > 1.0)
                throw ParseError(lineno, "conf outside [0,1]");
        }
        out[d.frame].push_back(d);
    }
    return out;
}

void write_detections(std::ostream& out, const std::vector<FrameDetection>& dets) {
    for (const auto& d : dets) {
        out << d.frame << ',' << d.id << ',' << format_double(d.box.x) << ','
            << format_double(d.box.y) << ',' << format_double(d.box.w) << ','
            << format_double(d.box.h) << ',' << format_double(d.confidence) << '\n';
    }
}

void write_detections(std::ostream& out, const DetectionMap& dets) {
    for (const auto& [frame, v] : dets) write_detections(out, v);
}

GazeMap parse_gaze(std::istream& in) {
    GazeMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 1 && fields.size() != 3 && fields.size() != 5)
            throw ParseError(lineno, fields.size() > 5
                                         ? "more than two fixation points"
                                         : "expected frame[,x1,y1[,x2,y2]]");
        GazeSample s;
        s.frame = parse_int(fields[0], lineno, "frame");
        if (s.frame < 1) throw ParseError(lineno, "frame index must be >= 1");
        for (std::size_t i = 1; i + 1 < fields.size(); i += 2) {
            GazePoint p;
            p.x = parse_number(fields[i], lineno, "x");
            p.y = parse_number(fields[i + 1], lineno, "y");
            s.points.push_back(p);
        }
        s.provenance = GazeProvenance::Recorded;
        if (out.count(s.frame)) throw ParseError(lineno, "duplicate frame index");
        out.emplace(s.frame, std::move(s));
    }
    return out;
}

void write_gaze(std::ostream& out, const GazeMap& gaze) {
    for (const auto& [frame, s] : gaze) {
        out << frame;
        for (const auto& p : s.points)
            out << ',' << format_double(p.x) << ',' << format_double(p.y);
        out << '\n';
    }
}

namespace {

// Next PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(char(c));
    }
    return tok;
}

}  // namespace

SaliencyGrid parse_saliency_grid(std::istream& in) {
    if (pgm_token(in) != "P5") throw ParseError("not a binary PGM (missing P5 magic)");
    const std::string ws = pgm_token(in), hs = pgm_token(in), ms = pgm_token(in);
    int w = 0, h = 0, maxval = 0;
    auto to_i = [](const std::string& s, int& v, const char* what) {
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ParseError(std::string("invalid PGM ") + what);
    };
    to_i(ws, w, "width");
    to_i(hs, h, "height");
    to_i(ms, maxval, "maxval");
    if (w <= 0 || h <= 0) throw ParseError("invalid PGM dimensions");
    if (maxval != 255) throw ParseError("unsupported maxval (only 255)");
    SaliencyGrid g;
    g.dims = ImageDims{w, h};
    g.values.resize(std::size_t(w) * h);
    in.read(reinterpret_cast<char*>(g.values.data()), std::streamsize(g.values.size()));
    if (std::size_t(in.gcount()) != g.values.size())
        throw ParseError("truncated PGM payload");
    return g;
}

void write_saliency_grid(std::ostream& out, const SaliencyGrid& grid) {
    out << "P5\n" << grid.dims.width << ' ' << grid.dims.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              std::streamsize(grid.values.size()));
}

SequenceMeta parse_meta(std::istream& in) {
    SequenceMeta m;
    m.dims = ImageDims{0, 0};
    bool have_fps = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "fps") {
            m.fps = parse_number(val, lineno, "fps");
            have_fps = true;
        } else if (key == "width") {
            m.dims.width = parse_int(val, lineno, "width");
        } else if (key == "height") {
            m.dims.height = parse_int(val, lineno, "height");
        } else if (key == "name") {
            m.name = val;
        } else if (key == "driver") {
            m.driver_id = val;
        } else {
            throw ParseError(lineno, "unknown key '" + key + "'");
        }
    }
    if (!m.dims.valid()) throw ParseError("meta missing width/height");
    if (!have_fps) m.fps = 25.0;
    if (m.fps <= 0.0) throw ParseError("fps must be positive");
    return m;
}

void write_meta(std::ostream& out, const SequenceMeta& meta) {
    if (!meta.name.empty()) out << "name=" << meta.name << '\n';
    out << "fps=" << format_double(meta.fps) << '\n';
    out << "width=" << meta.dims.width << '\n';
    out << "height=" << meta.dims.height << '\n';
    if (!meta.driver_id.empty()) out << "driver=" << meta.driver_id << '\n';
}

namespace {

std::ifstream open_in(const std::filesystem::path& p, std::ios::openmode mode) {
    std::ifstream f(p, mode);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return f;
}

}  // namespace

DetectionMap load_detections(const std::filesystem::path& p) {
    auto f = open_in(p, std::ios::in);
    return parse_detections(f);
}

GazeMap load_gaze(const std::filesystem::path& p) {
    auto f = open_in(p, std::ios::in);
    return parse_gaze(f);
}

SaliencyGrid load_saliency_grid(const std::filesystem::path& p) {
    auto f = open_in(p, std::ios::in | std::ios::binary);
    return parse_saliency_grid(f);
}

SequenceMeta load_meta(const std::filesystem::path& p) {
    auto f = open_in(p, std::ios::in);
    return parse_meta(f);
}

void save_detections(const std::filesystem::path& p, const std::vector<FrameDetection>& dets) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    write_detections(f, dets);
}

void save_saliency_grid(const std::filesystem::path& p, const SaliencyGrid& grid) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    write_saliency_grid(f, grid);
}

std::string saliency_frame_name(int frame) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d.pgm", frame);
    return buf;
}

}  // namespace bbsig
