#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbsig/geometry.hpp"

namespace bbsig {

/// Parse failure with the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

/// One detection record. id is -1 for raw (unassociated) detections and
/// >= 0 for ground-truth / tracked records.
struct FrameDetection {
    int frame = 1;
    int id = -1;
    BoundingBox box;
    double confidence = 1.0;

    friend bool operator==(const FrameDetection&, const FrameDetection&) = default;
};

using DetectionMap = std::map<int, std::vector<FrameDetection>>;

enum class GazeProvenance { Recorded, Extrapolated };

struct GazePoint {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const GazePoint&, const GazePoint&) = default;
};

struct GazeSample {
    int frame = 1;
    std::vector<GazePoint> points;  // 0..2 entries
    GazeProvenance provenance = GazeProvenance::Recorded;
};

using GazeMap = std::map<int, GazeSample>;

/// 8-bit grayscale grid, row-major.
struct SaliencyGrid {
    ImageDims dims;
    std::vector<std::uint8_t> values;

    std::uint8_t at(int x, int y) const { return values[std::size_t(y) * dims.width + x]; }
    std::uint8_t& at(int x, int y) { return values[std::size_t(y) * dims.width + x]; }

    friend bool operator==(const SaliencyGrid&, const SaliencyGrid&) = default;
};

struct SequenceMeta {
    std::string name;
    double fps = 25.0;  // Tobii Glasses 3 scene-camera default
    ImageDims dims{1920, 1080};
    std::string driver_id;
};

// MOT-style CSV: frame,id,x,y,w,h,conf[,...]; extra columns ignored.
DetectionMap parse_detections(std::istream& in);
void write_detections(std::ostream& out, const DetectionMap& dets);
void write_detections(std::ostream& out, const std::vector<FrameDetection>& dets);

// Gaze CSV: frame[,x1,y1[,x2,y2]]; absent frames mean no fixation recorded.
GazeMap parse_gaze(std::istream& in);
void write_gaze(std::ostream& out, const GazeMap& gaze);

// Binary PGM (P5), maxval 255.
SaliencyGrid parse_saliency_grid(std::istream& in);
void write_saliency_grid(std::ostream& out, const SaliencyGrid& grid);

// key=value metadata: width, height required; fps, name, driver optional.
SequenceMeta parse_meta(std::istream& in);
void write_meta(std::ostream& out, const SequenceMeta& meta);

// Path-based convenience wrappers.
DetectionMap load_detections(const std::filesystem::path& p);
GazeMap load_gaze(const std::filesystem::path& p);
SaliencyGrid load_saliency_grid(const std::filesystem::path& p);
SequenceMeta load_meta(const std::filesystem::path& p);
void save_detections(const std::filesystem::path& p, const std::vector<FrameDetection>& dets);
void save_saliency_grid(const std::filesystem::path& p, const SaliencyGrid& grid);

/// Saliency frame filename, `frame_%06d.pgm`.
std::string saliency_frame_name(int frame);

/// Shortest round-trip decimal rendering of a double (locale-independent).
std::string format_double(double v);

}  // namespace bbsig
