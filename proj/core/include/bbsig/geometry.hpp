#pragma once

#include <cmath>
#include <stdexcept>

namespace bbsig {

/// Axis-aligned box, top-left corner + size, pixel coordinates.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double center_x() const { return x + 0.5 * w; }
    double center_y() const { return y + 0.5 * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }

    bool valid() const {
        return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
               std::isfinite(w) && std::isfinite(h);
    }

    /// Boundary-inclusive point containment.
    bool contains(double px, double py) const {
        return px >= x && px <= x + w && py >= y && py <= y + h;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ImageDims {
    int width = 0;
    int height = 0;

    bool valid() const { return width > 0 && height > 0; }
    double area() const { return double(width) * double(height); }

    friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Horizontal thirds of the frame, split 40:20:40.
enum class Region { Left = 0, Center = 1, Right = 2 };

/// Intersection over union. Degenerate (empty) intersection yields 0.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Maps a horizontal center coordinate to its 40:20:40 frame section.
/// Both section boundaries belong to Center. Throws std::out_of_range
/// when center_x lies outside [0, width].
Region region_of(double center_x, const ImageDims& dims);

/// Euclidean distance between the box center and the frame center.
double center_distance(const BoundingBox& b, const ImageDims& dims);

}  // namespace bbsig
