#include "bbsig/geometry.hpp"

#include <algorithm>

namespace bbsig {

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(a.x, b.x);
    const double iy = std::max(a.y, b.y);
    const double ix2 = std::min(a.right(), b.right());
    const double iy2 = std::min(a.bottom(), b.bottom());
    const double iw = ix2 - ix;
    const double ih = iy2 - iy;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

Region region_of(double center_x, const ImageDims& dims) {
    if (!(center_x >= 0.0 && center_x <= dims.width))
        throw std::out_of_range("region_of: center_x outside [0, width]");
    const double lo = 0.4 * dims.width;
    const double hi = 0.6 * dims.width;
    if (center_x < lo) return Region::Left;
    if (center_x > hi) return Region::Right;
    return Region::Center;
}

double center_distance(const BoundingBox& b, const ImageDims& dims) {
    const double dx = b.center_x() - 0.5 * dims.width;
    const double dy = b.center_y() - 0.5 * dims.height;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace bbsig
