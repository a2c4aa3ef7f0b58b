#pragma once

#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "tdg/geometry.hpp"

namespace tdg::cli {

/// Minimal SVG writer in world coordinates (y up).
class SvgCanvas {
 public:
  void path(const std::vector<Point2>& points, bool closed, const std::string& stroke, const std::string& id = {});
  void circle(const Point2& center, double radius, const std::string& stroke, const std::string& fill = "none");
  void marker(const Point2& at, const std::string& color);
  void cross(const Point2& at, const std::string& color);
  std::string str() const;

 private:
  std::vector<std::string> elements_;
  Eigen::AlignedBox2d box_;
};

/// Boundary of the target as a closed polyline.
std::vector<Point2> boundary_polyline(const ConvexTarget& target, int samples = 360);

void write_file(const std::string& path, const std::string& content);

}  // namespace tdg::cli
