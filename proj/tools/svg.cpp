#include "svg.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tdg/errors.hpp"

namespace tdg::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

void SvgCanvas::path(const std::vector<Point2>& points, bool closed, const std::string& stroke,
                     const std::string& id) {
  if (points.empty()) return;
  std::ostringstream os;
  os << "<path";
  if (!id.empty()) os << " id=\"" << id << "\"";
  os << " d=\"";
  // A closed polyline may repeat its first point; Z closes it anyway.
  std::size_t n = points.size();
  if (closed && n > 1 && points.front() == points.back()) --n;
  for (std::size_t i = 0; i < n; ++i) {
    os << (i == 0 ? "M " : " L ") << fmt(points[i].x()) << ' ' << fmt(points[i].y());
    box_.extend(points[i]);
  }
  if (closed) os << " Z";
  os << "\" fill=\"none\" stroke=\"" << stroke << "\" vector-effect=\"non-scaling-stroke\"/>";
  elements_.push_back(os.str());
}

void SvgCanvas::circle(const Point2& center, double radius, const std::string& stroke, const std::string& fill) {
  std::ostringstream os;
  os << "<circle cx=\"" << fmt(center.x()) << "\" cy=\"" << fmt(center.y()) << "\" r=\"" << fmt(radius)
     << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" vector-effect=\"non-scaling-stroke\"/>";
  elements_.push_back(os.str());
  box_.extend(Point2(center.array() - radius));
  box_.extend(Point2(center.array() + radius));
}

void SvgCanvas::marker(const Point2& at, const std::string& color) {
  const double r = box_.isEmpty() ? 0.01 : 0.006 * box_.diagonal().norm();
  circle(at, r, color, color);
}

void SvgCanvas::cross(const Point2& at, const std::string& color) {
  const double r = box_.isEmpty() ? 0.01 : 0.01 * box_.diagonal().norm();
  std::ostringstream os;
  os << "<polyline points=\"" << fmt(at.x() - r) << ',' << fmt(at.y() - r) << ' ' << fmt(at.x() + r) << ','
     << fmt(at.y() + r) << "\" stroke=\"" << color << "\" vector-effect=\"non-scaling-stroke\"/>";
  os << "<polyline points=\"" << fmt(at.x() - r) << ',' << fmt(at.y() + r) << ' ' << fmt(at.x() + r) << ','
     << fmt(at.y() - r) << "\" stroke=\"" << color << "\" vector-effect=\"non-scaling-stroke\"/>";
  elements_.push_back(os.str());
  box_.extend(at);
}

std::string SvgCanvas::str() const {
  Eigen::AlignedBox2d b = box_.isEmpty() ? Eigen::AlignedBox2d(Point2(-1, -1), Point2(1, 1)) : box_;
  const double pad = 0.05 * b.diagonal().norm() + 1e-9;
  const Point2 lo = b.min().array() - pad;
  const Point2 hi = b.max().array() + pad;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"" << fmt(lo.x()) << ' '
     << fmt(-hi.y()) << ' ' << fmt(hi.x() - lo.x()) << ' ' << fmt(hi.y() - lo.y()) << "\">\n";
  os << "<g transform=\"scale(1,-1)\" stroke-width=\"1.5\">\n";
  for (const auto& e : elements_) os << e << '\n';
  os << "</g>\n</svg>\n";
  return os.str();
}

std::vector<Point2> boundary_polyline(const ConvexTarget& target, int samples) {
  std::vector<Point2> pts;
  pts.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double a = 2.0 * std::numbers::pi * k / samples;
    pts.push_back(target.boundary_point(Vec2(std::cos(a), std::sin(a))));
  }
  return pts;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << content;
}

}  // namespace tdg::cli
