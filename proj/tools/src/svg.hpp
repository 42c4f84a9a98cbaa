#pragma once

#include <string>
#include <string_view>

namespace slicedot::cli {

// Minimal standalone SVG builder; coordinates are in pixels, y pointing down.
class Svg {
 public:
  Svg(double width, double height);

  void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0);
  void ring(double cx, double cy, double r, std::string_view stroke);
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
  void polyline(const std::string& points, std::string_view stroke);
  void text(double x, double y, std::string_view content, double size = 12.0);

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string svg_number(double v);

}  // namespace slicedot::cli
