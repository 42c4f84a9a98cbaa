#include "svg.hpp"

#include <cstdio>

namespace slicedot::cli {

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Svg::Svg(double width, double height) : width_(width), height_(height) {}

void Svg::circle(double cx, double cy, double r, std::string_view fill, double opacity) {
  body_ += "<circle cx=\"" + svg_number(cx) + "\" cy=\"" + svg_number(cy) + "\" r=\"" + svg_number(r) +
           "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" + svg_number(opacity) + "\"/>\n";
}

void Svg::ring(double cx, double cy, double r, std::string_view stroke) {
  body_ += "<circle cx=\"" + svg_number(cx) + "\" cy=\"" + svg_number(cy) + "\" r=\"" + svg_number(r) +
           "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void Svg::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width) {
  body_ += "<line x1=\"" + svg_number(x1) + "\" y1=\"" + svg_number(y1) + "\" x2=\"" + svg_number(x2) + "\" y2=\"" +
           svg_number(y2) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + svg_number(width) +
           "\"/>\n";
}

void Svg::polyline(const std::string& points, std::string_view stroke) {
  body_ += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void Svg::text(double x, double y, std::string_view content, double size) {
  body_ += "<text x=\"" + svg_number(x) + "\" y=\"" + svg_number(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           svg_number(size) + "\">" + escape(content) + "</text>\n";
}

std::string Svg::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_number(width_) + "\" height=\"" +
         svg_number(height_) + "\" viewBox=\"0 0 " + svg_number(width_) + ' ' + svg_number(height_) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

}  // namespace slicedot::cli
