#include <cmath>
#include <string>

#include "modeconv/errors.hpp"
#include "modeconv/geometry.hpp"

namespace modeconv {

namespace {

std::vector<Eigen::Vector2d> sample(const Centerline& c, double ds) {
  int n = std::max(8, static_cast<int>(std::ceil(c.length() / ds)));
  std::vector<Eigen::Vector2d> pts(n + 1);
  for (int i = 0; i <= n; ++i) pts[i] = c.point(c.length() * i / n);
  return pts;
}

std::string where(const Eigen::Vector2d& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
}

}  // namespace

std::vector<Centerline> validate_geometry(const WaveguideGeometry& geom) {
  if (!(geom.R > geom.junction())) throw ConfigError("truncation R must exceed the junction abscissa");
  if (geom.ligaments.size() > 2) throw ConfigError("at most two ligaments are supported");

  std::vector<Centerline> lines;
  for (const auto& spec : geom.ligaments) {
    if (!(spec.y_attach - spec.width / 2 > 0.0 && spec.y_attach + spec.width / 2 < 1.0))
      throw GeometryError("ligament mouth leaves the channel end wall at y = " +
                          std::to_string(spec.y_attach));
    lines.push_back(build_centerline(spec, geom.centerline));
  }

  for (std::size_t k = 0; k < lines.size(); ++k) {
    const Centerline& c = lines[k];
    const double eps = geom.ligaments[k].width;
    const double ds = eps / 4;
    auto pts = sample(c, ds);
    const double step = c.length() / (pts.size() - 1);
    // tube edges stay in the gap between the channels
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s = step * i;
      Eigen::Vector2d n = c.normal(s);
      for (double side : {-0.5, 0.5}) {
        Eigen::Vector2d q = pts[i] + side * eps * n;
        if (q.x() < -0.5 - 1e-12 || q.x() > 1e-12)
          throw GeometryError("ligament tube leaves the gap |x| < 1/2 near " + where(q));
      }
    }
    // self-overlap and overlap with the mirror half
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (step * (j - i) < 2 * eps) continue;
        if ((pts[i] - pts[j]).norm() < eps)
          throw GeometryError("ligament tube overlaps itself near " + where(pts[i]));
      }
      for (std::size_t j = 0; j < pts.size(); ++j) {
        double arc = 2 * c.length() - step * (i + j);
        if (arc < 2 * eps) continue;
        Eigen::Vector2d m(-pts[j].x(), pts[j].y());
        if ((pts[i] - m).norm() < eps)
          throw GeometryError("ligament tube overlaps its mirror image near " + where(pts[i]));
      }
    }
  }

  if (lines.size() == 2) {
    const double clearance = 0.5 * (geom.ligaments[0].width + geom.ligaments[1].width);
    auto a = sample(lines[0], geom.ligaments[0].width / 4);
    auto b = sample(lines[1], geom.ligaments[1].width / 4);
    for (const auto& p : a) {
      for (const auto& q : b) {
        if ((p - q).norm() <= clearance ||
            (p - Eigen::Vector2d(-q.x(), q.y())).norm() <= clearance)
          throw GeometryError("ligament tubes intersect near " + where(p));
      }
    }
  }
  return lines;
}

}  // namespace modeconv
