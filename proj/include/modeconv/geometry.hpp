#pragma once

#include <Eigen/Core>
#include <vector>

namespace modeconv {

struct LigamentSpec {
  double y_attach = 0.5;  // ordinate of the attachment point (-1/2, y_attach)
  double length = 1.0;    // centerline arc length from the attachment point to x = 0
  double width = 0.01;    // epsilon
  int bend_sign = -1;     // -1 arches downward, +1 upward
};

// Family parameters. The centerline is a "U": two rounded bends of radius corner_radius,
// joined by vertical legs once the bends reach a right angle. It spans x in [-1/2, 0].
struct CenterlineOptions {
  double corner_radius = 0.125;
  double y_min = -1.0;  // vertical window the ligament tube must stay inside
  double y_max = 2.0;
};

struct CurvePoint {
  Eigen::Vector2d p;
  Eigen::Vector2d t;  // unit tangent
};

class Centerline {
 public:
  double length() const { return length_; }
  // family parameter: turning angle up to pi/2, then pi/2 + leg length
  double parameter() const { return param_; }
  double radius() const { return radius_; }
  CurvePoint eval(double s) const;
  Eigen::Vector2d point(double s) const { return eval(s).p; }
  Eigen::Vector2d tangent(double s) const { return eval(s).t; }
  Eigen::Vector2d normal(double s) const;  // left normal, (0, 1) at both ends
  double curvature(double s) const;
  double min_y() const;
  double max_y() const;

  // Arc length of the family member with parameter p and the given corner radius.
  static double family_length(double p, double radius);

 private:
  friend Centerline build_centerline(const LigamentSpec&, const CenterlineOptions&);
  struct Segment {
    double s0, len, kappa;  // kappa = signed curvature, 0 for lines
    Eigen::Vector2d p0;
    double heading0;
  };
  std::vector<Segment> segs_;
  double length_ = 0.0, param_ = 0.0, radius_ = 0.0;
};

Centerline build_centerline(const LigamentSpec& spec, const CenterlineOptions& opt = {});

struct WaveguideGeometry {
  std::vector<LigamentSpec> ligaments;  // empty: unobstructed duct
  double R = 1.5;                       // truncation abscissa |x| of the DtN boundaries
  bool full = false;                    // full symmetric domain or left half
  CenterlineOptions centerline;

  // Channels occupy |x| > junction(). Without ligaments the duct is continuous.
  double junction() const { return ligaments.empty() ? 0.0 : 0.5; }
};

// Builds all centerlines and checks that the tubes are disjoint, avoid the channel,
// and do not overlap themselves or their mirror images. Throws GeometryError.
std::vector<Centerline> validate_geometry(const WaveguideGeometry& geom);

}  // namespace modeconv
