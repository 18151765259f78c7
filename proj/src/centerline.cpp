#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "modeconv/errors.hpp"
#include "modeconv/geometry.hpp"

namespace modeconv {

namespace {

constexpr double kSpan = 0.5;  // horizontal extent of a half ligament
constexpr double kHalfPi = std::numbers::pi / 2;

struct FamilyShape {
  double theta, leg, filler;
};

FamilyShape shape(double p, double radius) {
  double theta = std::min(p, kHalfPi);
  double leg = std::max(0.0, p - kHalfPi);
  double filler = kSpan - 4 * radius * std::sin(theta) - 2 * leg * std::cos(theta);
  return {theta, leg, std::max(0.0, filler)};
}

double depth(const FamilyShape& f, double radius) {
  return 2 * radius * (1 - std::cos(f.theta)) + f.leg * std::sin(f.theta);
}

}  // namespace

double Centerline::family_length(double p, double radius) {
  FamilyShape f = shape(p, radius);
  return f.filler + 4 * radius * f.theta + 2 * f.leg;
}

CurvePoint Centerline::eval(double s) const {
  s = std::clamp(s, 0.0, length_);
  auto it = std::upper_bound(segs_.begin(), segs_.end(), s,
                             [](double v, const Segment& g) { return v < g.s0; });
  const Segment& g = *std::prev(it);
  double t = s - g.s0;
  double phi = g.heading0 + g.kappa * t;
  Eigen::Vector2d p;
  if (g.kappa == 0.0) {
    p = g.p0 + t * Eigen::Vector2d(std::cos(g.heading0), std::sin(g.heading0));
  } else {
    p = g.p0 + Eigen::Vector2d(std::sin(phi) - std::sin(g.heading0),
                               std::cos(g.heading0) - std::cos(phi)) /
                   g.kappa;
  }
  return {p, Eigen::Vector2d(std::cos(phi), std::sin(phi))};
}

Eigen::Vector2d Centerline::normal(double s) const {
  Eigen::Vector2d t = tangent(s);
  return {-t.y(), t.x()};
}

double Centerline::curvature(double s) const {
  s = std::clamp(s, 0.0, length_);
  for (auto it = segs_.rbegin(); it != segs_.rend(); ++it)
    if (s >= it->s0) return it->kappa;
  return segs_.front().kappa;
}

double Centerline::min_y() const {
  double y = segs_.front().p0.y();
  FamilyShape f = shape(param_, radius_);
  double sign = segs_.front().kappa > 0 ? 1.0 : -1.0;
  return sign < 0 ? y - depth(f, radius_) : y;
}

double Centerline::max_y() const {
  double y = segs_.front().p0.y();
  FamilyShape f = shape(param_, radius_);
  double sign = segs_.front().kappa > 0 ? 1.0 : -1.0;
  return sign > 0 ? y + depth(f, radius_) : y;
}

Centerline build_centerline(const LigamentSpec& spec, const CenterlineOptions& opt) {
  const double rho = opt.corner_radius;
  if (!(rho > 0.0) || 4 * rho > kSpan + 1e-15)
    throw ConfigError("corner radius must lie in (0, 1/8]");
  if (!(spec.width > 0.0)) throw ConfigError("ligament width must be positive");
  if (spec.bend_sign != 1 && spec.bend_sign != -1) throw ConfigError("bend_sign must be +1 or -1");
  if (!(spec.length > kSpan))
    throw GeometryError("ligament cannot reach symmetry axis: length " +
                        std::to_string(spec.length) + " <= 1/2");
  if (!(rho > spec.width / 2))
    throw GeometryError("ligament does not fit: corner radius below half the width");

  // Length is increasing in p; bracket and solve.
  const double target = spec.length;
  const double l_quarter = Centerline::family_length(kHalfPi, rho);
  double lo = 0.0, hi = kHalfPi;
  if (target > l_quarter) {
    lo = kHalfPi;
    hi = kHalfPi + 0.5 * (target - l_quarter) + 1.0;
  }
  double p = lo;
  if (target != Centerline::family_length(lo, rho)) {
    auto fn = [&](double q) { return Centerline::family_length(q, rho) - target; };
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 4e-16 * std::max(1.0, std::abs(a)); };
    auto r = boost::math::tools::toms748_solve(fn, lo, hi, tol, iters);
    p = 0.5 * (r.first + r.second);
  }

  Centerline c;
  c.param_ = p;
  c.radius_ = rho;
  FamilyShape f = shape(p, rho);
  const double s = spec.bend_sign;
  struct Piece {
    double len, kappa;
  };
  const Piece pieces[] = {{rho * f.theta, s / rho}, {f.leg, 0.0},  {rho * f.theta, -s / rho},
                          {f.filler, 0.0},          {rho * f.theta, -s / rho},
                          {f.leg, 0.0},             {rho * f.theta, s / rho}};
  Eigen::Vector2d pos(-kSpan, spec.y_attach);
  double heading = 0.0, s0 = 0.0;
  for (const Piece& pc : pieces) {
    if (pc.len <= 0.0) continue;
    Centerline::Segment g{s0, pc.len, pc.kappa, pos, heading};
    c.segs_.push_back(g);
    c.length_ = s0 + pc.len;
    CurvePoint end = c.eval(c.length_);
    pos = end.p;
    heading += pc.kappa * pc.len;
    s0 += pc.len;
  }
  if (c.segs_.empty()) throw GeometryError("degenerate centerline");
  c.length_ = s0;

  double half = spec.width / 2;
  if (c.min_y() - half < opt.y_min || c.max_y() + half > opt.y_max)
    throw GeometryError("ligament does not fit: tube leaves the window [" +
                        std::to_string(opt.y_min) + ", " + std::to_string(opt.y_max) + "]");
  return c;
}

}  // namespace modeconv
