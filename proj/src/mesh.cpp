#include "modeconv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <string>

#include "modeconv/errors.hpp"
#include "modeconv/quadtree.hpp"

namespace modeconv {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Wall: return "WALL";
    case BoundaryTag::TruncationLeft: return "TRUNCATION_LEFT";
    case BoundaryTag::TruncationRight: return "TRUNCATION_RIGHT";
    case BoundaryTag::Sigma: return "SIGMA";
    case BoundaryTag::Symmetry: return "SYMMETRY";
  }
  return "?";
}

double triangle_quality(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c) {
  Eigen::Vector2d u = b - a, v = c - a, w = c - b;
  double area = 0.5 * (u.x() * v.y() - u.y() * v.x());
  double l2 = u.squaredNorm() + v.squaredNorm() + w.squaredNorm();
  return 4.0 * std::sqrt(3.0) * area / l2;
}

namespace {

// Opening in the channel end wall: a ligament mouth (layers > 0) or a marked point.
struct Mouth {
  double y;
  double width;      // 0 for a point
  int layers;        // 0 for a point
  double delta;      // requested local cell height
  double zone;       // radius of uniform local refinement
  // filled by the layout
  int level = 0;
  double step = 0.0;  // lattice spacing at `level`
  double eta = 0.0;   // pre-image of y under the remap
  double slope = 1.0;
  std::int64_t lo = 0;  // fine-lattice index of the lowest mouth node
  std::int64_t stride = 0;
};

struct Remap {
  std::vector<double> eta, y;
  double operator()(double e) const {
    auto it = std::upper_bound(eta.begin(), eta.end(), e);
    std::size_t k = std::clamp<std::size_t>(it - eta.begin(), 1, eta.size() - 1);
    double t = (e - eta[k - 1]) / (eta[k] - eta[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
  }
};

struct ChannelMesh {
  Mesh mesh;
  std::vector<std::vector<int>> mouth_nodes;  // ligament mouths in increasing y
};

// Quadtree mesh of [-R, -xj] x [0, 1]. The right edge is a wall (or SIGMA when right_sigma)
// except across ligament mouths, whose nodes land exactly at y_k - width/2 + j sigma.
ChannelMesh build_channel(double R, double xj, double h, double grading, std::vector<Mouth> mouths,
                          bool right_sigma) {
  if (!(h > 0.0)) throw ConfigError("mesh size h must be positive");
  const int ny = std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
  const double ch = 1.0 / ny;
  const double Lc = R - xj;
  const int nx = std::max(1, static_cast<int>(std::lround(Lc / ch)));
  const double cw = Lc / nx;

  for (Mouth& m : mouths) {
    double sigma = m.layers > 0 ? m.width / m.layers : m.delta;
    m.level = std::max(0, static_cast<int>(std::lround(std::log2(ch / sigma))));
    m.step = std::ldexp(ch, -m.level);
    double k = m.y / m.step;
    if (m.layers % 2 == 1)
      m.eta = (std::floor(k) + 0.5) * m.step;
    else
      m.eta = std::round(k) * m.step;
    m.slope = m.layers > 0 ? sigma / m.step : 1.0;
  }
  std::sort(mouths.begin(), mouths.end(), [](const Mouth& a, const Mouth& b) { return a.y < b.y; });

  Remap remap;
  remap.eta.push_back(0.0);
  remap.y.push_back(0.0);
  for (const Mouth& m : mouths) {
    double w = (0.5 * m.layers + 2) * m.step;
    remap.eta.push_back(m.eta - w);
    remap.y.push_back(m.y - m.slope * w);
    remap.eta.push_back(m.eta + w);
    remap.y.push_back(m.y + m.slope * w);
  }
  remap.eta.push_back(1.0);
  remap.y.push_back(1.0);
  for (std::size_t k = 1; k < remap.eta.size(); ++k) {
    double de = remap.eta[k] - remap.eta[k - 1], dy = remap.y[k] - remap.y[k - 1];
    if (!(de > 0.0 && dy > 0.0 && dy / de < 2.0 && dy / de > 0.5))
      throw GeometryError("mouths too close to each other or to a channel wall near y = " +
                          std::to_string(remap.y[k]));
  }

  QuadtreeSpec qs;
  qs.nx = nx;
  qs.ny = ny;
  qs.target = [&](double, double y0, double x1, double y1) {
    double best = h / ch;
    for (const Mouth& m : mouths) {
      double half = 0.5 * m.layers * m.step / ch;
      double e = m.eta / ch;
      double dx = std::max(0.0, nx - x1) * cw / ch;
      double dy = std::max({0.0, y0 - (e + half), (e - half) - y1});
      double d = std::max(0.0, std::hypot(dx, dy) - m.zone / ch);
      best = std::min(best, m.step / ch + grading * d);
    }
    return best;
  };
  QuadtreeMesh q = build_quadtree_mesh(qs);
  const int F = q.fine_level;
  for (Mouth& m : mouths) {
    if (m.level + 1 > F) throw GeometryError("junction refinement did not reach the mouth");
    std::int64_t unit = std::int64_t{1} << (F - m.level - 1);  // half step
    std::int64_t center2 = std::llround(2 * m.eta / m.step);  // in half steps
    m.lo = (center2 - m.layers) * unit;
    m.stride = 2 * unit;
  }

  const std::int64_t Xr = static_cast<std::int64_t>(nx) << F;
  const std::int64_t Yt = static_cast<std::int64_t>(ny) << F;
  const double sc = std::ldexp(1.0, -F);

  ChannelMesh out;
  Mesh& mesh = out.mesh;
  mesh.nodes.resize(q.nodes.size());
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    auto [X, Y] = q.nodes[i];
    double x = X == Xr ? -xj : -R + X * sc * cw;
    double y = Y == Yt ? 1.0 : (Y == 0 ? 0.0 : remap(Y * sc * ch));
    mesh.nodes[i] = {x, y};
  }
  mesh.triangles = q.triangles;
  mesh.region.assign(q.triangles.size(), 0);

  for (const auto& e : q.boundary) {
    auto A = q.nodes[e[0]], B = q.nodes[e[1]];
    if (A[0] == 0 && B[0] == 0) {
      mesh.boundary.push_back({e[0], e[1], BoundaryTag::TruncationLeft});
    } else if (A[0] == Xr && B[0] == Xr) {
      std::int64_t ylo = std::min(A[1], B[1]), yhi = std::max(A[1], B[1]);
      bool open = false;
      for (const Mouth& m : mouths)
        if (m.layers > 0 && ylo >= m.lo && yhi <= m.lo + m.layers * m.stride) open = true;
      if (open) continue;
      mesh.boundary.push_back({e[0], e[1], right_sigma ? BoundaryTag::Sigma : BoundaryTag::Wall});
    } else {
      mesh.boundary.push_back({e[0], e[1], BoundaryTag::Wall});
    }
  }

  for (const Mouth& m : mouths) {
    if (m.layers == 0) {
      int id = q.find(Xr, m.lo);
      if (id < 0) throw GeometryError("marked point is not a mesh vertex");
      mesh.nodes[id].y() = m.y;
      mesh.point_nodes.push_back(id);
    }
  }
  out.mesh.junction = xj;
  out.mesh.R = R;
  out.mesh.h = h;
  for (const Mouth& m : mouths) {
    if (m.layers == 0) continue;
    std::vector<int> ids;
    for (int j = 0; j <= m.layers; ++j) {
      int id = q.find(Xr, m.lo + j * m.stride);
      if (id < 0) throw GeometryError("ligament mouth nodes missing from the channel mesh");
      ids.push_back(id);
    }
    out.mouth_nodes.push_back(std::move(ids));
  }
  return out;
}

void add_tube(Mesh& mesh, const Centerline& c, const LigamentSpec& spec, int lig, int layers,
              double h, const std::vector<int>& mouth_nodes) {
  const double eps = spec.width, sigma = eps / layers;
  const double ds = std::min(h, 2 * sigma);
  const int ns = std::max(2, static_cast<int>(std::ceil(c.length() / ds - 1e-9)));
  const int m = layers;
  std::vector<int> ids((ns + 1) * (m + 1));
  auto at = [&](int i, int j) -> int& { return ids[i * (m + 1) + j]; };
  for (int j = 0; j <= m; ++j) at(0, j) = mouth_nodes[j];
  for (int i = 1; i <= ns; ++i) {
    double s = c.length() * i / ns;
    CurvePoint cp = c.eval(s);
    Eigen::Vector2d n(-cp.t.y(), cp.t.x());
    for (int j = 0; j <= m; ++j) {
      Eigen::Vector2d p = cp.p + (-0.5 * eps + j * sigma) * n;
      if (i == ns) p.x() = 0.0;
      at(i, j) = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(p);
    }
  }
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < m; ++j) {
      int a = at(i, j), b = at(i + 1, j), cc = at(i + 1, j + 1), d = at(i, j + 1);
      mesh.triangles.push_back({a, b, cc});
      mesh.triangles.push_back({a, cc, d});
      mesh.region.push_back(lig + 1);
      mesh.region.push_back(lig + 1);
    }
    mesh.boundary.push_back({at(i, 0), at(i + 1, 0), BoundaryTag::Wall});
    mesh.boundary.push_back({at(i + 1, m), at(i, m), BoundaryTag::Wall});
  }
  for (int j = 0; j < m; ++j) mesh.boundary.push_back({at(ns, j), at(ns, j + 1), BoundaryTag::Sigma});
}

void check_quality(const Mesh& mesh, double threshold) {
  for (const auto& t : mesh.triangles) {
    double q = triangle_quality(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    if (!(q > threshold)) {
      Eigen::Vector2d c = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3;
      throw GeometryError("degenerate triangle (quality " + std::to_string(q) + ") at (" +
                          std::to_string(c.x()) + ", " + std::to_string(c.y()) + ")");
    }
  }
}

}  // namespace

std::uint64_t mesh_fingerprint(const Mesh& mesh) {
  std::uint64_t hsh = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      hsh ^= b[i];
      hsh *= 1099511628211ull;
    }
  };
  for (const auto& p : mesh.nodes) mix(p.data(), 2 * sizeof(double));
  for (const auto& t : mesh.triangles) mix(t.data(), 3 * sizeof(int));
  return hsh;
}

Mesh build_mesh(const WaveguideGeometry& geom, const MeshParams& params) {
  if (params.min_layers < 1) throw ConfigError("min_layers must be positive");
  if (params.junction_levels < 0) throw ConfigError("junction_levels must be non-negative");
  auto lines = validate_geometry(geom);

  std::vector<Mouth> mouths;
  std::vector<int> layer_count;
  for (const auto& spec : geom.ligaments) {
    double t = std::min(std::ldexp(params.h, -params.junction_levels), spec.width / params.min_layers);
    int layers = std::max(params.min_layers, static_cast<int>(std::lround(spec.width / t)));
    layer_count.push_back(layers);
    mouths.push_back({spec.y_attach, spec.width, layers, spec.width / layers, 0.0});
  }
  ChannelMesh ch = build_channel(geom.R, geom.junction(), params.h, params.grading, mouths,
                                 geom.ligaments.empty());
  Mesh mesh = std::move(ch.mesh);

  // mouths were sorted by y; walk them in that order
  std::vector<std::size_t> order(geom.ligaments.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return geom.ligaments[a].y_attach < geom.ligaments[b].y_attach;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    std::size_t k = order[r];
    add_tube(mesh, lines[k], geom.ligaments[k], static_cast<int>(k), layer_count[k], params.h,
             ch.mouth_nodes[r]);
  }

  mesh.full = false;
  mesh.junction_levels = params.junction_levels;
  mesh.layers = layer_count;
  for (std::size_t k = 0; k < geom.ligaments.size(); ++k)
    mesh.sigma.push_back(geom.ligaments[k].width / layer_count[k]);
  check_quality(mesh, params.min_quality);
  mesh.fingerprint = mesh_fingerprint(mesh);
  return geom.full ? mirror_mesh(mesh) : mesh;
}

Mesh mirror_mesh(const Mesh& half) {
  if (half.full) throw ConfigError("mirror_mesh expects a half mesh");
  Mesh full = half;
  full.full = true;
  const int n = static_cast<int>(half.nodes.size());
  full.mirror_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const auto& p = half.nodes[i];
    if (p.x() == 0.0) {
      full.mirror_of[i] = i;
    } else {
      full.mirror_of[i] = static_cast<int>(full.nodes.size());
      full.nodes.emplace_back(-p.x(), p.y());
    }
  }
  for (std::size_t t = 0; t < half.triangles.size(); ++t) {
    const auto& tri = half.triangles[t];
    full.triangles.push_back({full.mirror_of[tri[0]], full.mirror_of[tri[2]], full.mirror_of[tri[1]]});
    full.region.push_back(half.region[t]);
  }
  full.boundary.clear();
  for (const auto& e : half.boundary) {
    if (e.tag == BoundaryTag::Sigma) continue;
    full.boundary.push_back(e);
    BoundaryTag tag = e.tag == BoundaryTag::TruncationLeft ? BoundaryTag::TruncationRight : e.tag;
    full.boundary.push_back({full.mirror_of[e.b], full.mirror_of[e.a], tag});
  }
  full.point_nodes.clear();
  return full;
}

Mesh build_point_source_mesh(double R, double y_point, double h, double local_size, double zone,
                             double grading) {
  if (!(y_point > 0.0 && y_point < 1.0)) throw ConfigError("point must lie in (0, 1)");
  std::vector<Mouth> mouths{{y_point, 0.0, 0, local_size, zone}};
  ChannelMesh ch = build_channel(R, 0.5, h, grading, mouths, false);
  Mesh mesh = std::move(ch.mesh);
  check_quality(mesh, 0.1);
  mesh.fingerprint = mesh_fingerprint(mesh);
  return mesh;
}

MeshAudit audit_mesh(const Mesh& mesh) {
  MeshAudit a;
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector2d &p = mesh.nodes[t[0]], &q = mesh.nodes[t[1]], &r = mesh.nodes[t[2]];
    double area = 0.5 * ((q - p).x() * (r - p).y() - (q - p).y() * (r - p).x());
    if (!(area > 0.0)) a.oriented = false;
    a.area += area;
    double qual = triangle_quality(p, q, r);
    if (qual < a.min_quality) {
      a.min_quality = qual;
      a.worst_location = (p + q + r) / 3;
    }
    for (int k = 0; k < 3; ++k) {
      int u = t[k], v = t[(k + 1) % 3];
      ++count[{std::min(u, v), std::max(u, v)}];
    }
  }
  std::map<std::pair<int, int>, int> tagged;
  for (const auto& e : mesh.boundary) ++tagged[{std::min(e.a, e.b), std::max(e.a, e.b)}];
  a.n_boundary_edges = static_cast<int>(mesh.boundary.size());
  for (const auto& [e, c] : count) {
    if (c > 2) {
      a.conforming = false;
      a.message = "edge shared by more than two triangles";
    }
    auto it = tagged.find(e);
    int nt = it == tagged.end() ? 0 : it->second;
    if (c == 1 && nt != 1) {
      a.boundary_consistent = false;
      a.conforming = false;
      a.message = "untagged or hanging boundary edge at node " + std::to_string(e.first);
    }
    if (c == 2 && nt > 0) {
      a.boundary_consistent = false;
      a.message = "interior edge carries a boundary tag";
    }
  }
  for (const auto& [e, c] : tagged) {
    if (c != 1) {
      a.boundary_consistent = false;
      a.message = "boundary edge tagged more than once";
    }
    if (!count.count(e)) {
      a.boundary_consistent = false;
      a.message = "tagged edge is not a triangle edge";
    }
  }
  return a;
}

}  // namespace modeconv
