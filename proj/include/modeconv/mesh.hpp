#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "modeconv/geometry.hpp"

namespace modeconv {

enum class BoundaryTag : std::uint8_t { Wall, TruncationLeft, TruncationRight, Sigma, Symmetry };

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
  int a, b;  // oriented with the domain on the left
  BoundaryTag tag;
};

struct MeshParams {
  double h = 0.05;          // channel cell size away from the junctions
  int junction_levels = 3;  // local size h 2^-levels at the ligament mouths
  int min_layers = 3;       // element layers across each ligament
  double grading = 0.3;     // growth of the local size with distance from a mouth
  double min_quality = 0.1; // build fails below this triangle quality
};

struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> region;                    // 0 channel, k + 1 for ligament k
  std::vector<BoundaryEdge> boundary;
  bool full = false;
  double h = 0.0, R = 0.0, junction = 0.0;
  int junction_levels = 0;
  std::vector<int> layers;              // per ligament
  std::vector<double> sigma;            // per ligament: layer thickness
  std::vector<int> point_nodes;         // marked vertices (point-source meshes)
  std::vector<int> mirror_of;           // full meshes: mirror_of[i] = image of half node i
  std::uint64_t fingerprint = 0;        // hash of the (half) mesh the data came from
};

// Half-domain mesh of the geometry (x <= 0), or its mirror union when geom.full is set.
Mesh build_mesh(const WaveguideGeometry& geom, const MeshParams& params);

// Reflects a half mesh across x = 0. SIGMA edges become interior; TRUNCATION_LEFT images
// are tagged TRUNCATION_RIGHT.
Mesh mirror_mesh(const Mesh& half);

// Channel [-R, -1/2] x [0, 1] closed by a wall at x = -1/2 carrying a marked vertex at
// (-1/2, y_point). Cells within zone of the point have size about local_size.
Mesh build_point_source_mesh(double R, double y_point, double h, double local_size, double zone,
                             double grading = 0.3);

double triangle_quality(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c);

struct MeshAudit {
  double min_quality = 1.0;
  Eigen::Vector2d worst_location = Eigen::Vector2d::Zero();
  double area = 0.0;
  bool oriented = true;
  bool conforming = true;         // every edge shared by at most 2 triangles, no hanging nodes
  bool boundary_consistent = true; // tagged edges are exactly the edges with one triangle
  int n_boundary_edges = 0;
  std::string message;
};

MeshAudit audit_mesh(const Mesh& mesh);

std::uint64_t mesh_fingerprint(const Mesh& mesh);

}  // namespace modeconv
