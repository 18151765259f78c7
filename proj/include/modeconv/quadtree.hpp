#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace modeconv {

// Balanced (2:1) quadtree over an nx-by-ny grid of unit root cells, triangulated
// without hanging nodes. Leaves with a midpoint on some side get a center fan;
// other leaves are split along a diagonal.
struct QuadtreeSpec {
  int nx = 1, ny = 1;
  std::function<bool(int, int)> active;  // root-cell mask; empty means all active
  // Desired leaf size for the box [x0, x1] x [y0, y1], all in root-cell units.
  std::function<double(double x0, double y0, double x1, double y1)> target;
  int max_level = 24;
};

struct QuadtreeMesh {
  int fine_level = 0;  // integer coordinates are in units of 2^-fine_level root cells
  std::vector<std::array<std::int64_t, 2>> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> boundary;   // oriented with the domain on the left
  int max_leaf_level = 0;

  // Index of the node at integer coordinates (X, Y), or -1.
  int find(std::int64_t X, std::int64_t Y) const;
  std::unordered_map<std::uint64_t, int> lookup;
};

QuadtreeMesh build_quadtree_mesh(const QuadtreeSpec& spec);

}  // namespace modeconv
