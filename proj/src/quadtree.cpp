#include "modeconv/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace modeconv {

namespace {

using Key = std::uint64_t;

Key cell_key(int l, std::int64_t i, std::int64_t j) {
  return (static_cast<Key>(l) << 58) | (static_cast<Key>(i) << 29) | static_cast<Key>(j);
}

Key node_key(std::int64_t X, std::int64_t Y) {
  return (static_cast<Key>(X) << 32) | static_cast<Key>(Y);
}

struct Cell {
  int l;
  std::int64_t i, j;
};

}  // namespace

int QuadtreeMesh::find(std::int64_t X, std::int64_t Y) const {
  if (X < 0 || Y < 0) return -1;
  auto it = lookup.find(node_key(X, Y));
  return it == lookup.end() ? -1 : it->second;
}

QuadtreeMesh build_quadtree_mesh(const QuadtreeSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw std::invalid_argument("quadtree: empty root grid");
  auto root_active = [&](std::int64_t i, std::int64_t j) {
    if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) return false;
    return !spec.active || spec.active(static_cast<int>(i), static_cast<int>(j));
  };
  // region at (l, i, j) lies in an active root cell
  auto inside = [&](int l, std::int64_t i, std::int64_t j) {
    if (i < 0 || j < 0) return false;
    return root_active(i >> l, j >> l);
  };

  std::unordered_set<Key> all;   // every cell ever created
  std::vector<Cell> leaves;
  std::unordered_set<Key> leaf_set;

  std::vector<Cell> work;
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i)
      if (root_active(i, j)) work.push_back({0, i, j});

  auto split = [&](const Cell& c, std::vector<Cell>& out) {
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) out.push_back({c.l + 1, 2 * c.i + a, 2 * c.j + b});
  };

  // size-driven refinement
  while (!work.empty()) {
    Cell c = work.back();
    work.pop_back();
    all.insert(cell_key(c.l, c.i, c.j));
    double sz = std::ldexp(1.0, -c.l);
    double tgt = spec.target ? spec.target(c.i * sz, c.j * sz, (c.i + 1) * sz, (c.j + 1) * sz)
                             : 1.0;
    if (sz > tgt * (1 + 1e-9) && c.l < spec.max_level) {
      split(c, work);
    } else {
      leaves.push_back(c);
      leaf_set.insert(cell_key(c.l, c.i, c.j));
    }
  }

  // 2:1 balance across sides
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Cell> next;
    next.reserve(leaves.size());
    for (const Cell& c : leaves) {
      bool refine = false;
      const int l2 = c.l + 2;
      const std::int64_t b = 4 * c.i, d = 4 * c.j;
      for (int k = 0; k < 4 && !refine; ++k) {
        const std::array<std::array<std::int64_t, 2>, 4> nb = {{{b - 1, d + k},
                                                               {b + 4, d + k},
                                                               {b + k, d - 1},
                                                               {b + k, d + 4}}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[1] < 0) continue;
          if (all.count(cell_key(l2, q[0], q[1]))) {
            refine = true;
            break;
          }
        }
      }
      if (refine) {
        leaf_set.erase(cell_key(c.l, c.i, c.j));
        std::vector<Cell> kids;
        split(c, kids);
        for (const Cell& k : kids) {
          all.insert(cell_key(k.l, k.i, k.j));
          leaf_set.insert(cell_key(k.l, k.i, k.j));
          next.push_back(k);
        }
        changed = true;
      } else {
        next.push_back(c);
      }
    }
    leaves.swap(next);
  }

  std::sort(leaves.begin(), leaves.end(), [](const Cell& a, const Cell& b) {
    if (a.l != b.l) return a.l < b.l;
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  });

  QuadtreeMesh m;
  for (const Cell& c : leaves) m.max_leaf_level = std::max(m.max_leaf_level, c.l);
  m.fine_level = m.max_leaf_level + 1;
  const int F = m.fine_level;

  auto add_node = [&](std::int64_t X, std::int64_t Y) {
    Key k = node_key(X, Y);
    auto it = m.lookup.find(k);
    if (it != m.lookup.end()) return it->second;
    int id = static_cast<int>(m.nodes.size());
    m.nodes.push_back({X, Y});
    m.lookup.emplace(k, id);
    return id;
  };

  for (const Cell& c : leaves) {
    std::int64_t s = std::int64_t{1} << (F - c.l);
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) add_node((c.i + a) * s, (c.j + b) * s);
  }

  for (const Cell& c : leaves) {
    const std::int64_t s = std::int64_t{1} << (F - c.l);
    const std::int64_t x0 = c.i * s, y0 = c.j * s, x1 = x0 + s, y1 = y0 + s, hs = s / 2;
    const int c00 = m.find(x0, y0), c10 = m.find(x1, y0), c11 = m.find(x1, y1),
              c01 = m.find(x0, y1);
    const int mb = m.find(x0 + hs, y0), mr = m.find(x1, y0 + hs), mt = m.find(x0 + hs, y1),
              ml = m.find(x0, y0 + hs);

    // counter-clockwise ring
    std::vector<int> ring;
    ring.push_back(c00);
    if (mb >= 0) ring.push_back(mb);
    ring.push_back(c10);
    if (mr >= 0) ring.push_back(mr);
    ring.push_back(c11);
    if (mt >= 0) ring.push_back(mt);
    ring.push_back(c01);
    if (ml >= 0) ring.push_back(ml);

    if (ring.size() == 4) {
      m.triangles.push_back({c00, c10, c11});
      m.triangles.push_back({c00, c11, c01});
    } else {
      int ctr = add_node(x0 + hs, y0 + hs);
      for (std::size_t k = 0; k < ring.size(); ++k)
        m.triangles.push_back({ctr, ring[k], ring[(k + 1) % ring.size()]});
    }

    // sides facing the outside of the domain
    if (!inside(c.l, c.i, c.j - 1)) m.boundary.push_back({c00, c10});
    if (!inside(c.l, c.i + 1, c.j)) m.boundary.push_back({c10, c11});
    if (!inside(c.l, c.i, c.j + 1)) m.boundary.push_back({c11, c01});
    if (!inside(c.l, c.i - 1, c.j)) m.boundary.push_back({c01, c00});
  }
  return m;
}

}  // namespace modeconv
