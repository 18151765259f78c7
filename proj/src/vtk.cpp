#include "modeconv/vtk.hpp"

#include <iomanip>
#include <ostream>

namespace modeconv {

void write_mesh_vtk(std::ostream& os, const Mesh& mesh) {
  const std::size_t nt = mesh.triangles.size(), nb = mesh.boundary.size();
  os << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nodes.size() << " double\n" << std::setprecision(12);
  for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << nt + nb << ' ' << 4 * nt + 3 * nb << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary) os << "2 " << e.a << ' ' << e.b << '\n';
  os << "CELL_TYPES " << nt + nb << '\n';
  for (std::size_t k = 0; k < nt; ++k) os << "5\n";
  for (std::size_t k = 0; k < nb; ++k) os << "3\n";
  os << "CELL_DATA " << nt + nb << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < nt; ++k) os << (k < mesh.region.size() ? mesh.region[k] : 0) << '\n';
  for (std::size_t k = 0; k < nb; ++k) os << "-1\n";
  // Triangles carry -1; lines carry the BoundaryTag value.
  os << "SCALARS tag int 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < nt; ++k) os << "-1\n";
  for (const auto& e : mesh.boundary) os << static_cast<int>(e.tag) << '\n';
}

void write_field_vtk(std::ostream& os, const FemSpace& space, const Eigen::VectorXcd& u,
                     const std::string& title) {
  const int nd = space.n_dofs();
  const std::size_t nt = space.mesh().triangles.size();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nd << " double\n" << std::setprecision(12);
  for (int d = 0; d < nd; ++d) os << space.dof_point(d).x() << ' ' << space.dof_point(d).y() << " 0\n";
  os << "CELLS " << nt << ' ' << 7 * nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) {
    os << '6';
    for (int d : space.element_dofs(static_cast<int>(t))) os << ' ' << d;
    os << '\n';
  }
  os << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) os << "22\n";
  os << "POINT_DATA " << nd << '\n';
  const char* names[] = {"re", "im", "abs"};
  for (int c = 0; c < 3; ++c) {
    os << "SCALARS " << names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (int d = 0; d < nd; ++d)
      os << (c == 0 ? u[d].real() : c == 1 ? u[d].imag() : std::abs(u[d])) << '\n';
  }
}

}  // namespace modeconv
