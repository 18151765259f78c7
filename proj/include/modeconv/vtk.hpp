#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "modeconv/fem.hpp"
#include "modeconv/mesh.hpp"

namespace modeconv {

// Legacy ASCII VTK. Triangles plus tagged boundary lines; cell data "region" and "tag".
void write_mesh_vtk(std::ostream& os, const Mesh& mesh);

// Quadratic triangles (cell type 22) on the P2 DOFs with point data re, im and abs of u.
void write_field_vtk(std::ostream& os, const FemSpace& space, const Eigen::VectorXcd& u,
                     const std::string& title = "field");

}  // namespace modeconv
