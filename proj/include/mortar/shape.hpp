#pragma once

#include "mortar/geometry.hpp"
#include "mortar/polynomial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mortar {

// Nodal basis of a panel in vertex order: bilinear on rectangles, linear on
// triangles, as polynomials in screen coordinates.
std::vector<Poly2> shape_functions(const Panel& P);

// Gradients: entry comp * nv + a is d/dx_{comp+1} of shape function a.
std::vector<Poly2> shape_gradients(const Panel& P);

// Exact element mass and stiffness matrices.
Eigen::MatrixXd element_mass(const Panel& P);
Eigen::MatrixXd element_stiffness(const Panel& P);

}  // namespace mortar
