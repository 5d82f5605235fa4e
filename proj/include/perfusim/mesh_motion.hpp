#pragma once

#include <map>

#include "perfusim/fem.hpp"

namespace perfusim {

/**
 * Componentwise discrete-harmonic extension of boundary displacement data:
 * Laplace solves on the reference configuration with Dirichlet values at the
 * given vertices (unconstrained boundary vertices get the natural zero-flux
 * condition). Throws MeshError if the displaced mesh has a non-positive cell,
 * naming the cell.
 */
Field lift_displacement(const FeSpace& vector_space,
                        const std::map<int, Vec3>& boundary_values);

/// Displaced coordinates x = X + d.
std::vector<Vec3> displaced_coords(const Mesh& mesh, const Field& d);

/// Domain velocity (d_now - d_prev) / dt.
Field ale_velocity(const Field& d_now, const Field& d_prev, double dt);

/// BDF2 variant: (3 d_now - 4 d_prev + d_prev2) / (2 dt).
Field ale_velocity(const Field& d_now, const Field& d_prev, const Field& d_prev2,
                   double dt);

}  // namespace perfusim
