#include "perfusim/mesh_motion.hpp"

#include <string>

#include "perfusim/errors.hpp"

namespace perfusim {

Field lift_displacement(const FeSpace& vector_space,
                        const std::map<int, Vec3>& boundary_values) {
    const Mesh& mesh = *vector_space.mesh;
    const int dim = mesh.dim;
    FeSpace scalar(mesh, 1);
    const SpMat A = assemble_stiffness(scalar, mesh.vertices, 1.0);

    Field d(vector_space, "m");
    for (int c = 0; c < dim; ++c) {
        SparseSystem sys;
        sys.A = A;
        sys.b = Eigen::VectorXd::Zero(scalar.nDofs());
        sys.symmetric = true;
        for (const auto& [v, val] : boundary_values) sys.constraints.emplace_back(v, val[c]);
        const Eigen::VectorXd x = solve_sparse(sys);
        for (int v = 0; v < mesh.nVertices(); ++v)
            d.coeffs[vector_space.dof(v, c)] = x[v];
    }

    const std::vector<Vec3> coords = displaced_coords(mesh, d);
    for (int c = 0; c < mesh.nCells(); ++c)
        if (cell_volume(mesh, coords, c) <= 0.0)
            throw MeshError("displaced mesh inverts cell " + std::to_string(c));
    return d;
}

std::vector<Vec3> displaced_coords(const Mesh& mesh, const Field& d) {
    const int dim = mesh.dim;
    std::vector<Vec3> coords = mesh.vertices;
    for (int v = 0; v < mesh.nVertices(); ++v)
        for (int c = 0; c < dim; ++c) coords[v][c] += d.coeffs[d.space->dof(v, c)];
    return coords;
}

Field ale_velocity(const Field& d_now, const Field& d_prev, double dt) {
    if (d_now.space != d_prev.space) throw MeshError("ALE velocity: mismatched spaces");
    if (!(dt > 0.0)) throw MeshError("ALE velocity: dt must be positive");
    Field w(*d_now.space, "m/s");
    w.coeffs = (d_now.coeffs - d_prev.coeffs) / dt;
    return w;
}

Field ale_velocity(const Field& d_now, const Field& d_prev, const Field& d_prev2,
                   double dt) {
    if (d_now.space != d_prev.space || d_now.space != d_prev2.space)
        throw MeshError("ALE velocity: mismatched spaces");
    if (!(dt > 0.0)) throw MeshError("ALE velocity: dt must be positive");
    Field w(*d_now.space, "m/s");
    w.coeffs = (3.0 * d_now.coeffs - 4.0 * d_prev.coeffs + d_prev2.coeffs) / (2.0 * dt);
    return w;
}

}  // namespace perfusim
