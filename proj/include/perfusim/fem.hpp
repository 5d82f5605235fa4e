#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "perfusim/mesh.hpp"

namespace perfusim {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/**
 * Vertex-based P1 space; multiplicity 1 for scalars, mesh.dim for vectors.
 * DOF layout is interleaved: dof(v, c) = v * multiplicity + c.
 */
struct FeSpace {
    const Mesh* mesh = nullptr;
    int multiplicity = 1;

    FeSpace() = default;
    FeSpace(const Mesh& m, int mult) : mesh(&m), multiplicity(mult) {}

    int nDofs() const { return mesh->nVertices() * multiplicity; }
    int dof(int vertex, int comp = 0) const { return vertex * multiplicity + comp; }
};

/// Discrete field: one coefficient per DOF.
struct Field {
    const FeSpace* space = nullptr;
    Eigen::VectorXd coeffs;
    std::string units;

    Field() = default;
    explicit Field(const FeSpace& s, const std::string& u = "")
        : space(&s), coeffs(Eigen::VectorXd::Zero(s.nDofs())), units(u) {}

    double operator()(int vertex, int comp = 0) const {
        return coeffs[space->dof(vertex, comp)];
    }
    Vec3 vectorAt(int vertex) const {
        Vec3 v = Vec3::Zero();
        for (int c = 0; c < space->multiplicity; ++c) v[c] = (*this)(vertex, c);
        return v;
    }
    bool allFinite() const { return coeffs.allFinite(); }
};

/**
 * Square sparse system with optional constrained DOFs. Constraints are
 * applied by row replacement (identity row, prescribed rhs) with column
 * elimination so symmetric matrices remain symmetric.
 */
struct SparseSystem {
    SpMat A;
    Eigen::VectorXd b;
    bool symmetric = false;
    std::vector<std::pair<int, double>> constraints;

    void applyConstraints();
};

// ---------------------------------------------------------------------------
// Quadrature (barycentric points on the reference simplex).

struct QuadRule {
    std::vector<std::array<double, 4>> points;  // barycentric coordinates
    std::vector<double> weights;                // sum to 1
};

/// Degree-2 exact rule (3 points on triangles, 4 on tets).
const QuadRule& quad_degree2(int dim);
/// Higher-order rule for test oracles (degree 4 on triangles, degree 3 on tets).
const QuadRule& quad_high(int dim);

// ---------------------------------------------------------------------------
// Operator assembly. `coords` selects the configuration (pass mesh.vertices
// for the reference one). All results use the FeSpace DOF layout.

/// Consistent mass matrix; block-diagonal over components for vector spaces.
SpMat assemble_mass(const FeSpace& space, std::span<const Vec3> coords);

/**
 * Stiffness for -div(K grad p) with a per-cell symmetric tensor K (scalar
 * space). K entries are checked SPD cell by cell (2D uses the upper-left
 * 2x2 block). Throws on a non-SPD tensor.
 */
SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         const std::vector<Eigen::Matrix3d>& K_per_cell);
SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         const Eigen::Matrix3d& K_uniform);
SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         double k_uniform = 1.0);

/// Mass matrix on one boundary patch (facet-wise P1).
SpMat assemble_boundary_mass(const FeSpace& space, std::span<const Vec3> coords,
                             int patch);

/// Load vector for f given at quadrature points: b_i = integral f phi_i.
Eigen::VectorXd assemble_load(const FeSpace& space, std::span<const Vec3> coords,
                              const std::function<double(const Vec3&)>& f);

/// Load vector for a per-cell-constant source (exact).
Eigen::VectorXd assemble_load_cellwise(const FeSpace& space,
                                       std::span<const Vec3> coords,
                                       const std::vector<double>& cell_values);

// ---------------------------------------------------------------------------
// Linear solvers.

enum class Precond { Diagonal, IncompleteCholesky, IncompleteLU };

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    Precond precond = Precond::Diagonal;
    int gmres_restart = 100;
    const Eigen::VectorXd* guess = nullptr;
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
};

/**
 * Applies constraints if pending, then solves with CG (symmetric flag set)
 * or restarted GMRES. Throws SolveError with the final residual when the
 * tolerance is not met within max_iter.
 */
Eigen::VectorXd solve_sparse(SparseSystem& system, const SolveOptions& opts = {},
                             SolveInfo* info = nullptr);

// ---------------------------------------------------------------------------
// Norms and debugging helpers.

/// L2(Omega) norm of (field - exact), quadrature exact for degree-2 integrands.
double l2_error(const Field& field, std::span<const Vec3> coords,
                const std::function<double(const Vec3&)>& exact);

/// Vector version; `exact` fills one value per component.
double l2_error_vec(const Field& field, std::span<const Vec3> coords,
                    const std::function<Vec3(const Vec3&)>& exact);

double l2_norm(const Field& field, std::span<const Vec3> coords);

/// Integral of a P1 scalar field over the mesh (exact).
double integrate(const Field& field, std::span<const Vec3> coords);

/// MatrixMarket coordinate export for debugging.
void write_matrix_market(const SpMat& A, const std::string& path);

}  // namespace perfusim
