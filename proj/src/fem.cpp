#include "perfusim/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>
#include <cmath>
#include <fstream>

#include "perfusim/errors.hpp"

namespace perfusim {

void SparseSystem::applyConstraints() {
    if (constraints.empty()) return;
    const int n = static_cast<int>(A.rows());
    std::vector<char> fixed(n, 0);
    std::vector<double> value(n, 0.0);
    for (auto& [dof, g] : constraints) {
        fixed[dof] = 1;
        value[dof] = g;
    }
    // column elimination: move known values to the rhs, zero the entries
    for (int r = 0; r < A.outerSize(); ++r) {
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (fixed[r]) {
                it.valueRef() = (c == r) ? 1.0 : 0.0;
            } else if (fixed[c]) {
                b[r] -= it.value() * value[c];
                it.valueRef() = 0.0;
            }
        }
    }
    for (auto& [dof, g] : constraints) b[dof] = g;
    A.prune(0.0);
    constraints.clear();
}

// ---------------------------------------------------------------------------

const QuadRule& quad_degree2(int dim) {
    static const QuadRule tri = [] {
        QuadRule q;  // midpoints of edges, degree 2
        q.points = {{0.5, 0.5, 0.0, 0.0}, {0.0, 0.5, 0.5, 0.0}, {0.5, 0.0, 0.5, 0.0}};
        q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        return q;
    }();
    static const QuadRule tet = [] {
        QuadRule q;  // 4-point degree-2 rule
        const double a = 0.5854101966249685, b = 0.1381966011250105;
        q.points = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
        q.weights = {0.25, 0.25, 0.25, 0.25};
        return q;
    }();
    return dim == 2 ? tri : tet;
}

const QuadRule& quad_high(int dim) {
    static const QuadRule tri = [] {
        QuadRule q;  // 6-point degree-4 rule (Dunavant)
        const double a1 = 0.445948490915965, b1 = 0.108103018168070;
        const double a2 = 0.091576213509771, b2 = 0.816847572980459;
        const double w1 = 0.223381589678011, w2 = 0.109951743655322;
        q.points = {{a1, a1, b1, 0}, {a1, b1, a1, 0}, {b1, a1, a1, 0},
                    {a2, a2, b2, 0}, {a2, b2, a2, 0}, {b2, a2, a2, 0}};
        q.weights = {w1, w1, w1, w2, w2, w2};
        return q;
    }();
    static const QuadRule tet = [] {
        QuadRule q;  // 5-point degree-3 rule
        q.points = {{0.25, 0.25, 0.25, 0.25},
                    {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                    {1.0 / 6, 0.5, 1.0 / 6, 1.0 / 6},
                    {1.0 / 6, 1.0 / 6, 0.5, 1.0 / 6},
                    {1.0 / 6, 1.0 / 6, 1.0 / 6, 0.5}};
        q.weights = {-0.8, 0.45, 0.45, 0.45, 0.45};
        return q;
    }();
    return dim == 2 ? tri : tet;
}

// ---------------------------------------------------------------------------

SpMat assemble_mass(const FeSpace& space, std::span<const Vec3> coords) {
    const Mesh& mesh = *space.mesh;
    const int vpc = mesh.verticesPerCell();
    const int mult = space.multiplicity;
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(mesh.nCells()) * vpc * vpc * mult);

    // exact P1 mass on simplices: M_aa = 2w, M_ab = w with w = V/((d+1)(d+2))
    for (int c = 0; c < mesh.nCells(); ++c) {
        const double vol = cell_volume(mesh, coords, c);
        const double w = vol / static_cast<double>((vpc) * (vpc + 1));
        auto cv = mesh.cell(c);
        for (int a = 0; a < vpc; ++a)
            for (int bb = 0; bb < vpc; ++bb) {
                const double m = (a == bb) ? 2.0 * w : w;
                for (int k = 0; k < mult; ++k)
                    trips.emplace_back(space.dof(cv[a], k), space.dof(cv[bb], k), m);
            }
    }
    SpMat M(space.nDofs(), space.nDofs());
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

namespace {

void check_spd(const Eigen::Matrix3d& K, int dim, int cell) {
    const int n = dim;
    const Eigen::MatrixXd Ks = K.topLeftCorner(n, n);
    if ((Ks - Ks.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, Ks.cwiseAbs().maxCoeff()))
        throw MeshError("permeability tensor not symmetric in cell " + std::to_string(cell));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw MeshError("permeability tensor not positive definite in cell " +
                        std::to_string(cell));
}

SpMat assemble_stiffness_impl(const FeSpace& space, std::span<const Vec3> coords,
                              const std::function<const Eigen::Matrix3d&(int)>& K) {
    const Mesh& mesh = *space.mesh;
    if (space.multiplicity != 1)
        throw MeshError("stiffness assembly expects a scalar space");
    const int vpc = mesh.verticesPerCell();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(mesh.nCells()) * vpc * vpc);
    std::array<Vec3, 4> g;
    for (int c = 0; c < mesh.nCells(); ++c) {
        const Eigen::Matrix3d& Kc = K(c);
        check_spd(Kc, mesh.dim, c);
        const double vol = p1_gradients(mesh, coords, c, g);
        auto cv = mesh.cell(c);
        for (int a = 0; a < vpc; ++a)
            for (int bb = 0; bb < vpc; ++bb)
                trips.emplace_back(cv[a], cv[bb], vol * g[a].dot(Kc * g[bb]));
    }
    SpMat A(space.nDofs(), space.nDofs());
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

}  // namespace

SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         const std::vector<Eigen::Matrix3d>& K_per_cell) {
    if (static_cast<int>(K_per_cell.size()) != space.mesh->nCells())
        throw MeshError("per-cell tensor array size mismatch");
    return assemble_stiffness_impl(
        space, coords, [&](int c) -> const Eigen::Matrix3d& { return K_per_cell[c]; });
}

SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         const Eigen::Matrix3d& K_uniform) {
    return assemble_stiffness_impl(
        space, coords, [&](int) -> const Eigen::Matrix3d& { return K_uniform; });
}

SpMat assemble_stiffness(const FeSpace& space, std::span<const Vec3> coords,
                         double k_uniform) {
    const Eigen::Matrix3d K = k_uniform * Eigen::Matrix3d::Identity();
    return assemble_stiffness_impl(
        space, coords, [&K](int) -> const Eigen::Matrix3d& { return K; });
}

SpMat assemble_boundary_mass(const FeSpace& space, std::span<const Vec3> coords,
                             int patch) {
    const Mesh& mesh = *space.mesh;
    if (!mesh.hasPatch(patch))
        throw MeshError("unknown boundary patch tag " + std::to_string(patch));
    const int vpf = mesh.verticesPerFacet();
    const int mult = space.multiplicity;
    std::vector<Triplet> trips;
    Vec3 n;
    for (int f = 0; f < mesh.nFacets(); ++f) {
        if (mesh.facet_tags[f] != patch) continue;
        const double area = facet_area_normal(mesh, coords, f, n);
        const double w = area / static_cast<double>(vpf * (vpf + 1));
        auto fv = mesh.facet(f);
        for (int a = 0; a < vpf; ++a)
            for (int bb = 0; bb < vpf; ++bb) {
                const double m = (a == bb) ? 2.0 * w : w;
                for (int k = 0; k < mult; ++k)
                    trips.emplace_back(space.dof(fv[a], k), space.dof(fv[bb], k), m);
            }
    }
    SpMat M(space.nDofs(), space.nDofs());
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

Eigen::VectorXd assemble_load(const FeSpace& space, std::span<const Vec3> coords,
                              const std::function<double(const Vec3&)>& f) {
    const Mesh& mesh = *space.mesh;
    const int vpc = mesh.verticesPerCell();
    const QuadRule& qr = quad_degree2(mesh.dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.nDofs());
    for (int c = 0; c < mesh.nCells(); ++c) {
        const double vol = cell_volume(mesh, coords, c);
        auto cv = mesh.cell(c);
        for (size_t q = 0; q < qr.points.size(); ++q) {
            Vec3 x = Vec3::Zero();
            for (int a = 0; a < vpc; ++a) x += qr.points[q][a] * coords[cv[a]];
            const double fw = f(x) * qr.weights[q] * vol;
            for (int a = 0; a < vpc; ++a) b[cv[a]] += fw * qr.points[q][a];
        }
    }
    return b;
}

Eigen::VectorXd assemble_load_cellwise(const FeSpace& space,
                                       std::span<const Vec3> coords,
                                       const std::vector<double>& cell_values) {
    const Mesh& mesh = *space.mesh;
    const int vpc = mesh.verticesPerCell();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.nDofs());
    for (int c = 0; c < mesh.nCells(); ++c) {
        const double w = cell_values[c] * cell_volume(mesh, coords, c) / vpc;
        for (int v : mesh.cell(c)) b[v] += w;
    }
    return b;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Solver>
Eigen::VectorXd run_solver(Solver& solver, const SparseSystem& sys,
                           const SolveOptions& opts, SolveInfo* info,
                           const char* name) {
    solver.setTolerance(opts.tol);
    solver.setMaxIterations(opts.max_iter);
    solver.compute(sys.A);
    if (solver.info() != Eigen::Success)
        throw SolveError(std::string(name) + ": preconditioner setup failed", -1.0, 0);
    Eigen::VectorXd x;
    if (opts.guess != nullptr)
        x = solver.solveWithGuess(sys.b, *opts.guess);
    else
        x = solver.solve(sys.b);
    const double residual = solver.error();
    if (info) {
        info->iterations = static_cast<int>(solver.iterations());
        info->residual = residual;
    }
    if (solver.info() != Eigen::Success && residual > opts.tol)
        throw SolveError(std::string(name) + ": no convergence after " +
                             std::to_string(solver.iterations()) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual, static_cast<int>(solver.iterations()));
    return x;
}

}  // namespace

Eigen::VectorXd solve_sparse(SparseSystem& sys, const SolveOptions& opts,
                             SolveInfo* info) {
    sys.applyConstraints();
    if (sys.A.rows() != sys.b.size())
        throw SolveError("system dimension mismatch", -1.0, 0);

    if (sys.symmetric) {
        if (opts.precond == Precond::IncompleteCholesky) {
            Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                                     Eigen::IncompleteCholesky<double>> cg;
            return run_solver(cg, sys, opts, info, "CG(IC)");
        }
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>> cg;
        return run_solver(cg, sys, opts, info, "CG");
    }
    if (opts.precond == Precond::IncompleteLU) {
        Eigen::GMRES<SpMat, Eigen::IncompleteLUT<double>> gmres;
        gmres.set_restart(opts.gmres_restart);
        return run_solver(gmres, sys, opts, info, "GMRES(ILU)");
    }
    Eigen::GMRES<SpMat, Eigen::DiagonalPreconditioner<double>> gmres;
    gmres.set_restart(opts.gmres_restart);
    return run_solver(gmres, sys, opts, info, "GMRES");
}

// ---------------------------------------------------------------------------

namespace {

double l2_error_impl(const Field& field, std::span<const Vec3> coords,
                     const std::function<void(const Vec3&, double*)>& exact) {
    const FeSpace& space = *field.space;
    const Mesh& mesh = *space.mesh;
    const int vpc = mesh.verticesPerCell();
    const int mult = space.multiplicity;
    const QuadRule& qr = quad_degree2(mesh.dim);
    double err2 = 0.0;
    double ex[3];
    for (int c = 0; c < mesh.nCells(); ++c) {
        const double vol = cell_volume(mesh, coords, c);
        auto cv = mesh.cell(c);
        for (size_t q = 0; q < qr.points.size(); ++q) {
            Vec3 x = Vec3::Zero();
            for (int a = 0; a < vpc; ++a) x += qr.points[q][a] * coords[cv[a]];
            exact(x, ex);
            for (int k = 0; k < mult; ++k) {
                double fh = 0.0;
                for (int a = 0; a < vpc; ++a)
                    fh += qr.points[q][a] * field.coeffs[space.dof(cv[a], k)];
                const double d = fh - ex[k];
                err2 += qr.weights[q] * vol * d * d;
            }
        }
    }
    return std::sqrt(err2);
}

}  // namespace

double l2_error(const Field& field, std::span<const Vec3> coords,
                const std::function<double(const Vec3&)>& exact) {
    return l2_error_impl(field, coords,
                         [&](const Vec3& x, double* out) { out[0] = exact(x); });
}

double l2_error_vec(const Field& field, std::span<const Vec3> coords,
                    const std::function<Vec3(const Vec3&)>& exact) {
    return l2_error_impl(field, coords, [&](const Vec3& x, double* out) {
        const Vec3 e = exact(x);
        for (int k = 0; k < 3; ++k) out[k] = e[k];
    });
}

double l2_norm(const Field& field, std::span<const Vec3> coords) {
    return l2_error_impl(field, coords, [](const Vec3&, double* out) {
        out[0] = out[1] = out[2] = 0.0;
    });
}

double integrate(const Field& field, std::span<const Vec3> coords) {
    const FeSpace& space = *field.space;
    const Mesh& mesh = *space.mesh;
    const int vpc = mesh.verticesPerCell();
    double total = 0.0;
    for (int c = 0; c < mesh.nCells(); ++c) {
        const double vol = cell_volume(mesh, coords, c);
        double mean = 0.0;
        for (int v : mesh.cell(c)) mean += field.coeffs[space.dof(v)];
        total += vol * mean / vpc;
    }
    return total;
}

void write_matrix_market(const SpMat& A, const std::string& path) {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    out.precision(17);
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it)
            out << (it.row() + 1) << " " << (it.col() + 1) << " " << it.value() << "\n";
}

}  // namespace perfusim
