#include "perfusim/valve.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "perfusim/errors.hpp"

namespace perfusim {

void validate_schedule(const ValveModel& valve) {
    if (!(valve.period > 0.0)) throw MeshError("valve period must be positive");
    if (valve.schedule.empty()) throw MeshError("valve schedule is empty");
    auto intervals = valve.schedule;
    std::sort(intervals.begin(), intervals.end(),
              [](const PhaseInterval& a, const PhaseInterval& b) {
                  return a.t_begin < b.t_begin;
              });
    const double tol = 1e-12 * valve.period;
    double cursor = 0.0;
    for (const auto& iv : intervals) {
        if (std::abs(iv.t_begin - cursor) > tol)
            throw MeshError("valve schedule has a gap/overlap at t=" +
                            std::to_string(iv.t_begin));
        if (!(iv.t_end > iv.t_begin))
            throw MeshError("valve schedule interval has non-positive length");
        cursor = iv.t_end;
    }
    if (std::abs(cursor - valve.period) > tol)
        throw MeshError("valve schedule does not cover the full period");
}

ValvePhase valve_phase(double t, const ValveModel& valve) {
    if (!(valve.period > 0.0)) throw MeshError("valve period must be positive");
    double tau = std::fmod(t, valve.period);
    if (tau < 0.0) tau += valve.period;
    for (const auto& iv : valve.schedule)
        if (tau >= iv.t_begin && tau < iv.t_end) return iv.phase;
    // tau == period can appear through fmod rounding; it wraps to t=0
    for (const auto& iv : valve.schedule)
        if (iv.t_begin == 0.0) return iv.phase;
    throw MeshError("time " + std::to_string(t) + " not covered by valve schedule of " +
                    valve.name);
}

void assemble_riis(const FeSpace& space, std::span<const Vec3> coords,
                   const ValveModel& valve, ValvePhase phase, const Field& u_ale,
                   std::vector<Triplet>& triplets, Eigen::VectorXd& rhs) {
    if (valve.resistance == 0.0) return;
    const ImmersedSurface& surf = valve.surface(phase);
    if (surf.empty()) return;
    const Mesh& mesh = *space.mesh;
    const int dim = mesh.dim;
    const int vpc = mesh.verticesPerCell();
    const double eps = valve.epsilon;
    const double coef = valve.resistance / eps;
    const QuadRule& qr = quad_degree2(dim);

    const Vec3 lo = surf.boundsLo() - Vec3::Constant(eps);
    const Vec3 hi = surf.boundsHi() + Vec3::Constant(eps);

    bool warned = false;
    for (int c = 0; c < mesh.nCells(); ++c) {
        auto cv = mesh.cell(c);
        // bounding-box prefilter on the cell
        bool overlap = false;
        for (int a = 0; a < vpc && !overlap; ++a) {
            const Vec3& p = coords[cv[a]];
            overlap = (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
        }
        if (!overlap) continue;

        if (!warned && eps < 0.5 * cell_diameter(mesh, coords, c)) {
            std::cerr << "[perfusim] warning: valve '" << valve.name
                      << "' half-thickness under-resolves the mesh near cell " << c
                      << "\n";
            warned = true;
        }

        const double vol = cell_volume(mesh, coords, c);
        for (size_t q = 0; q < qr.points.size(); ++q) {
            Vec3 x = Vec3::Zero();
            for (int a = 0; a < vpc; ++a) x += qr.points[q][a] * coords[cv[a]];
            const double phi = surf.signedDistance(x);
            const double delta = riis_delta(phi, eps);
            if (delta == 0.0) continue;
            const double w = coef * delta * qr.weights[q] * vol;
            for (int a = 0; a < vpc; ++a)
                for (int b = 0; b < vpc; ++b) {
                    const double m = w * qr.points[q][a] * qr.points[q][b];
                    for (int k = 0; k < dim; ++k) {
                        const int ra = space.dof(cv[a], k);
                        const int cb = space.dof(cv[b], k);
                        triplets.emplace_back(ra, cb, m);
                        rhs[ra] += m * u_ale.coeffs[cb];
                    }
                }
        }
    }
}

}  // namespace perfusim
