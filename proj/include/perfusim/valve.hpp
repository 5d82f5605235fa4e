#pragma once

#include <string>
#include <vector>

#include "perfusim/fem.hpp"
#include "perfusim/immersed_surface.hpp"

namespace perfusim {

enum class ValvePhase { Open, Closed };

/// Left-closed interval [t_begin, t_end) of one valve configuration.
struct PhaseInterval {
    double t_begin = 0.0;
    double t_end = 0.0;
    ValvePhase phase = ValvePhase::Open;
};

/**
 * Immersed resistive valve: two leaflet configurations switched
 * instantaneously by a periodic schedule.
 */
struct ValveModel {
    std::string name;
    ImmersedSurface open_surface;
    ImmersedSurface closed_surface;
    double resistance = 0.0;  // R
    double epsilon = 1e-3;    // half-thickness, m
    double period = 0.8;      // s
    std::vector<PhaseInterval> schedule;  // must partition [0, period)

    const ImmersedSurface& surface(ValvePhase p) const {
        return p == ValvePhase::Open ? open_surface : closed_surface;
    }
};

/// Throws MeshError unless the schedule covers [0, period) without overlap.
void validate_schedule(const ValveModel& valve);

/**
 * Configuration at time t (periodic wrap; intervals are left-closed, so a
 * transition time belongs to the interval that starts there). Throws
 * MeshError if t falls outside every interval after wrapping.
 */
ValvePhase valve_phase(double t, const ValveModel& valve);

/// Smoothed delta with support |phi| <= eps and unit integral.
inline double riis_delta(double phi, double eps) {
    if (std::abs(phi) > eps) return 0.0;
    return (1.0 + std::cos(M_PI * phi / eps)) / (2.0 * eps);
}

/**
 * Adds the resistive-surface penalty (R/eps) delta_eps(phi) (u - u_ALE) to
 * the momentum block: matrix entries into `triplets` (velocity DOF layout of
 * `space`) and the u_ALE part into `rhs`. Emits a warning to stderr when
 * eps under-resolves the local mesh size.
 */
void assemble_riis(const FeSpace& space, std::span<const Vec3> coords,
                   const ValveModel& valve, ValvePhase phase, const Field& u_ale,
                   std::vector<Triplet>& triplets, Eigen::VectorXd& rhs);

}  // namespace perfusim
