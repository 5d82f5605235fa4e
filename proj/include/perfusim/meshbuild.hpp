#pragma once

#include <functional>
#include <string>

#include "perfusim/immersed_surface.hpp"
#include "perfusim/mesh.hpp"

namespace perfusim::meshbuild {

/// (facet centroid, outward normal) -> boundary patch tag
using BoundaryTagger = std::function<int(const Vec3&, const Vec3&)>;

/**
 * Structured voxel mesh: cubes split into 6 tetrahedra each (2D: squares
 * into 2 triangles) on a regular grid over [lo, hi], keeping cells whose
 * center satisfies `keep`. The split pattern is translation-invariant, so
 * neighboring cubes always conform.
 */
struct VoxelSpec {
    Vec3 lo, hi;
    int nx = 1, ny = 1, nz = 1;
    int dim = 3;
    std::function<bool(const Vec3&)> keep;  // nullptr: keep all
    BoundaryTagger tag;                     // nullptr: tag 1 everywhere
};

Mesh build_voxel_mesh(const VoxelSpec& spec);

/// Unit cube (n=1 gives the canonical 6-tet decomposition). Faces tagged
/// 1..6 in the order -x,+x,-y,+y,-z,+z.
Mesh unit_cube(int n);

/// Unit square in 2D (n=1 gives 2 triangles). Edges tagged 1..4 in the
/// order -x,+x,-y,+y.
Mesh unit_square(int n);

/// 2D rectangle [0,lx]x[0,ly]; edges tagged 1..4 as in unit_square.
Mesh rect2d(double lx, double ly, int nx, int ny);

/// 3D box; faces tagged 1..6 as in unit_cube.
Mesh box3d(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz);

// ---------------------------------------------------------------------------
// Desk-scale left-heart fluid domain: a duct assembly along +z.
//
//   pulmonary inlet -> atrium -> [mitral valve] -> ventricle ->
//   [aortic valve] -> aortic root (two coronary branches) -> aorta outlet
//
// All cross-sections are squares on a common grid of spacing h.

namespace patches {
inline constexpr int kPvInlet = 1;
inline constexpr int kAorticOutlet = 2;
inline constexpr int kCoronary1 = 3;  // +x branch
inline constexpr int kCoronary2 = 4;  // -x branch
inline constexpr int kVentricleWall = 5;
inline constexpr int kStaticWall = 6;
inline constexpr int kCoronaryWall = 7;
}  // namespace patches

struct HeartFluidParams {
    double h = 0.005;           // grid spacing, m
    double atrium_half = 0.01;  // atrium/root/aorta cross-section half-width
    double vent_half = 0.02;    // ventricle cross-section half-width
    double atrium_len = 0.02;
    double vent_len = 0.05;
    double root_len = 0.02;
    double aorta_len = 0.03;
    double cor_half = 0.005;    // coronary branch half-width
    double cor_len = 0.02;

    // derived layout (z grows from the pulmonary inlet at z=0)
    double zMitral() const { return atrium_len; }
    double zAortic() const { return atrium_len + vent_len; }
    double zTop() const { return atrium_len + vent_len + root_len + aorta_len; }
    double corZ0() const { return zAortic() + h; }
    double corZ1() const { return corZ0() + 2.0 * cor_half; }
};

Mesh heart_fluid(const HeartFluidParams& p);

// Thick-walled half-ellipsoid shell (apex at z=-outer_c, base plane z=0).
struct PerfusionShellParams {
    double h = 0.005;
    double outer_a = 0.035, outer_b = 0.035, outer_c = 0.06;
    double inner_a = 0.023, inner_b = 0.023, inner_c = 0.048;
};

Mesh perfusion_shell(const PerfusionShellParams& p);

// ---------------------------------------------------------------------------
// Planar valve surfaces (normal +z), tessellated into a fine triangle grid
// so that orifice carving has sub-percent area granularity.

/// Full square leaflet surface covering [-hw,hw]^2 at z = z0.
ImmersedSurface valve_disc(const Vec3& center, double half_width, int n = 20);

/**
 * Open configuration: an annular frame blocking the periphery and leaving a
 * central hole of the given area fraction open.
 */
ImmersedSurface valve_ring(const Vec3& center, double half_width,
                           double open_area_fraction, int n = 20);

}  // namespace perfusim::meshbuild
