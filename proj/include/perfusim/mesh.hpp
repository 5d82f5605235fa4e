#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

namespace perfusim {

using Vec3 = Eigen::Vector3d;

/**
 * Simplicial mesh (triangles in 2D, tetrahedra in 3D) with tagged boundary
 * patches. Coordinates are meters. In 2D the z coordinate is stored as 0.
 *
 * Immutable after construction/validation; safe for concurrent reads.
 */
struct Mesh {
    int dim = 3;                       // 2 or 3
    std::vector<Vec3> vertices;        // reference coordinates
    std::vector<int> cells;            // stride dim+1, positive orientation
    std::vector<int> boundary_facets;  // stride dim
    std::vector<int> facet_tags;       // one patch tag per boundary facet
    std::vector<int> facet_cell;       // owning cell of each boundary facet

    int verticesPerCell() const { return dim + 1; }
    int verticesPerFacet() const { return dim; }
    int nVertices() const { return static_cast<int>(vertices.size()); }
    int nCells() const { return static_cast<int>(cells.size()) / (dim + 1); }
    int nFacets() const { return static_cast<int>(facet_tags.size()); }

    std::span<const int> cell(int c) const {
        return {cells.data() + static_cast<std::ptrdiff_t>(c) * (dim + 1),
                static_cast<size_t>(dim + 1)};
    }
    std::span<const int> facet(int f) const {
        return {boundary_facets.data() + static_cast<std::ptrdiff_t>(f) * dim,
                static_cast<size_t>(dim)};
    }

    /// Sorted list of distinct boundary patch tags.
    std::vector<int> patchTags() const;

    /// True if `tag` appears among the facet tags.
    bool hasPatch(int tag) const;

    /// Checks connectivity, orientation, and that tags cover the whole
    /// boundary. Fills facet_cell. Throws MeshError on violation.
    void validate();

    /// Total measure (area in 2D, volume in 3D) on the reference coordinates.
    double totalVolume() const;
};

// ---------------------------------------------------------------------------
// Geometry on a (possibly displaced) vertex configuration. `coords` has one
// entry per mesh vertex; pass mesh.vertices for the reference configuration.

/// Signed simplex measure; positive for correctly oriented cells.
double cell_volume(const Mesh& mesh, std::span<const Vec3> coords, int c);

Vec3 cell_barycenter(const Mesh& mesh, std::span<const Vec3> coords, int c);

/// P1 basis gradients on cell c (one per cell vertex); returns the signed
/// cell measure.
double p1_gradients(const Mesh& mesh, std::span<const Vec3> coords, int c,
                    std::array<Vec3, 4>& grads);

/// Facet measure and unit outward normal (outward w.r.t. the owning cell).
double facet_area_normal(const Mesh& mesh, std::span<const Vec3> coords, int f,
                         Vec3& normal);

/// Longest edge of cell c.
double cell_diameter(const Mesh& mesh, std::span<const Vec3> coords, int c);

// ---------------------------------------------------------------------------
// Boundary flux.

/**
 * Integral of u . n over one boundary patch, exact for P1 velocities.
 * `velocity` holds dim interleaved components per vertex. Throws MeshError
 * for an unknown patch tag.
 */
double boundary_flux(const Mesh& mesh, std::span<const Vec3> coords,
                     const Eigen::VectorXd& velocity, int patch);

/**
 * Per-velocity-DOF weights m with m^T u = boundary_flux(patch):
 * m[v*dim + d] = integral of phi_v n_d over the patch.
 */
Eigen::VectorXd boundary_flux_weights(const Mesh& mesh,
                                      std::span<const Vec3> coords, int patch,
                                      int ndofs);

/// Patch area.
double patch_area(const Mesh& mesh, std::span<const Vec3> coords, int patch);

// ---------------------------------------------------------------------------
// Gmsh ASCII v2.2 I/O. Physical tags of (dim-1)-elements become boundary
// patch tags; dim-elements become cells.

Mesh load_mesh(const std::string& path);
void write_gmsh(const Mesh& mesh, const std::string& path);

}  // namespace perfusim
