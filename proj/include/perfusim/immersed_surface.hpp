#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "perfusim/mesh.hpp"

namespace perfusim {

/**
 * Immersed surface for the resistive valve method: either a triangulated
 * surface (exact point-triangle distance, sign from angle-weighted
 * pseudo-normals) or an analytic level set.
 */
class ImmersedSurface {
public:
    ImmersedSurface() = default;

    /// Triangulated surface. Call finalize() after filling vertices/triangles.
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    /// Analytic alternative: signed distance function with its own bounds.
    static ImmersedSurface analytic(std::function<double(const Vec3&)> sdf,
                                    const Vec3& bbox_lo, const Vec3& bbox_hi);
    static ImmersedSurface plane(const Vec3& point, const Vec3& normal);
    static ImmersedSurface sphere(const Vec3& center, double radius);

    /// Precomputes normals and bounds; throws MeshError on degenerate input.
    void finalize();

    bool isAnalytic() const { return static_cast<bool>(sdf_); }
    bool empty() const { return !isAnalytic() && triangles.empty(); }

    double signedDistance(const Vec3& p) const;
    double unsignedDistance(const Vec3& p) const;

    /// Total triangle area (0 for analytic surfaces).
    double area() const;

    Vec3 centroid() const;  // area-weighted

    const Vec3& boundsLo() const { return bbox_lo_; }
    const Vec3& boundsHi() const { return bbox_hi_; }

private:
    std::function<double(const Vec3&)> sdf_;
    Vec3 bbox_lo_ = Vec3::Zero();
    Vec3 bbox_hi_ = Vec3::Zero();

    // pseudo-normals for sign determination
    std::vector<Vec3> face_normals_;
    std::vector<Vec3> vertex_normals_;                  // angle-weighted
    std::vector<std::array<Vec3, 3>> edge_normals_;     // per triangle edge (a,b),(b,c),(c,a)

    double signedDistanceTriangulated(const Vec3& p) const;
};

/// Reads OFF or ASCII STL by extension/content sniffing.
ImmersedSurface load_surface(const std::string& path);
void write_off(const ImmersedSurface& s, const std::string& path);

}  // namespace perfusim
