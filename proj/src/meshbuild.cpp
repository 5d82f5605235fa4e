#include "perfusim/meshbuild.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "perfusim/errors.hpp"

namespace perfusim::meshbuild {

namespace {

// Kuhn decomposition: 6 tets per cube, all sharing the main diagonal.
// Local corner index = dx + 2*dy + 4*dz.
constexpr int kKuhnTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
    {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

}  // namespace

Mesh build_voxel_mesh(const VoxelSpec& spec) {
    Mesh mesh;
    mesh.dim = spec.dim;
    const int nx = spec.nx, ny = spec.ny, nz = (spec.dim == 3) ? spec.nz : 1;
    const Vec3 ext = spec.hi - spec.lo;
    const Vec3 h(ext.x() / nx, ext.y() / ny, spec.dim == 3 ? ext.z() / nz : 0.0);

    // vertex grid with lazy numbering (only vertices of kept cells)
    std::map<std::array<int, 3>, int> vid;
    auto vertex = [&](int i, int j, int k) {
        auto [it, inserted] = vid.try_emplace({i, j, k}, static_cast<int>(mesh.vertices.size()));
        if (inserted)
            mesh.vertices.emplace_back(spec.lo.x() + i * h.x(), spec.lo.y() + j * h.y(),
                                       spec.dim == 3 ? spec.lo.z() + k * h.z() : 0.0);
        return it->second;
    };

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const Vec3 center(spec.lo.x() + (i + 0.5) * h.x(),
                                  spec.lo.y() + (j + 0.5) * h.y(),
                                  spec.dim == 3 ? spec.lo.z() + (k + 0.5) * h.z() : 0.0);
                if (spec.keep && !spec.keep(center)) continue;
                if (spec.dim == 2) {
                    const int v00 = vertex(i, j, 0), v10 = vertex(i + 1, j, 0);
                    const int v11 = vertex(i + 1, j + 1, 0), v01 = vertex(i, j + 1, 0);
                    for (int v : {v00, v10, v11}) mesh.cells.push_back(v);
                    for (int v : {v00, v11, v01}) mesh.cells.push_back(v);
                } else {
                    int corner[8];
                    for (int d = 0; d < 8; ++d)
                        corner[d] = vertex(i + (d & 1), j + ((d >> 1) & 1), k + ((d >> 2) & 1));
                    for (const auto& t : kKuhnTets) {
                        int v[4] = {corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]};
                        mesh.cells.insert(mesh.cells.end(), {v[0], v[1], v[2], v[3]});
                        const int c = mesh.nCells() - 1;
                        if (cell_volume(mesh, mesh.vertices, c) < 0.0)
                            std::swap(mesh.cells[static_cast<size_t>(c) * 4 + 2],
                                      mesh.cells[static_cast<size_t>(c) * 4 + 3]);
                    }
                }
            }
    if (mesh.nCells() == 0) throw MeshError("voxel mesh predicate kept no cells");

    // exterior facets: owned by exactly one cell
    const int vpc = mesh.verticesPerCell();
    std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;  // key -> (count, verts)
    for (int c = 0; c < mesh.nCells(); ++c) {
        auto cv = mesh.cell(c);
        for (int skip = 0; skip < vpc; ++skip) {
            std::array<int, 3> verts{-1, -1, -1};
            int m = 0;
            for (int i = 0; i < vpc; ++i)
                if (i != skip) verts[m++] = cv[i];
            std::array<int, 3> key = verts;
            std::sort(key.begin(), key.begin() + m);
            auto [it, ins] = faces.try_emplace(key, std::pair<int, std::array<int, 3>>{0, verts});
            it->second.first++;
        }
    }
    for (auto& [key, cf] : faces) {
        if (cf.first != 1) continue;
        const auto& fv = cf.second;
        for (int i = 0; i < mesh.dim; ++i) mesh.boundary_facets.push_back(fv[i]);
        mesh.facet_tags.push_back(1);  // provisional; retagged below
    }
    mesh.validate();  // fills facet_cell (needed for outward normals)

    if (spec.tag) {
        for (int f = 0; f < mesh.nFacets(); ++f) {
            Vec3 n;
            facet_area_normal(mesh, mesh.vertices, f, n);
            Vec3 centroid = Vec3::Zero();
            for (int v : mesh.facet(f)) centroid += mesh.vertices[v];
            centroid /= mesh.verticesPerFacet();
            mesh.facet_tags[f] = spec.tag(centroid, n);
        }
    }
    return mesh;
}

namespace {

BoundaryTagger box_tagger(const Vec3& lo, const Vec3& hi, int dim) {
    return [lo, hi, dim](const Vec3& c, const Vec3& n) {
        const double t = 1e-9 * (hi - lo).norm();
        if (n.x() < -0.5 || c.x() < lo.x() + t) return 1;
        if (n.x() > 0.5 || c.x() > hi.x() - t) return 2;
        if (n.y() < -0.5) return 3;
        if (n.y() > 0.5) return 4;
        if (dim == 3 && n.z() < -0.5) return 5;
        return dim == 3 ? 6 : 4;
    };
}

}  // namespace

Mesh unit_cube(int n) { return box3d(Vec3::Zero(), Vec3::Ones(), n, n, n); }

Mesh unit_square(int n) { return rect2d(1.0, 1.0, n, n); }

Mesh rect2d(double lx, double ly, int nx, int ny) {
    VoxelSpec spec;
    spec.dim = 2;
    spec.lo = Vec3::Zero();
    spec.hi = Vec3(lx, ly, 0.0);
    spec.nx = nx;
    spec.ny = ny;
    spec.tag = box_tagger(spec.lo, spec.hi, 2);
    return build_voxel_mesh(spec);
}

Mesh box3d(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz) {
    VoxelSpec spec;
    spec.dim = 3;
    spec.lo = lo;
    spec.hi = hi;
    spec.nx = nx;
    spec.ny = ny;
    spec.nz = nz;
    spec.tag = box_tagger(lo, hi, 3);
    return build_voxel_mesh(spec);
}

Mesh heart_fluid(const HeartFluidParams& p) {
    const double h = p.h;
    const double a = p.atrium_half, v = p.vent_half, ch = p.cor_half;
    const double zm = p.zMitral(), za = p.zAortic(), ztop = p.zTop();
    const double cz0 = p.corZ0(), cz1 = p.corZ1();
    const double cx1 = a + p.cor_len;  // coronary outlet plane |x|

    auto in_duct = [&](const Vec3& c) {
        if (c.z() < zm) return std::abs(c.x()) < a && std::abs(c.y()) < a;   // atrium
        if (c.z() < za) return std::abs(c.x()) < v && std::abs(c.y()) < v;   // ventricle
        if (c.z() < ztop) return std::abs(c.x()) < a && std::abs(c.y()) < a; // root+aorta
        return false;
    };
    auto in_coronary = [&](const Vec3& c) {
        return c.z() > cz0 && c.z() < cz1 && std::abs(c.y()) < ch &&
               std::abs(c.x()) > a && std::abs(c.x()) < cx1;
    };

    VoxelSpec spec;
    spec.dim = 3;
    spec.lo = Vec3(-cx1, -v, 0.0);
    spec.hi = Vec3(cx1, v, ztop);
    spec.nx = static_cast<int>(std::lround(2.0 * cx1 / h));
    spec.ny = static_cast<int>(std::lround(2.0 * v / h));
    spec.nz = static_cast<int>(std::lround(ztop / h));
    spec.keep = [&](const Vec3& c) { return in_duct(c) || in_coronary(c); };

    const double eps = 1e-9;
    spec.tag = [&, eps](const Vec3& c, const Vec3& n) {
        using namespace patches;
        if (n.z() < -0.5 && c.z() < eps) return kPvInlet;
        if (n.z() > 0.5 && c.z() > ztop - eps) return kAorticOutlet;
        if (n.x() > 0.5 && c.x() > cx1 - eps) return kCoronary1;
        if (n.x() < -0.5 && c.x() < -cx1 + eps) return kCoronary2;
        // coronary branch walls (outside the main duct cross-section)
        if (std::abs(c.x()) > a + eps) return kCoronaryWall;
        // ventricle lateral walls and shoulders move with the wall law
        if (c.z() > zm - eps && c.z() < za + eps &&
            (std::abs(c.x()) > a + eps || std::abs(c.y()) > a + eps ||
             std::abs(n.z()) > 0.5))
            return kVentricleWall;
        return kStaticWall;
    };
    return build_voxel_mesh(spec);
}

Mesh perfusion_shell(const PerfusionShellParams& p) {
    auto inside = [](const Vec3& c, double a, double b, double cc) {
        const double x = c.x() / a, y = c.y() / b, z = c.z() / cc;
        return x * x + y * y + z * z < 1.0;
    };
    VoxelSpec spec;
    spec.dim = 3;
    spec.lo = Vec3(-p.outer_a, -p.outer_b, -p.outer_c);
    spec.hi = Vec3(p.outer_a, p.outer_b, 0.0);
    spec.nx = std::max(2, static_cast<int>(std::lround(2.0 * p.outer_a / p.h)));
    spec.ny = std::max(2, static_cast<int>(std::lround(2.0 * p.outer_b / p.h)));
    spec.nz = std::max(2, static_cast<int>(std::lround(p.outer_c / p.h)));
    spec.keep = [&](const Vec3& c) {
        return c.z() < 0.0 && inside(c, p.outer_a, p.outer_b, p.outer_c) &&
               !inside(c, p.inner_a, p.inner_b, p.inner_c);
    };
    spec.tag = [](const Vec3&, const Vec3&) { return 1; };
    return build_voxel_mesh(spec);
}

ImmersedSurface valve_disc(const Vec3& center, double hw, int n) {
    return valve_ring(center, hw, 0.0, n);
}

ImmersedSurface valve_ring(const Vec3& center, double hw, double open_fraction,
                           int n) {
    ImmersedSurface s;
    const double hole_hw = hw * std::sqrt(std::clamp(open_fraction, 0.0, 1.0));
    std::map<std::pair<int, int>, int> vid;
    auto vertex = [&](int i, int j) {
        auto [it, ins] = vid.try_emplace({i, j}, static_cast<int>(s.vertices.size()));
        if (ins)
            s.vertices.emplace_back(center.x() - hw + 2.0 * hw * i / n,
                                    center.y() - hw + 2.0 * hw * j / n, center.z());
        return it->second;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double cx = -hw + 2.0 * hw * (i + 0.5) / n;
            const double cy = -hw + 2.0 * hw * (j + 0.5) / n;
            if (std::max(std::abs(cx), std::abs(cy)) < hole_hw) continue;
            const int v00 = vertex(i, j), v10 = vertex(i + 1, j);
            const int v11 = vertex(i + 1, j + 1), v01 = vertex(i, j + 1);
            s.triangles.push_back({v00, v10, v11});
            s.triangles.push_back({v00, v11, v01});
        }
    s.finalize();
    return s;
}

}  // namespace perfusim::meshbuild
