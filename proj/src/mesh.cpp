#include "perfusim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "perfusim/errors.hpp"

namespace perfusim {

namespace {

// Key for facet lookup: sorted vertex indices.
std::array<int, 3> facet_key(std::span<const int> verts) {
    std::array<int, 3> k{-1, -1, -1};
    for (size_t i = 0; i < verts.size(); ++i) k[i] = verts[i];
    std::sort(k.begin(), k.begin() + verts.size());
    return k;
}

}  // namespace

std::vector<int> Mesh::patchTags() const {
    std::set<int> tags(facet_tags.begin(), facet_tags.end());
    return {tags.begin(), tags.end()};
}

bool Mesh::hasPatch(int tag) const {
    return std::find(facet_tags.begin(), facet_tags.end(), tag) != facet_tags.end();
}

void Mesh::validate() {
    const int nv = nVertices();
    const int nc = nCells();
    if (dim != 2 && dim != 3) throw MeshError("mesh dimension must be 2 or 3");
    if (nc == 0) throw MeshError("mesh has no cells");

    for (int idx : cells)
        if (idx < 0 || idx >= nv) throw MeshError("cell vertex index out of range");
    for (int idx : boundary_facets)
        if (idx < 0 || idx >= nv) throw MeshError("facet vertex index out of range");
    if (static_cast<int>(boundary_facets.size()) != nFacets() * dim)
        throw MeshError("boundary facet array size mismatch");

    for (int c = 0; c < nc; ++c) {
        const double v = cell_volume(*this, vertices, c);
        if (!(v > 0.0))
            throw MeshError("negative/zero cell volume in cell " + std::to_string(c));
    }

    // Exterior facets of the cell complex: those owned by exactly one cell.
    std::map<std::array<int, 3>, std::pair<int, int>> count_owner;  // key -> (count, cell)
    const int vpc = verticesPerCell();
    for (int c = 0; c < nc; ++c) {
        auto cv = cell(c);
        for (int skip = 0; skip < vpc; ++skip) {
            std::array<int, 3> k{-1, -1, -1};
            int m = 0;
            for (int i = 0; i < vpc; ++i)
                if (i != skip) k[m++] = cv[i];
            std::sort(k.begin(), k.begin() + m);
            auto [it, inserted] = count_owner.try_emplace(k, std::pair<int, int>{0, c});
            it->second.first++;
            if (!inserted) it->second.second = std::min(it->second.second, c);
            if (it->second.first > 2)
                throw MeshError("facet shared by more than two cells (non-manifold)");
        }
    }

    std::set<std::array<int, 3>> exterior;
    for (auto& [k, co] : count_owner)
        if (co.first == 1) exterior.insert(k);

    // Tagged facets must coincide with the exterior facets, each exactly once.
    facet_cell.assign(nFacets(), -1);
    std::set<std::array<int, 3>> seen;
    for (int f = 0; f < nFacets(); ++f) {
        auto k = facet_key(facet(f));
        auto it = count_owner.find(k);
        if (it == count_owner.end() || it->second.first != 1)
            throw MeshError("boundary facet " + std::to_string(f) +
                            " is not an exterior facet of the cell complex");
        if (!seen.insert(k).second)
            throw MeshError("boundary facet " + std::to_string(f) + " is tagged twice");
        facet_cell[f] = it->second.second;
    }
    if (seen.size() != exterior.size())
        throw MeshError("patch tags do not cover the whole boundary (" +
                        std::to_string(seen.size()) + " tagged vs " +
                        std::to_string(exterior.size()) + " exterior facets)");
}

double Mesh::totalVolume() const {
    double v = 0.0;
    for (int c = 0; c < nCells(); ++c) v += cell_volume(*this, vertices, c);
    return v;
}

double cell_volume(const Mesh& mesh, std::span<const Vec3> coords, int c) {
    auto cv = mesh.cell(c);
    if (mesh.dim == 2) {
        const Vec3 e1 = coords[cv[1]] - coords[cv[0]];
        const Vec3 e2 = coords[cv[2]] - coords[cv[0]];
        return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    }
    const Vec3 e1 = coords[cv[1]] - coords[cv[0]];
    const Vec3 e2 = coords[cv[2]] - coords[cv[0]];
    const Vec3 e3 = coords[cv[3]] - coords[cv[0]];
    return e1.cross(e2).dot(e3) / 6.0;
}

Vec3 cell_barycenter(const Mesh& mesh, std::span<const Vec3> coords, int c) {
    auto cv = mesh.cell(c);
    Vec3 b = Vec3::Zero();
    for (int v : cv) b += coords[v];
    return b / static_cast<double>(cv.size());
}

double p1_gradients(const Mesh& mesh, std::span<const Vec3> coords, int c,
                    std::array<Vec3, 4>& grads) {
    auto cv = mesh.cell(c);
    const double vol = cell_volume(mesh, coords, c);
    if (mesh.dim == 2) {
        const double inv2A = 1.0 / (2.0 * vol);
        for (int a = 0; a < 3; ++a) {
            const Vec3& pb = coords[cv[(a + 1) % 3]];
            const Vec3& pc = coords[cv[(a + 2) % 3]];
            // grad of barycentric a: rotate opposite edge by 90 degrees
            grads[a] = Vec3(pb.y() - pc.y(), pc.x() - pb.x(), 0.0) * inv2A;
        }
        grads[3].setZero();
        return vol;
    }
    const double inv6V = 1.0 / (6.0 * vol);
    for (int a = 0; a < 4; ++a) {
        const Vec3& p1 = coords[cv[(a + 1) % 4]];
        const Vec3& p2 = coords[cv[(a + 2) % 4]];
        const Vec3& p3 = coords[cv[(a + 3) % 4]];
        Vec3 n = (p2 - p1).cross(p3 - p1);
        // orient inward w.r.t. the opposite vertex a
        if (n.dot(coords[cv[a]] - p1) < 0.0) n = -n;
        grads[a] = n * inv6V;
    }
    return vol;
}

double facet_area_normal(const Mesh& mesh, std::span<const Vec3> coords, int f,
                         Vec3& normal) {
    auto fv = mesh.facet(f);
    double area;
    if (mesh.dim == 2) {
        const Vec3 e = coords[fv[1]] - coords[fv[0]];
        area = e.norm();
        normal = Vec3(e.y(), -e.x(), 0.0) / area;
    } else {
        const Vec3 e1 = coords[fv[1]] - coords[fv[0]];
        const Vec3 e2 = coords[fv[2]] - coords[fv[0]];
        Vec3 n = e1.cross(e2);
        area = 0.5 * n.norm();
        normal = n / (2.0 * area);
    }
    // orient away from the owning cell
    const int c = mesh.facet_cell.empty() ? -1 : mesh.facet_cell[f];
    if (c >= 0) {
        const Vec3 to_facet = coords[fv[0]] - cell_barycenter(mesh, coords, c);
        if (normal.dot(to_facet) < 0.0) normal = -normal;
    }
    return area;
}

double cell_diameter(const Mesh& mesh, std::span<const Vec3> coords, int c) {
    auto cv = mesh.cell(c);
    double h = 0.0;
    for (size_t i = 0; i < cv.size(); ++i)
        for (size_t j = i + 1; j < cv.size(); ++j)
            h = std::max(h, (coords[cv[i]] - coords[cv[j]]).norm());
    return h;
}

double boundary_flux(const Mesh& mesh, std::span<const Vec3> coords,
                     const Eigen::VectorXd& velocity, int patch) {
    if (!mesh.hasPatch(patch))
        throw MeshError("unknown boundary patch tag " + std::to_string(patch));
    const int d = mesh.dim;
    double flux = 0.0;
    for (int f = 0; f < mesh.nFacets(); ++f) {
        if (mesh.facet_tags[f] != patch) continue;
        Vec3 n;
        const double area = facet_area_normal(mesh, coords, f, n);
        // P1 normal velocity integrates exactly with the vertex average
        Vec3 umean = Vec3::Zero();
        for (int v : mesh.facet(f))
            for (int k = 0; k < d; ++k) umean[k] += velocity[v * d + k];
        umean /= static_cast<double>(d);
        flux += area * umean.dot(n);
    }
    return flux;
}

Eigen::VectorXd boundary_flux_weights(const Mesh& mesh,
                                      std::span<const Vec3> coords, int patch,
                                      int ndofs) {
    if (!mesh.hasPatch(patch))
        throw MeshError("unknown boundary patch tag " + std::to_string(patch));
    const int d = mesh.dim;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(ndofs);
    for (int f = 0; f < mesh.nFacets(); ++f) {
        if (mesh.facet_tags[f] != patch) continue;
        Vec3 n;
        const double area = facet_area_normal(mesh, coords, f, n);
        const double w = area / static_cast<double>(d);  // integral of each P1 basis
        for (int v : mesh.facet(f))
            for (int k = 0; k < d; ++k) m[v * d + k] += w * n[k];
    }
    return m;
}

double patch_area(const Mesh& mesh, std::span<const Vec3> coords, int patch) {
    if (!mesh.hasPatch(patch))
        throw MeshError("unknown boundary patch tag " + std::to_string(patch));
    double a = 0.0;
    Vec3 n;
    for (int f = 0; f < mesh.nFacets(); ++f)
        if (mesh.facet_tags[f] == patch) a += facet_area_normal(mesh, coords, f, n);
    return a;
}

// ---------------------------------------------------------------------------
// Gmsh ASCII v2.2

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file: " + path);

    std::string line;
    Mesh mesh;
    bool have_nodes = false, have_elements = false;

    auto expect = [&](const std::string& what) {
        if (!std::getline(in, line))
            throw MeshError("unexpected end of file, expected " + what + ": " + path);
    };

    while (std::getline(in, line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            expect("format line");
            std::istringstream fmt(line);
            double version = 0.0;
            int file_type = -1, data_size = 0;
            fmt >> version >> file_type >> data_size;
            if (!fmt || version < 2.0 || version >= 3.0 || file_type != 0)
                throw MeshError("unsupported mesh format (need Gmsh ASCII v2.x): " + path);
            expect("$EndMeshFormat");
        } else if (line.rfind("$Nodes", 0) == 0) {
            expect("node count");
            const int n = std::stoi(line);
            mesh.vertices.resize(n);
            for (int i = 0; i < n; ++i) {
                expect("node line");
                std::istringstream ns(line);
                int id;
                double x, y, z;
                if (!(ns >> id >> x >> y >> z) || id < 1 || id > n)
                    throw MeshError("bad node line in " + path);
                mesh.vertices[id - 1] = Vec3(x, y, z);
            }
            expect("$EndNodes");
            have_nodes = true;
        } else if (line.rfind("$Elements", 0) == 0) {
            expect("element count");
            const int n = std::stoi(line);
            bool any3d = false, any2d = false;
            struct Elem {
                int type, phys;
                std::array<int, 4> v;
            };
            std::vector<Elem> elems;
            elems.reserve(n);
            for (int i = 0; i < n; ++i) {
                expect("element line");
                std::istringstream es(line);
                int id, type, ntags;
                es >> id >> type >> ntags;
                int phys = 0, tag;
                for (int t = 0; t < ntags; ++t) {
                    es >> tag;
                    if (t == 0) phys = tag;
                }
                Elem e{type, phys, {-1, -1, -1, -1}};
                int nv = 0;
                switch (type) {
                    case 1: nv = 2; break;   // line
                    case 2: nv = 3; break;   // triangle
                    case 4: nv = 4; break;   // tet
                    case 15: nv = 1; break;  // point
                    default:
                        throw MeshError("unsupported element type " + std::to_string(type) +
                                        " in " + path);
                }
                for (int k = 0; k < nv; ++k) {
                    if (!(es >> e.v[k])) throw MeshError("bad element line in " + path);
                    e.v[k] -= 1;
                }
                if (type == 4) any3d = true;
                if (type == 2) any2d = true;
                elems.push_back(e);
            }
            expect("$EndElements");
            mesh.dim = any3d ? 3 : (any2d ? 2 : 0);
            if (mesh.dim == 0) throw MeshError("mesh has no 2D/3D elements: " + path);
            for (const auto& e : elems) {
                if (mesh.dim == 3 && e.type == 4) {
                    for (int k = 0; k < 4; ++k) mesh.cells.push_back(e.v[k]);
                } else if (mesh.dim == 3 && e.type == 2) {
                    for (int k = 0; k < 3; ++k) mesh.boundary_facets.push_back(e.v[k]);
                    mesh.facet_tags.push_back(e.phys);
                } else if (mesh.dim == 2 && e.type == 2) {
                    for (int k = 0; k < 3; ++k) mesh.cells.push_back(e.v[k]);
                } else if (mesh.dim == 2 && e.type == 1) {
                    for (int k = 0; k < 2; ++k) mesh.boundary_facets.push_back(e.v[k]);
                    mesh.facet_tags.push_back(e.phys);
                }
            }
            have_elements = true;
        }
    }
    if (!have_nodes || !have_elements)
        throw MeshError("missing $Nodes or $Elements section: " + path);

    mesh.validate();
    return mesh;
}

void write_gmsh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file: " + path);
    out.precision(17);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << mesh.nVertices() << "\n";
    for (int v = 0; v < mesh.nVertices(); ++v) {
        const Vec3& p = mesh.vertices[v];
        out << (v + 1) << " " << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
    out << "$EndNodes\n$Elements\n";
    out << (mesh.nFacets() + mesh.nCells()) << "\n";
    int id = 1;
    const int facet_type = mesh.dim == 3 ? 2 : 1;
    for (int f = 0; f < mesh.nFacets(); ++f) {
        out << id++ << " " << facet_type << " 2 " << mesh.facet_tags[f] << " "
            << mesh.facet_tags[f];
        for (int v : mesh.facet(f)) out << " " << (v + 1);
        out << "\n";
    }
    const int cell_type = mesh.dim == 3 ? 4 : 2;
    for (int c = 0; c < mesh.nCells(); ++c) {
        out << id++ << " " << cell_type << " 2 0 0";
        for (int v : mesh.cell(c)) out << " " << (v + 1);
        out << "\n";
    }
    out << "$EndElements\n";
}

}  // namespace perfusim
