#include "perfusim/immersed_surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "perfusim/errors.hpp"

namespace perfusim {

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
// feature: 0..2 vertex a/b/c, 3..5 edge ab/bc/ca, 6 face.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c, int& feature) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) { feature = 0; return a; }

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) { feature = 1; return b; }

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        feature = 3;
        return a + (d1 / (d1 - d3)) * ab;
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) { feature = 2; return c; }

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        feature = 5;
        return a + (d2 / (d2 - d6)) * ac;
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        feature = 4;
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }

    feature = 6;
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

ImmersedSurface ImmersedSurface::analytic(std::function<double(const Vec3&)> sdf,
                                          const Vec3& lo, const Vec3& hi) {
    ImmersedSurface s;
    s.sdf_ = std::move(sdf);
    s.bbox_lo_ = lo;
    s.bbox_hi_ = hi;
    return s;
}

ImmersedSurface ImmersedSurface::plane(const Vec3& point, const Vec3& normal) {
    const Vec3 n = normal.normalized();
    const double big = 1.0e9;
    return analytic([point, n](const Vec3& p) { return n.dot(p - point); },
                    Vec3(-big, -big, -big), Vec3(big, big, big));
}

ImmersedSurface ImmersedSurface::sphere(const Vec3& center, double radius) {
    return analytic([center, radius](const Vec3& p) {
                        return (p - center).norm() - radius;
                    },
                    center - Vec3::Constant(2 * radius),
                    center + Vec3::Constant(2 * radius));
}

void ImmersedSurface::finalize() {
    if (isAnalytic()) return;
    if (triangles.empty()) throw MeshError("immersed surface has no triangles");
    const int nv = static_cast<int>(vertices.size());

    bbox_lo_ = Vec3::Constant(std::numeric_limits<double>::max());
    bbox_hi_ = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const Vec3& p : vertices) {
        bbox_lo_ = bbox_lo_.cwiseMin(p);
        bbox_hi_ = bbox_hi_.cwiseMax(p);
    }

    face_normals_.resize(triangles.size());
    vertex_normals_.assign(nv, Vec3::Zero());
    edge_normals_.assign(triangles.size(), {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});

    std::map<std::pair<int, int>, Vec3> edge_accum;
    for (size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k : tri)
            if (k < 0 || k >= nv) throw MeshError("surface triangle index out of range");
        const Vec3 &a = vertices[tri[0]], &b = vertices[tri[1]], &c = vertices[tri[2]];
        Vec3 n = (b - a).cross(c - a);
        const double len = n.norm();
        if (len <= 0.0) throw MeshError("degenerate surface triangle " + std::to_string(t));
        n /= len;
        face_normals_[t] = n;

        // angle-weighted vertex normals
        const Vec3 e[3] = {b - a, c - b, a - c};
        for (int k = 0; k < 3; ++k) {
            const Vec3 u = e[k].normalized();
            const Vec3 w = -e[(k + 2) % 3].normalized();
            const double angle = std::acos(std::clamp(u.dot(w), -1.0, 1.0));
            vertex_normals_[tri[k]] += angle * n;
        }
        for (int k = 0; k < 3; ++k) {
            int i = tri[k], j = tri[(k + 1) % 3];
            if (i > j) std::swap(i, j);
            edge_accum[{i, j}] += n;
        }
    }
    for (size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            int i = tri[k], j = tri[(k + 1) % 3];
            if (i > j) std::swap(i, j);
            edge_normals_[t][k] = edge_accum[{i, j}];
        }
    }
}

double ImmersedSurface::signedDistance(const Vec3& p) const {
    if (isAnalytic()) return sdf_(p);
    return signedDistanceTriangulated(p);
}

double ImmersedSurface::unsignedDistance(const Vec3& p) const {
    return std::abs(signedDistance(p));
}

double ImmersedSurface::signedDistanceTriangulated(const Vec3& p) const {
    double best_d2 = std::numeric_limits<double>::max();
    Vec3 best_diff = Vec3::Zero();
    Vec3 best_normal = Vec3::UnitZ();
    for (size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        int feature;
        const Vec3 q = closest_point_on_triangle(p, vertices[tri[0]],
                                                 vertices[tri[1]],
                                                 vertices[tri[2]], feature);
        const Vec3 diff = p - q;
        const double d2 = diff.squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_diff = diff;
            switch (feature) {
                case 0: case 1: case 2:
                    best_normal = vertex_normals_[tri[feature]];
                    break;
                case 3: case 4: case 5:
                    best_normal = edge_normals_[t][feature - 3];
                    break;
                default:
                    best_normal = face_normals_[t];
            }
        }
    }
    const double d = std::sqrt(best_d2);
    return best_normal.dot(best_diff) >= 0.0 ? d : -d;
}

double ImmersedSurface::area() const {
    if (isAnalytic()) return 0.0;
    double a = 0.0;
    for (const auto& tri : triangles) {
        const Vec3 &p0 = vertices[tri[0]], &p1 = vertices[tri[1]], &p2 = vertices[tri[2]];
        a += 0.5 * (p1 - p0).cross(p2 - p0).norm();
    }
    return a;
}

Vec3 ImmersedSurface::centroid() const {
    Vec3 c = Vec3::Zero();
    double total = 0.0;
    for (const auto& tri : triangles) {
        const Vec3 &p0 = vertices[tri[0]], &p1 = vertices[tri[1]], &p2 = vertices[tri[2]];
        const double a = 0.5 * (p1 - p0).cross(p2 - p0).norm();
        c += a * (p0 + p1 + p2) / 3.0;
        total += a;
    }
    return total > 0.0 ? Vec3(c / total) : c;
}

ImmersedSurface load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open surface file: " + path);
    std::string first;
    in >> first;

    ImmersedSurface s;
    if (first == "OFF") {
        int nv, nf, ne;
        if (!(in >> nv >> nf >> ne)) throw MeshError("bad OFF header: " + path);
        s.vertices.resize(nv);
        for (int i = 0; i < nv; ++i) {
            double x, y, z;
            if (!(in >> x >> y >> z)) throw MeshError("bad OFF vertex: " + path);
            s.vertices[i] = Vec3(x, y, z);
        }
        for (int i = 0; i < nf; ++i) {
            int n, a, b, c;
            if (!(in >> n >> a >> b >> c) || n != 3)
                throw MeshError("OFF file must contain triangles only: " + path);
            s.triangles.push_back({a, b, c});
        }
    } else if (first == "solid") {
        // ASCII STL: vertices are duplicated per facet; merge exact duplicates.
        std::map<std::array<double, 3>, int> index;
        std::string tok;
        std::vector<int> tri;
        while (in >> tok) {
            if (tok == "vertex") {
                double x, y, z;
                if (!(in >> x >> y >> z)) throw MeshError("bad STL vertex: " + path);
                const std::array<double, 3> key{x, y, z};
                auto [it, inserted] = index.try_emplace(key, static_cast<int>(s.vertices.size()));
                if (inserted) s.vertices.emplace_back(x, y, z);
                tri.push_back(it->second);
                if (tri.size() == 3) {
                    s.triangles.push_back({tri[0], tri[1], tri[2]});
                    tri.clear();
                }
            }
        }
        if (!tri.empty()) throw MeshError("truncated STL facet: " + path);
    } else {
        throw MeshError("unrecognized surface format (need OFF or ASCII STL): " + path);
    }
    s.finalize();
    return s;
}

void write_off(const ImmersedSurface& s, const std::string& path) {
    if (s.isAnalytic()) throw MeshError("cannot write analytic surface to OFF");
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write surface file: " + path);
    out.precision(17);
    out << "OFF\n" << s.vertices.size() << " " << s.triangles.size() << " 0\n";
    for (const Vec3& p : s.vertices)
        out << p.x() << " " << p.y() << " " << p.z() << "\n";
    for (const auto& t : s.triangles)
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace perfusim
