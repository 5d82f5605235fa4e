#include "perfusim/meshbuild.hpp"
#include "perfusim/fem.hpp"
#include <cstdio>
int main() {
    auto m = perfusim::meshbuild::unit_cube(1);
    std::printf("verts=%d cells=%d facets=%d vol=%.17g\n", m.nVertices(), m.nCells(),
                m.nFacets(), m.totalVolume());
    auto m2 = perfusim::meshbuild::unit_square(1);
    std::printf("2d verts=%d cells=%d facets=%d vol=%.17g\n", m2.nVertices(), m2.nCells(),
                m2.nFacets(), m2.totalVolume());
    perfusim::FeSpace s(m, 1);
    auto M = perfusim::assemble_mass(s, m.vertices);
    std::printf("mass sum=%.17g\n", M.sum());
    auto K = perfusim::assemble_stiffness(s, m.vertices, 1.0);
    std::printf("stiff sym=%g\n", (Eigen::MatrixXd(K) - Eigen::MatrixXd(K).transpose()).cwiseAbs().maxCoeff());
    return 0;
}
