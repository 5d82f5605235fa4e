#include "perfusim/region_partition.hpp"

#include <limits>
#include <string>

#include "perfusim/errors.hpp"

namespace perfusim {

RegionPartition build_region_partition(const Mesh& mesh,
                                       const std::vector<Vec3>& seeds) {
    if (seeds.empty()) throw MeshError("region partition needs at least one seed");
    RegionPartition part;
    part.J = static_cast<int>(seeds.size());
    part.region_of_cell.resize(mesh.nCells());
    part.region_volumes.assign(part.J, 0.0);

    for (int c = 0; c < mesh.nCells(); ++c) {
        const Vec3 b = cell_barycenter(mesh, mesh.vertices, c);
        int best = 0;
        double best_d2 = std::numeric_limits<double>::max();
        for (int j = 0; j < part.J; ++j) {
            const double d2 = (b - seeds[j]).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = j;
            }
        }
        part.region_of_cell[c] = best;
        part.region_volumes[best] += cell_volume(mesh, mesh.vertices, c);
    }

    for (int j = 0; j < part.J; ++j)
        if (part.region_volumes[j] <= 0.0)
            throw MeshError("empty region " + std::to_string(j + 1) +
                            " (seed captures no cell)");
    return part;
}

}  // namespace perfusim
