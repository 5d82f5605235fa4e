#pragma once

#include <vector>

#include "perfusim/mesh.hpp"

namespace perfusim {

/**
 * Non-overlapping partition of the perfusion domain into J regions, one per
 * coronary outlet. Immutable after construction.
 */
struct RegionPartition {
    std::vector<int> region_of_cell;    // cell -> region index in 0..J-1
    std::vector<double> region_volumes; // |Omega_j|, m^3
    int J = 0;

    double totalVolume() const {
        double v = 0.0;
        for (double rv : region_volumes) v += rv;
        return v;
    }
};

/**
 * Assigns each cell to the region of the nearest seed (Euclidean distance to
 * the cell barycenter; ties break to the lowest seed index). Throws MeshError
 * if a seed captures no cell.
 */
RegionPartition build_region_partition(const Mesh& mesh,
                                       const std::vector<Vec3>& seeds);

}  // namespace perfusim
