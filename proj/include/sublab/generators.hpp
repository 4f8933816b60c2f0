#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sublab/execution.hpp"
#include "sublab/raster.hpp"

namespace sublab {

struct MosaicParams {
    int width = 0;
    int height = 0;
    int class_count = 2;
    double patch_density = 5.0;  ///< seed sites per 10^4 cells
    std::vector<double> class_weights;
    std::uint64_t seed = 0;
};

struct MosaicSite {
    double x;  ///< column coordinate in cell units
    double y;  ///< row coordinate in cell units
    ClassIndex cls;
};

/// Seed sites of a patch mosaic, in draw order.
std::vector<MosaicSite> mosaic_sites(const MosaicParams& params);

/// Voronoi mosaic: every cell takes the class of the nearest site (Euclidean distance
/// from the cell centre, ties to the lower site index).
CategoricalRaster generate_patch_mosaic(const MosaicParams& params, Execution exec = Execution::Parallel);

struct SmoothedBinaryParams {
    int width = 0;
    int height = 0;
    int smoothing_radius = 0;  ///< box filter half-width in cells
    double cover_fraction = 0.5;
    std::uint64_t seed = 0;
};

/// Mean over the (2r+1)^2 window clipped to the grid, for each cell.
std::vector<double> box_mean(std::span<const double> values, int width, int height, int radius,
                             Execution exec = Execution::Parallel);

/// Uniform noise smoothed by a box filter, then thresholded so that exactly
/// round(cover_fraction * cells) cells (the highest smoothed values, ties by index) are class 1.
CategoricalRaster generate_smoothed_binary(const SmoothedBinaryParams& params,
                                           Execution exec = Execution::Parallel);

}  // namespace sublab
