#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sublab/raster.hpp"

namespace sublab {

class GridFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse an ESRI ASCII grid of non-negative integer class indices.
/// class_count = max value + 1. Rejects NODATA cells.
CategoricalRaster load_ascii_grid(std::istream& in);
CategoricalRaster load_ascii_grid_file(const std::string& path);

/// Canonical ESRI ASCII grid with xllcorner = yllcorner = 0 and no NODATA line.
void save_ascii_grid(const CategoricalRaster& raster, std::ostream& out);
std::string save_ascii_grid(const CategoricalRaster& raster);

}  // namespace sublab
