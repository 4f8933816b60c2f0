#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sublab/adaptive.hpp"
#include "sublab/execution.hpp"
#include "sublab/generators.hpp"
#include "sublab/harness.hpp"

namespace sublab {

/// Invalid configuration; path is the JSON field path, e.g. "designs[2].k".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RasterSource {
    enum class Kind { File, Mosaic, Smoothed };
    Kind kind = Kind::Smoothed;
    std::string path;
    MosaicParams mosaic;
    SmoothedBinaryParams smoothed{1980, 1980, 60, 0.5, 0};
    bool seed_given = false;  ///< generator seed set explicitly; otherwise the run seed is used
};

CategoricalRaster load_raster(const RasterSource& source, Execution exec = Execution::Parallel);

struct RunConfig {
    RasterSource raster;
    ExperimentConfig experiment;
    AdaptiveConfig adaptive;
    int repetitions = 25;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;

    /// Default legends: binary on class 1 at 0.1, 0.5 and 0.75, plus majority. Full design grid.
    static RunConfig defaults();
};

nlohmann::json legend_to_json(const Legend& legend);
Legend legend_from_json(const nlohmann::json& j, const std::string& path = "legend");

nlohmann::json design_to_json(const ResponseDesign& design);
ResponseDesign design_from_json(const nlohmann::json& j, const std::string& path = "design");

/// Fields absent from j keep their values from base. Unknown keys are errors.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = RunConfig::defaults());
nlohmann::json to_json(const RunConfig& config);

}  // namespace sublab
