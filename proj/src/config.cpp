#include "sublab/config.hpp"

#include <set>

#include "sublab/raster_io.hpp"

using nlohmann::json;

namespace sublab {
namespace {

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown field");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

long long get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(path, "expected an integer");
    return j.get<long long>();
}

int get_int(const json& j, const std::string& path) {
    const long long v = get_integer(j, path);
    if (v < -(1LL << 31) || v >= (1LL << 31)) throw ConfigError(path, "integer out of range");
    return static_cast<int>(v);
}

std::uint64_t get_seed(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    const long long v = get_integer(j, path);
    if (v < 0) throw ConfigError(path, "seed must be non-negative");
    return static_cast<std::uint64_t>(v);
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<int> get_int_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

RasterSource raster_from_json(const json& j, const std::string& path, RasterSource src) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    if (j.contains("file")) {
        check_keys(j, path, {"file"});
        src.kind = RasterSource::Kind::File;
        src.path = get_string(j["file"], path + ".file");
        return src;
    }
    if (!j.contains("generator")) throw ConfigError(path, "needs 'file' or 'generator'");
    const std::string gen = get_string(j["generator"], path + ".generator");
    src.seed_given = j.contains("seed");
    if (gen == "mosaic") {
        check_keys(j, path, {"generator", "width", "height", "class_count", "patch_density", "class_weights", "seed"});
        src.kind = RasterSource::Kind::Mosaic;
        auto& m = src.mosaic;
        m.width = j.contains("width") ? get_int(j["width"], path + ".width") : 1980;
        m.height = j.contains("height") ? get_int(j["height"], path + ".height") : 1980;
        m.class_count = j.contains("class_count") ? get_int(j["class_count"], path + ".class_count") : 6;
        m.patch_density = j.contains("patch_density") ? get_number(j["patch_density"], path + ".patch_density") : 5.0;
        m.class_weights.assign(static_cast<std::size_t>(std::max(m.class_count, 0)), 1.0);
        if (j.contains("class_weights")) {
            const auto& w = j["class_weights"];
            if (!w.is_array()) throw ConfigError(path + ".class_weights", "expected an array");
            m.class_weights.clear();
            for (std::size_t i = 0; i < w.size(); ++i) {
                m.class_weights.push_back(get_number(w[i], path + ".class_weights[" + std::to_string(i) + "]"));
            }
        }
        if (src.seed_given) m.seed = get_seed(j["seed"], path + ".seed");
        if (m.width <= 0 || m.height <= 0) throw ConfigError(path, "dimensions must be positive");
        if (m.class_count < 1) throw ConfigError(path + ".class_count", "must be >= 1");
        if (m.class_weights.size() != static_cast<std::size_t>(m.class_count)) {
            throw ConfigError(path + ".class_weights", "length must equal class_count");
        }
        double total = 0.0;
        for (double w : m.class_weights) {
            if (w < 0.0) throw ConfigError(path + ".class_weights", "weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0)) throw ConfigError(path + ".class_weights", "weights sum to zero");
        if (!(m.patch_density > 0.0)) throw ConfigError(path + ".patch_density", "must be positive");
        return src;
    }
    if (gen == "smoothed") {
        check_keys(j, path, {"generator", "width", "height", "radius", "cover", "seed"});
        src.kind = RasterSource::Kind::Smoothed;
        auto& s = src.smoothed;
        s.width = j.contains("width") ? get_int(j["width"], path + ".width") : 1980;
        s.height = j.contains("height") ? get_int(j["height"], path + ".height") : 1980;
        s.smoothing_radius = j.contains("radius") ? get_int(j["radius"], path + ".radius") : 60;
        s.cover_fraction = j.contains("cover") ? get_number(j["cover"], path + ".cover") : 0.5;
        if (src.seed_given) s.seed = get_seed(j["seed"], path + ".seed");
        if (s.width <= 0 || s.height <= 0) throw ConfigError(path, "dimensions must be positive");
        if (s.smoothing_radius < 0) throw ConfigError(path + ".radius", "must be >= 0");
        if (!(s.cover_fraction > 0.0 && s.cover_fraction < 1.0)) throw ConfigError(path + ".cover", "must lie in (0, 1)");
        return src;
    }
    throw ConfigError(path + ".generator", "unknown generator '" + gen + "' (expected mosaic or smoothed)");
}

json raster_to_json(const RasterSource& src) {
    switch (src.kind) {
        case RasterSource::Kind::File:
            return {{"file", src.path}};
        case RasterSource::Kind::Mosaic: {
            const auto& m = src.mosaic;
            return {{"generator", "mosaic"},       {"width", m.width},
                    {"height", m.height},          {"class_count", m.class_count},
                    {"patch_density", m.patch_density}, {"class_weights", m.class_weights},
                    {"seed", m.seed}};
        }
        case RasterSource::Kind::Smoothed: {
            const auto& s = src.smoothed;
            return {{"generator", "smoothed"}, {"width", s.width},          {"height", s.height},
                    {"radius", s.smoothing_radius}, {"cover", s.cover_fraction}, {"seed", s.seed}};
        }
    }
    return {};
}

}  // namespace

CategoricalRaster load_raster(const RasterSource& source, Execution exec) {
    switch (source.kind) {
        case RasterSource::Kind::File:
            return load_ascii_grid_file(source.path);
        case RasterSource::Kind::Mosaic:
            return generate_patch_mosaic(source.mosaic, exec);
        case RasterSource::Kind::Smoothed:
            return generate_smoothed_binary(source.smoothed, exec);
    }
    throw std::logic_error("unknown raster source");
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.experiment.legends = {Legend::binary({1}, 0.1), Legend::binary({1}, 0.5), Legend::binary({1}, 0.75),
                            Legend::majority()};
    for (int n : {4, 9, 16, 25, 36, 100, 144}) c.experiment.designs.push_back(PointBased{n});
    for (int k : {2, 3, 4, 5, 6, 10, 12}) {
        for (Protocol p : {Protocol::TTM, Protocol::MTT, Protocol::TwoStageMajority}) {
            c.experiment.designs.push_back(PartitionBased{k, p});
        }
    }
    c.adaptive.legend = Legend::binary({1}, 0.5);
    return c;
}

json legend_to_json(const Legend& legend) {
    if (legend.is_majority()) return {{"type", "majority"}};
    return {{"type", "binary"}, {"classes", legend.binary_rule().target_classes},
            {"threshold", legend.binary_rule().threshold}};
}

Legend legend_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return Legend::parse(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path, e.what());
        }
    }
    if (!j.is_object() || !j.contains("type")) throw ConfigError(path, "expected an object with a 'type'");
    const std::string type = get_string(j["type"], path + ".type");
    if (type == "majority") {
        check_keys(j, path, {"type"});
        return Legend::majority();
    }
    if (type != "binary") throw ConfigError(path + ".type", "unknown legend type '" + type + "'");
    check_keys(j, path, {"type", "classes", "threshold"});
    if (!j.contains("classes")) throw ConfigError(path + ".classes", "required");
    if (!j.contains("threshold")) throw ConfigError(path + ".threshold", "required");
    const auto classes = get_int_list(j["classes"], path + ".classes");
    const double t = get_number(j["threshold"], path + ".threshold");
    if (classes.empty()) throw ConfigError(path + ".classes", "must not be empty");
    for (int c : classes) {
        if (c < 0) throw ConfigError(path + ".classes", "class indices must be non-negative");
    }
    if (!(t > 0.0 && t < 1.0)) throw ConfigError(path + ".threshold", "must lie in (0, 1)");
    return Legend::binary(classes, t);
}

json design_to_json(const ResponseDesign& design) {
    if (auto* p = std::get_if<PointBased>(&design)) return {{"type", "points"}, {"n", p->n_points}};
    const auto& part = std::get<PartitionBased>(design);
    return {{"type", "partition"}, {"k", part.k_per_side}, {"protocol", protocol_name(part.protocol)}};
}

ResponseDesign design_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError(path, "expected an object with a 'type'");
    const std::string type = get_string(j["type"], path + ".type");
    if (type == "points") {
        check_keys(j, path, {"type", "n"});
        if (!j.contains("n")) throw ConfigError(path + ".n", "required");
        const int n = get_int(j["n"], path + ".n");
        if (n < 1) throw ConfigError(path + ".n", "must be >= 1");
        return PointBased{n};
    }
    if (type != "partition") throw ConfigError(path + ".type", "unknown design type '" + type + "'");
    check_keys(j, path, {"type", "k", "protocol"});
    if (!j.contains("k")) throw ConfigError(path + ".k", "required");
    if (!j.contains("protocol")) throw ConfigError(path + ".protocol", "required");
    const int k = get_int(j["k"], path + ".k");
    if (k < 1) throw ConfigError(path + ".k", "must be >= 1");
    try {
        return PartitionBased{k, parse_protocol(get_string(j["protocol"], path + ".protocol"))};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ".protocol", e.what());
    }
}

RunConfig parse_run_config(const json& j, RunConfig c) {
    check_keys(j, "config",
               {"raster", "unit_side", "legends", "designs", "realizations", "shifts", "seed", "output", "bin_step",
                "span", "scalogram_sides", "adaptive", "threads"});
    auto& e = c.experiment;
    if (j.contains("raster")) c.raster = raster_from_json(j["raster"], "raster", c.raster);
    if (j.contains("unit_side")) {
        e.unit_side = get_int(j["unit_side"], "unit_side");
        if (e.unit_side < 2) throw ConfigError("unit_side", "must be >= 2");
    }
    if (j.contains("legends")) {
        const auto& arr = j["legends"];
        if (!arr.is_array()) throw ConfigError("legends", "expected an array");
        e.legends.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            e.legends.push_back(legend_from_json(arr[i], "legends[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("designs")) {
        const auto& arr = j["designs"];
        if (!arr.is_array()) throw ConfigError("designs", "expected an array");
        e.designs.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            e.designs.push_back(design_from_json(arr[i], "designs[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("realizations")) {
        e.realizations = get_int(j["realizations"], "realizations");
        if (e.realizations < 1) throw ConfigError("realizations", "must be >= 1");
    }
    if (j.contains("shifts")) {
        e.shifts = get_int_list(j["shifts"], "shifts");
        if (e.shifts.empty()) throw ConfigError("shifts", "must not be empty");
    }
    if (j.contains("seed")) c.seed = get_seed(j["seed"], "seed");
    if (j.contains("output")) c.output_dir = get_string(j["output"], "output");
    if (j.contains("bin_step")) {
        e.bin_step = get_number(j["bin_step"], "bin_step");
        if (!(e.bin_step > 0.0 && e.bin_step < 1.0)) throw ConfigError("bin_step", "must lie in (0, 1)");
    }
    if (j.contains("span")) {
        e.span = get_number(j["span"], "span");
        if (!(e.span > 0.0 && e.span <= 1.0)) throw ConfigError("span", "must lie in (0, 1]");
    }
    if (j.contains("scalogram_sides")) e.scalogram_sides = get_int_list(j["scalogram_sides"], "scalogram_sides");
    if (j.contains("threads")) c.threads = get_int(j["threads"], "threads");
    if (j.contains("adaptive")) {
        const auto& a = j["adaptive"];
        check_keys(a, "adaptive", {"alpha", "n_init", "n_max", "increment", "legend", "repetitions"});
        if (a.contains("alpha")) c.adaptive.alpha = get_number(a["alpha"], "adaptive.alpha");
        if (a.contains("n_init")) c.adaptive.n_init = get_int(a["n_init"], "adaptive.n_init");
        if (a.contains("n_max")) c.adaptive.n_max = get_int(a["n_max"], "adaptive.n_max");
        if (a.contains("increment")) c.adaptive.increment = get_int(a["increment"], "adaptive.increment");
        if (a.contains("legend")) c.adaptive.legend = legend_from_json(a["legend"], "adaptive.legend");
        if (a.contains("repetitions")) c.repetitions = get_int(a["repetitions"], "adaptive.repetitions");
        if (!(c.adaptive.alpha > 0.0 && c.adaptive.alpha < 1.0)) throw ConfigError("adaptive.alpha", "must lie in (0, 1)");
        if (c.adaptive.n_init < 1) throw ConfigError("adaptive.n_init", "must be >= 1");
        if (c.adaptive.n_max < c.adaptive.n_init) throw ConfigError("adaptive.n_max", "must be >= n_init");
        if (c.adaptive.increment < 1) throw ConfigError("adaptive.increment", "must be >= 1");
        if (c.repetitions < 1) throw ConfigError("adaptive.repetitions", "must be >= 1");
    }
    return c;
}

json to_json(const RunConfig& c) {
    const auto& e = c.experiment;
    json legends = json::array();
    for (const auto& l : e.legends) legends.push_back(legend_to_json(l));
    json designs = json::array();
    for (const auto& d : e.designs) designs.push_back(design_to_json(d));
    return {{"raster", raster_to_json(c.raster)},
            {"unit_side", e.unit_side},
            {"legends", legends},
            {"designs", designs},
            {"realizations", e.realizations},
            {"shifts", e.shifts},
            {"seed", c.seed},
            {"output", c.output_dir},
            {"bin_step", e.bin_step},
            {"span", e.span},
            {"scalogram_sides", e.scalogram_sides},
            {"threads", c.threads},
            {"adaptive",
             {{"alpha", c.adaptive.alpha},
              {"n_init", c.adaptive.n_init},
              {"n_max", c.adaptive.n_max},
              {"increment", c.adaptive.increment},
              {"legend", legend_to_json(c.adaptive.legend)},
              {"repetitions", c.repetitions}}}};
}

}  // namespace sublab
