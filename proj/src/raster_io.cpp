#include "sublab/raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "sublab/text.hpp"

namespace sublab {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_header_key(const std::string& key) {
    static const char* const keys[] = {"ncols",     "nrows",     "xllcorner",   "yllcorner",
                                       "xllcenter", "yllcenter", "cellsize",    "nodata_value"};
    return std::find_if(std::begin(keys), std::end(keys), [&](const char* k) { return key == k; }) !=
           std::end(keys);
}

long long parse_integer(const std::string& token, const char* what) {
    long long v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw GridFormatError(std::string("non-integer ") + what + ": '" + token + "'");
    }
    return v;
}

}  // namespace

CategoricalRaster load_ascii_grid(std::istream& in) {
    std::map<std::string, std::string> header;
    std::string token;
    std::optional<std::string> first_value;

    // Header lines are "key value" pairs; the first token that is not a key starts the data.
    while (in >> token) {
        const std::string key = lower(token);
        if (!is_header_key(key)) {
            first_value = token;
            break;
        }
        std::string value;
        if (!(in >> value)) {
            throw GridFormatError("missing value for header key '" + token + "'");
        }
        if (header.count(key)) {
            throw GridFormatError("duplicate header key '" + token + "'");
        }
        header[key] = value;
    }

    for (const char* required : {"ncols", "nrows", "cellsize"}) {
        if (!header.count(required)) {
            throw GridFormatError(std::string("missing header key '") + required + "'");
        }
    }
    const long long ncols = parse_integer(header["ncols"], "ncols");
    const long long nrows = parse_integer(header["nrows"], "nrows");
    if (ncols <= 0 || nrows <= 0 || ncols > (1LL << 20) || nrows > (1LL << 20)) {
        throw GridFormatError("invalid grid dimensions");
    }
    double cell_size = 0.0;
    if (!parse_number(header["cellsize"], cell_size) || !(cell_size > 0.0)) {
        throw GridFormatError("invalid cellsize '" + header["cellsize"] + "'");
    }
    for (const char* k : {"xllcorner", "yllcorner", "xllcenter", "yllcenter"}) {
        double unused = 0.0;
        if (header.count(k) && !parse_number(header[k], unused)) {
            throw GridFormatError(std::string("invalid ") + k + " '" + header[k] + "'");
        }
    }
    std::optional<long long> nodata;
    if (header.count("nodata_value")) {
        double nd = 0.0;
        if (!parse_number(header["nodata_value"], nd)) {
            throw GridFormatError("invalid NODATA_value '" + header["nodata_value"] + "'");
        }
        if (nd == static_cast<double>(static_cast<long long>(nd))) {
            nodata = static_cast<long long>(nd);
        }
    }

    const std::size_t count = static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
    std::vector<ClassIndex> values;
    values.reserve(count);
    long long max_value = 0;
    auto consume = [&](const std::string& t) {
        const long long v = parse_integer(t, "cell value");
        if (nodata && v == *nodata) {
            throw GridFormatError("NODATA cell at index " + std::to_string(values.size()));
        }
        if (v < 0) {
            throw GridFormatError("negative class index " + t);
        }
        if (v > 65535) {
            throw GridFormatError("class index too large: " + t);
        }
        max_value = std::max(max_value, v);
        values.push_back(static_cast<ClassIndex>(v));
    };
    if (first_value) {
        consume(*first_value);
    }
    while (values.size() < count && in >> token) {
        consume(token);
    }
    if (values.size() < count) {
        throw GridFormatError("grid truncated: expected " + std::to_string(count) + " cells, got " +
                              std::to_string(values.size()));
    }
    if (in >> token) {
        throw GridFormatError("trailing data after " + std::to_string(count) + " cells");
    }
    return CategoricalRaster(static_cast<int>(ncols), static_cast<int>(nrows), cell_size,
                             static_cast<int>(max_value) + 1, std::move(values));
}

CategoricalRaster load_ascii_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open raster '" + path + "'");
    }
    try {
        return load_ascii_grid(in);
    } catch (const GridFormatError& e) {
        throw GridFormatError(path + ": " + e.what());
    }
}

void save_ascii_grid(const CategoricalRaster& raster, std::ostream& out) {
    out << "ncols " << raster.width() << '\n'
        << "nrows " << raster.height() << '\n'
        << "xllcorner 0\n"
        << "yllcorner 0\n"
        << "cellsize " << format_number(raster.cell_size()) << '\n';
    std::string line;
    for (int r = 0; r < raster.height(); ++r) {
        line.clear();
        for (int c = 0; c < raster.width(); ++c) {
            if (c) line.push_back(' ');
            line += std::to_string(raster.at(r, c));
        }
        line.push_back('\n');
        out << line;
    }
}

std::string save_ascii_grid(const CategoricalRaster& raster) {
    std::ostringstream os;
    save_ascii_grid(raster, os);
    return os.str();
}

}  // namespace sublab
