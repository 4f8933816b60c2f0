#include "sublab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sublab/text.hpp"

namespace fs = std::filesystem;

namespace sublab {
namespace {

std::string num(double v) { return format_number(v); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != columns) {
            throw std::runtime_error(path.string() + ": expected " + std::to_string(columns) + " fields in '" + line +
                                     "'");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

double to_double(const std::string& s) {
    double v = 0.0;
    if (!parse_number(s, v)) throw std::runtime_error("bad number '" + s + "'");
    return v;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string file_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    }
    return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename to " + path.string() + ": " + ec.message());
    }
}

std::string errors_by_design_csv(const ErrorReport& report) {
    std::string s = "legend,design,protocol,n_or_k,overall_error,stderr\n";
    for (const auto& d : report.designs) {
        s += d.legend + ',' + d.design + ',' + d.protocol + ',' + std::to_string(d.n_or_k) + ',' +
             num(d.overall_error) + ',' + num(d.stderr_error) + '\n';
    }
    return s;
}

std::string errors_by_unit_csv(const ErrorReport& report) {
    std::string s = "unit_row,unit_col,pi,erp,legend,design,n_or_k,error_rate\n";
    for (const auto& d : report.designs) {
        const std::string tail = ',' + d.legend + ',' + d.series_design() + ',' + std::to_string(d.n_or_k) + ',';
        for (const auto& u : d.units) {
            s += std::to_string(u.unit_row) + ',' + std::to_string(u.unit_col) + ',' + num(u.pi) + ',' + num(u.erp) +
                 tail + num(u.error_rate) + '\n';
        }
    }
    return s;
}

std::string curves_csv(const ErrorReport& report) {
    std::string s = "metric,bin_center,mean_error,count,legend,design,n_or_k\n";
    for (const auto& c : report.curves) {
        for (std::size_t b = 0; b < c.curve.bin_centers.size(); ++b) {
            s += c.metric + ',' + num(c.curve.bin_centers[b]) + ',' + num(c.curve.mean_error[b]) + ',' +
                 std::to_string(c.curve.counts[b]) + ',' + c.legend + ',' + c.design + ',' + std::to_string(c.n_or_k) +
                 '\n';
        }
    }
    return s;
}

std::string scalogram_csv(const std::vector<ScalogramRow>& rows) {
    std::string s = "unit_side,frac_purity_gt_090,frac_purity_lt_050\n";
    for (const auto& r : rows) {
        s += std::to_string(r.unit_side) + ',' + num(r.frac_purity_gt_090) + ',' + num(r.frac_purity_lt_050) + '\n';
    }
    return s;
}

std::string optimization_csv(const OptimizationReport& report) {
    std::string s = "unit_row,unit_col,metric,mean_n,error_rate,cap_hit_fraction\n";
    for (const auto& r : report.rows) {
        s += std::to_string(r.unit_row) + ',' + std::to_string(r.unit_col) + ',' + num(r.metric) + ',' +
             num(r.mean_n) + ',' + num(r.error_rate) + ',' + num(r.cap_hit_fraction) + '\n';
    }
    return s;
}

std::string curves_svg(const std::vector<const CurveResult*>& family) {
    constexpr double W = 640, H = 420, L = 60, R = 150, T = 30, B = 50;
    const double pw = W - L - R;
    const double ph = H - T - B;
    auto sx = [&](double x) { return L + x * pw; };
    auto sy = [&](double y) { return T + (1.0 - y) * ph; };
    static const char* const colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                         "#66a61e", "#e6ab02", "#a6761d", "#666666"};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    const std::string metric = family.empty() ? "" : family.front()->metric;
    const std::string title = family.empty() ? "" : family.front()->legend + " " + family.front()->design;
    os << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(title)
       << "</text>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
       << "<line x1=\"" << L << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\"" << sy(0) << "\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << sy(0) << "\" x2=\"" << L << "\" y2=\"" << sy(1) << "\"/>\n"
       << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        os << "<text x=\"" << sx(v) << "\" y=\"" << sy(0) + 15 << "\" text-anchor=\"middle\">" << v << "</text>\n";
        os << "<text x=\"" << L - 5 << "\" y=\"" << sy(v) + 3 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
    os << "<text x=\"" << sx(0.5) << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xml_escape(metric)
       << "</text>\n";
    os << "<text x=\"15\" y=\"" << sy(0.5) << "\" transform=\"rotate(-90 15 " << sy(0.5)
       << ")\" text-anchor=\"middle\">error rate</text>\n";
    os << "</g>\n";

    for (std::size_t s = 0; s < family.size(); ++s) {
        const CurveResult& c = *family[s];
        const char* color = colors[s % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t b = 0; b < c.curve.bin_centers.size(); ++b) {
            double y = b < c.smoothed.size() ? c.smoothed[b] : std::nan("");
            if (std::isnan(y)) y = c.curve.counts[b] ? c.curve.mean_error[b] : std::nan("");
            if (std::isnan(y)) continue;
            if (!first) os << ' ';
            os << sx(c.curve.bin_centers[b]) << ',' << sy(std::clamp(y, 0.0, 1.0));
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 15.0 * static_cast<double>(s);
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">n_or_k = " << c.n_or_k
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<fs::path> write_report(const ErrorReport& report, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());

    std::vector<fs::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const fs::path p = directory / name;
        write_file_atomic(p, content);
        written.push_back(p);
    };
    put("errors_by_design.csv", errors_by_design_csv(report));
    put("errors_by_unit.csv", errors_by_unit_csv(report));
    put("curves.csv", curves_csv(report));
    put("scalogram.csv", scalogram_csv(report.scalogram));

    std::map<std::string, std::vector<const CurveResult*>> families;
    std::vector<std::string> order;
    for (const auto& c : report.curves) {
        const std::string key = "curves_" + c.metric + "_" + file_token(c.legend) + "_" + file_token(c.design) + ".svg";
        if (!families.count(key)) order.push_back(key);
        families[key].push_back(&c);
    }
    for (const auto& key : order) put(key, curves_svg(families[key]));
    return written;
}

fs::path write_optimization_report(const OptimizationReport& report, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());
    const fs::path p = directory / "optimization.csv";
    write_file_atomic(p, optimization_csv(report));
    return p;
}

ErrorReport read_report(const fs::path& directory) {
    ErrorReport report;
    for (const auto& f : read_csv(directory / "errors_by_design.csv", 6)) {
        DesignResult d;
        d.legend = f[0];
        d.design = f[1];
        d.protocol = f[2];
        d.n_or_k = static_cast<int>(to_double(f[3]));
        d.overall_error = to_double(f[4]);
        d.stderr_error = to_double(f[5]);
        report.designs.push_back(std::move(d));
    }
    auto find_design = [&](const std::string& legend, const std::string& series, int n_or_k) -> DesignResult& {
        for (auto& d : report.designs) {
            if (d.legend == legend && d.series_design() == series && d.n_or_k == n_or_k) return d;
        }
        throw std::runtime_error("unit row for unknown design " + legend + " " + series);
    };
    for (const auto& f : read_csv(directory / "errors_by_unit.csv", 8)) {
        UnitError u;
        u.unit_row = static_cast<int>(to_double(f[0]));
        u.unit_col = static_cast<int>(to_double(f[1]));
        u.pi = to_double(f[2]);
        u.erp = to_double(f[3]);
        u.error_rate = to_double(f[7]);
        find_design(f[4], f[5], static_cast<int>(to_double(f[6]))).units.push_back(u);
    }
    for (const auto& f : read_csv(directory / "curves.csv", 7)) {
        const std::string& metric = f[0];
        const std::string& legend = f[4];
        const std::string& design = f[5];
        const int n_or_k = static_cast<int>(to_double(f[6]));
        if (report.curves.empty() || report.curves.back().metric != metric || report.curves.back().legend != legend ||
            report.curves.back().design != design || report.curves.back().n_or_k != n_or_k) {
            CurveResult c;
            c.metric = metric;
            c.legend = legend;
            c.design = design;
            c.n_or_k = n_or_k;
            report.curves.push_back(std::move(c));
        }
        auto& curve = report.curves.back().curve;
        curve.bin_centers.push_back(to_double(f[1]));
        curve.mean_error.push_back(to_double(f[2]));
        curve.counts.push_back(static_cast<std::size_t>(to_double(f[3])));
    }
    for (auto& c : report.curves) {
        if (c.curve.bin_centers.size() >= 2) c.curve.step = c.curve.bin_centers[1] - c.curve.bin_centers[0];
    }
    for (const auto& f : read_csv(directory / "scalogram.csv", 3)) {
        report.scalogram.push_back({static_cast<int>(to_double(f[0])), to_double(f[1]), to_double(f[2])});
    }
    return report;
}

}  // namespace sublab
