#include "sublab/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sublab/config.hpp"
#include "sublab/raster_io.hpp"
#include "sublab/report.hpp"
#include "sublab/rng.hpp"
#include "sublab/session_http.hpp"
#include "sublab/text.hpp"

using nlohmann::json;

namespace sublab::cli {

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool print_config = false;
    std::string out;
    std::string input;

    std::string design;
    std::vector<int> n;
    std::vector<int> k;
    std::vector<std::string> protocols;
    std::vector<std::string> legends;
    std::optional<int> realizations;
    std::optional<int> unit_side;
    std::vector<int> sides;

    std::optional<double> alpha;
    std::optional<int> n_init;
    std::optional<int> n_max;
    std::optional<int> repetitions;

    std::string generator;
    std::optional<int> width;
    std::optional<int> height;

    int unit_row = 0;
    int unit_col = 0;

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string journal;
};

std::uint64_t env_seed() {
    const char* v = std::getenv("SUBSAMPLE_LAB_SEED");
    if (!v || !*v) return 0;
    char* end = nullptr;
    errno = 0;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (errno || *end || v[0] == '-') throw ConfigError("SUBSAMPLE_LAB_SEED", "expected a non-negative integer");
    return s;
}

/// Config file, then flags, then validation. Nothing is computed here.
RunConfig resolve(const Options& o, const std::string& sub) {
    RunConfig c = RunConfig::defaults();
    bool seed_in_file = false;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("--config", "cannot read " + o.config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
        }
        c = parse_run_config(j, c);
        seed_in_file = j.is_object() && j.contains("seed");
    }
    if (o.seed) {
        c.seed = *o.seed;
    } else if (!seed_in_file) {
        c.seed = env_seed();
    }
    if (o.threads) c.threads = *o.threads;
    if (c.threads < 0) throw ConfigError("threads", "must be >= 0");
    if (!o.out.empty()) c.output_dir = o.out;
    if (!o.input.empty()) {
        c.raster.kind = RasterSource::Kind::File;
        c.raster.path = o.input;
    }
    if (!o.generator.empty()) {
        if (o.generator == "mosaic") {
            c.raster.kind = RasterSource::Kind::Mosaic;
            if (c.raster.mosaic.class_weights.empty()) {
                c.raster.mosaic = MosaicParams{1980, 1980, 6, 5.0, std::vector<double>(6, 1.0), 0};
            }
        } else if (o.generator == "smoothed") {
            c.raster.kind = RasterSource::Kind::Smoothed;
        } else {
            throw ConfigError("--generator", "expected mosaic or smoothed");
        }
    }
    if (o.width) c.raster.mosaic.width = c.raster.smoothed.width = *o.width;
    if (o.height) c.raster.mosaic.height = c.raster.smoothed.height = *o.height;
    if (!c.raster.seed_given) c.raster.mosaic.seed = c.raster.smoothed.seed = c.seed;

    auto& e = c.experiment;
    e.master_seed = c.seed;
    if (o.unit_side) e.unit_side = *o.unit_side;
    if (o.realizations) e.realizations = *o.realizations;
    if (!o.sides.empty()) e.scalogram_sides = o.sides;
    if (!o.legends.empty()) {
        e.legends.clear();
        for (const auto& s : o.legends) {
            try {
                e.legends.push_back(Legend::parse(s));
            } catch (const std::invalid_argument& ex) {
                throw ConfigError("--legend", ex.what());
            }
        }
    }

    const bool design_flags = !o.design.empty() || !o.n.empty() || !o.k.empty() || !o.protocols.empty();
    if (design_flags) {
        std::string which = o.design;
        if (which.empty()) which = !o.n.empty() && o.k.empty() && o.protocols.empty() ? "points"
                                   : o.n.empty()                                    ? "partition"
                                                                                    : "all";
        if (which != "points" && which != "partition" && which != "all") {
            throw ConfigError("--design", "expected points, partition or all");
        }
        std::vector<int> ns = o.n, ks = o.k;
        std::vector<Protocol> ps;
        for (const auto& d : e.designs) {
            if (const auto* p = std::get_if<PointBased>(&d)) {
                if (o.n.empty()) ns.push_back(p->n_points);
            } else if (const auto* q = std::get_if<PartitionBased>(&d)) {
                if (o.k.empty() && std::find(ks.begin(), ks.end(), q->k_per_side) == ks.end()) ks.push_back(q->k_per_side);
                if (o.protocols.empty() && std::find(ps.begin(), ps.end(), q->protocol) == ps.end()) ps.push_back(q->protocol);
            }
        }
        if (!o.protocols.empty()) {
            for (const auto& s : o.protocols) {
                try {
                    ps.push_back(parse_protocol(s));
                } catch (const std::invalid_argument& ex) {
                    throw ConfigError("--protocol", ex.what());
                }
            }
        }
        e.designs.clear();
        if (which != "partition") {
            for (int n : ns) e.designs.push_back(PointBased{n});
        }
        if (which != "points") {
            for (int k : ks) {
                for (Protocol p : ps) e.designs.push_back(PartitionBased{k, p});
            }
        }
    }

    auto& a = c.adaptive;
    if (o.alpha) a.alpha = *o.alpha;
    if (o.n_init) a.n_init = *o.n_init;
    if (o.n_max) a.n_max = *o.n_max;
    if (o.repetitions) c.repetitions = *o.repetitions;
    if ((sub == "optimize" || sub == "label") && o.legends.size() == 1) a.legend = e.legends.front();
    if ((sub == "optimize" || sub == "label") && o.legends.size() > 1) {
        throw ConfigError("--legend", "the adaptive engine takes a single legend");
    }
    try {
        a.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("adaptive", ex.what());
    }
    if (c.repetitions < 1) throw ConfigError("adaptive.repetitions", "must be >= 1");
    if (sub == "scalogram" && e.scalogram_sides.empty()) e.scalogram_sides = {30, 60, 90, 180, 360};
    return c;
}

CategoricalRaster load(const RunConfig& c) {
    try {
        return load_raster(c.raster);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("raster", ex.what());
    }
}

void validate_experiment(const RunConfig& c, const CategoricalRaster& raster) {
    try {
        c.experiment.validate(raster);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("experiment", ex.what());
    }
}

void check_adaptive(const RunConfig& c, const CategoricalRaster& raster) {
    try {
        c.adaptive.legend.check_classes(raster.class_count());
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("adaptive.legend", ex.what());
    }
    if (c.experiment.unit_side < 2 || c.experiment.unit_side > std::min(raster.width(), raster.height())) {
        throw ConfigError("unit_side", "must lie in [2, raster extent]");
    }
}

void write_resolved(const RunConfig& c) {
    write_file_atomic(std::filesystem::path(c.output_dir) / "resolved_config.json", to_json(c).dump(2) + "\n");
}

int cmd_generate(const RunConfig& c, const Options& o, std::ostream& out) {
    if (c.raster.kind == RasterSource::Kind::File) throw ConfigError("raster", "generate needs a generator source");
    const std::string path = o.out.empty() ? "raster.asc" : o.out;
    const CategoricalRaster r = load(c);
    write_file_atomic(path, save_ascii_grid(r));
    out << "wrote " << path << " (" << r.width() << "x" << r.height() << ", " << r.class_count() << " classes)\n";
    return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    const CategoricalRaster r = load(c);
    validate_experiment(c, r);
    const ErrorReport report = run_experiment(r, c.experiment);
    for (const auto& p : write_report(report, c.output_dir)) out << "wrote " << p.string() << "\n";
    write_resolved(c);
    return 0;
}

int cmd_optimize(const RunConfig& c, std::ostream& out) {
    const CategoricalRaster r = load(c);
    check_adaptive(c, r);
    OptimizationSpec spec{c.adaptive, c.experiment.unit_side, c.repetitions, c.seed, c.experiment.bin_step};
    const OptimizationReport rep = optimization_experiment(r, spec);
    const auto path = write_optimization_report(rep, c.output_dir);
    write_resolved(c);
    out << "legend " << rep.legend << "  alpha " << format_number(rep.alpha) << "  units " << rep.rows.size()
        << "  repetitions " << rep.repetitions << "\n"
        << "mean points " << format_number(rep.mean_n) << "  error rate " << format_number(rep.error_rate)
        << "  cap hit " << format_number(rep.cap_hit_fraction) << "  confident error rate "
        << format_number(rep.confident_error_rate()) << "\n"
        << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_scalogram(const RunConfig& c, std::ostream& out) {
    const CategoricalRaster r = load(c);
    for (int s : c.experiment.scalogram_sides) {
        if (s < 1 || s > std::min(r.width(), r.height())) {
            throw ConfigError("scalogram_sides", "side " + std::to_string(s) + " outside the raster");
        }
    }
    const auto rows = purity_scalogram(r, c.experiment.scalogram_sides);
    std::filesystem::create_directories(c.output_dir);
    const auto path = std::filesystem::path(c.output_dir) / "scalogram.csv";
    const std::string csv = scalogram_csv(rows);
    write_file_atomic(path, csv);
    out << csv << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_label(const RunConfig& c, const Options& o, std::ostream& out) {
    const CategoricalRaster r = load(c);
    check_adaptive(c, r);
    const auto units = extract_units(r, c.experiment.unit_side);
    const int per_row = r.width() / c.experiment.unit_side;
    const int rows = r.height() / c.experiment.unit_side;
    if (o.unit_row < 0 || o.unit_row >= rows || o.unit_col < 0 || o.unit_col >= per_row) {
        throw ConfigError("--unit-row/--unit-col", "unit outside the " + std::to_string(rows) + "x" +
                                                       std::to_string(per_row) + " unit grid");
    }
    const auto& unit = units[static_cast<std::size_t>(o.unit_row * per_row + o.unit_col)];
    const std::uint64_t seed = derive_seed(c.seed, {static_cast<std::uint64_t>(o.unit_row * per_row + o.unit_col), 0});
    const AdaptiveResult res = adaptive_label(unit, c.adaptive, seed);
    const Label truth = decide(true_proportions(unit), c.adaptive.legend);
    out << "n\ttallies\tstatus\tintervals\n";
    for (const auto& t : res.trace) {
        out << t.n << "\t";
        for (std::size_t i = 0; i < t.tallies.size(); ++i) out << (i ? "," : "") << t.tallies[i];
        out << "\t" << status_name(t.decision.status) << "\t";
        for (std::size_t i = 0; i < t.decision.intervals.size(); ++i) {
            const auto& ci = t.decision.intervals[i];
            out << (i ? " " : "") << "[" << format_number(ci.lower) << "," << format_number(ci.upper) << "]";
        }
        out << "\n";
    }
    out << "label " << res.label.value << (res.label.tie ? " (tie)" : "") << "  true " << truth.value << "  n_used "
        << res.n_used << "  status " << status_name(res.status) << "\n";
    return 0;
}

SessionServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out) {
    if (o.port < 0 || o.port > 65535) throw ConfigError("--port", "must lie in [0, 65535]");
    std::optional<std::filesystem::path> journal;
    if (!o.journal.empty()) journal = o.journal;
    SessionManager m(journal);
    if (journal) {
        std::ifstream in(*journal);
        m.replay(in);
    }
    SessionServer server(m);
    const int port = server.bind(o.host, o.port);
    out << "serving on http://" << o.host << ":" << port << " (" << m.size() << " sessions restored)" << std::endl;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    g_server = nullptr;
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Sub-sampling response design laboratory", "sublab"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto seed_opt = [&](CLI::App* a) {
        a->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        a->add_option("--seed", o.seed, "master seed (default: config, then SUBSAMPLE_LAB_SEED, then 0)");
        a->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        a->add_flag("--print-config", o.print_config, "print the resolved configuration and exit");
    };
    auto raster_opt = [&](CLI::App* a) {
        a->add_option("--input", o.input, "ESRI ASCII grid to use instead of the configured raster");
        a->add_option("--unit-side", o.unit_side, "sampling unit side in cells");
    };
    auto adaptive_opt = [&](CLI::App* a) {
        a->add_option("--alpha", o.alpha, "significance level");
        a->add_option("--n-init", o.n_init, "initial points");
        a->add_option("--n-max", o.n_max, "point cap");
        a->add_option("--legend", o.legends, "legend, e.g. binary:1@0.5 or majority");
    };

    auto* gen = app.add_subcommand("generate", "write a synthetic raster as an ASCII grid");
    seed_opt(gen);
    gen->add_option("--out", o.out, "output grid path");
    gen->add_option("--generator", o.generator, "mosaic or smoothed");
    gen->add_option("--width", o.width, "columns");
    gen->add_option("--height", o.height, "rows");

    auto* sim = app.add_subcommand("simulate", "point and partition experiments");
    seed_opt(sim);
    raster_opt(sim);
    sim->add_option("--out", o.out, "output directory");
    sim->add_option("--design", o.design, "points, partition or all");
    sim->add_option("--n", o.n, "point counts")->delimiter(',');
    sim->add_option("--k", o.k, "cells per side")->delimiter(',');
    sim->add_option("--protocol", o.protocols, "TTM, MTT, majority2")->delimiter(',');
    sim->add_option("--legend", o.legends, "legends, e.g. binary:1@0.5,majority")->delimiter(',');
    sim->add_option("--realizations", o.realizations, "repetitions per unit for point designs");

    auto* opt = app.add_subcommand("optimize", "adaptive sub-sampling experiment");
    seed_opt(opt);
    raster_opt(opt);
    adaptive_opt(opt);
    opt->add_option("--out", o.out, "output directory");
    opt->add_option("--repetitions", o.repetitions, "runs per unit");

    auto* sca = app.add_subcommand("scalogram", "purity against unit size");
    seed_opt(sca);
    sca->add_option("--input", o.input, "ESRI ASCII grid");
    sca->add_option("--sides", o.sides, "unit sides")->delimiter(',');
    sca->add_option("--out", o.out, "output directory");

    auto* lab = app.add_subcommand("label", "adaptive labeling of one unit, printing the trace");
    seed_opt(lab);
    raster_opt(lab);
    adaptive_opt(lab);
    lab->add_option("--unit-row", o.unit_row, "unit row in the unit grid");
    lab->add_option("--unit-col", o.unit_col, "unit column in the unit grid");

    auto* srv = app.add_subcommand("serve", "labeling session service over HTTP");
    srv->add_option("--host", o.host, "bind address");
    srv->add_option("--port", o.port, "port (0 picks a free one)");
    srv->add_option("--journal", o.journal, "append-only session journal, replayed on start");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        if (sub == "serve") return cmd_serve(o, out);
        const RunConfig c = resolve(o, sub);
        if (o.print_config) {
            out << to_json(c).dump(2) << "\n";
            return 0;
        }
        set_thread_count(c.threads);
        if (sub == "generate") return cmd_generate(c, o, out);
        if (sub == "simulate") return cmd_simulate(c, out);
        if (sub == "optimize") return cmd_optimize(c, out);
        if (sub == "scalogram") return cmd_scalogram(c, out);
        if (sub == "label") return cmd_label(c, o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("sublab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sublab::cli
