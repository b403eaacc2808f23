// growthfit: fit piecewise hyperbolic growth models to historical time
// series, locate regime transitions and divergences, and rank regime
// hypotheses. Results go to stdout or files; diagnostics go to stderr.
// Exit status: 0 success, 1 usage/parse/validation error, 2 infeasible
// analysis.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "growthfit/growthfit.hpp"

namespace gf = growthfit;
namespace fs = std::filesystem;

namespace {

struct InputOptions {
    std::string path;
    std::string format = "canonical";  // or maddison:<row_label>
    std::string delimiter = "comma";
    std::string name;  // overrides the series name
    std::string unit;
};

struct ThresholdOptions {
    gf::AnalysisConfig config;
    std::string config_file;
    // option handles, so config-file values never override explicit flags
    CLI::Option* min_points = nullptr;
    CLI::Option* t_critical = nullptr;
    CLI::Option* run_length = nullptr;
    CLI::Option* exceedance = nullptr;
    CLI::Option* break_threshold = nullptr;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "input data file")->required();
    cmd->add_option("--format", in.format,
                    "input format: canonical | maddison:<row_label> (default canonical)");
    cmd->add_option("--delimiter", in.delimiter, "maddison table delimiter: comma | tab")
        ->check(CLI::IsMember({"comma", "tab"}));
    cmd->add_option("--name", in.name, "series name override");
    cmd->add_option("--unit", in.unit, "unit label for reports and plots");
}

void add_threshold_options(CLI::App* cmd, ThresholdOptions& t) {
    t.min_points = cmd->add_option("--min-points", t.config.min_points,
                                   "minimum observations per fitted span (default 3)");
    t.t_critical = cmd->add_option("--t-critical", t.config.t_critical,
                                   "stagnation test critical value (default 2.0)");
    t.run_length = cmd->add_option("--run-length", t.config.run_length,
                                   "consecutive exceedances for a divergence onset (default 3)");
    t.exceedance = cmd->add_option("--exceedance-factor", t.config.exceedance_factor,
                                   "divergence threshold as a multiple of baseline RMSE (default 2.0)");
    t.break_threshold = cmd->add_option("--break-threshold", t.config.break_support_threshold,
                                        "relative SSE improvement below which a searched break is "
                                        "flagged unsupported (default 1e-3)");
    cmd->add_option("--config", t.config_file, "JSON file with threshold defaults");
}

gf::json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw gf::ValidationError(std::string("cannot open ") + what + " " + path);
    try {
        gf::json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw gf::ParseError(std::string(what) + " " + path + ": " + e.what());
    }
}

void apply_config_file(ThresholdOptions& t) {
    if (t.config_file.empty()) return;
    const gf::json j = load_json_file(t.config_file, "config file");
    if (j.contains("min_points") && t.min_points->count() == 0) t.config.min_points = j["min_points"];
    if (j.contains("t_critical") && t.t_critical->count() == 0) t.config.t_critical = j["t_critical"];
    if (j.contains("run_length") && t.run_length->count() == 0) t.config.run_length = j["run_length"];
    if (j.contains("exceedance_factor") && t.exceedance->count() == 0)
        t.config.exceedance_factor = j["exceedance_factor"];
    if (j.contains("break_support_threshold") && t.break_threshold->count() == 0)
        t.config.break_support_threshold = j["break_support_threshold"];
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gf::ValidationError("cannot open input file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

gf::TimeSeries load_series(const InputOptions& in) {
    const std::string text = read_file(in.path);
    gf::TimeSeries series;
    if (in.format == "canonical") {
        std::string name = in.name.empty() ? fs::path(in.path).stem().string() : in.name;
        series = gf::parse_series_csv(text, name, in.unit);
    } else if (in.format.rfind("maddison:", 0) == 0) {
        const std::string label = in.format.substr(9);
        if (label.empty()) throw gf::ValidationError("--format maddison:<row_label> needs a label");
        const char delim = in.delimiter == "tab" ? '\t' : ',';
        series = gf::parse_maddison_horizontal(text, label, delim, in.unit);
        if (!in.name.empty()) {
            series = gf::TimeSeries(in.name, series.unit(), series.observations());
        }
    } else {
        throw gf::ValidationError("unknown input format \"" + in.format +
                                  "\" (expected canonical or maddison:<row_label>)");
    }
    return series;
}

gf::YearRange parse_window(const std::string& text) {
    const std::size_t colon = text.find(':');
    gf::YearRange r;
    if (colon == std::string::npos ||
        !gf::detail::parse_int(std::string_view(text).substr(0, colon), r.start) ||
        !gf::detail::parse_int(std::string_view(text).substr(colon + 1), r.end)) {
        throw gf::ValidationError("window \"" + text + "\" is not START:END with integer years");
    }
    return gf::validated(r);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw gf::ValidationError("cannot write output file " + out_path);
    out << text;
}

void emit_json(const std::string& out_path, const gf::json& doc) {
    emit(out_path, doc.dump(2) + "\n");
}

gf::json config_echo(const gf::AnalysisConfig& config) { return gf::to_json(config); }

std::vector<gf::RegimeHypothesis> resolve_hypotheses(const std::string& names_csv,
                                                     const std::string& file) {
    std::vector<gf::RegimeHypothesis> out;
    if (!names_csv.empty()) {
        std::stringstream ss(names_csv);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (name.empty()) continue;
            auto h = gf::built_in_hypothesis(name);
            if (!h) throw gf::LookupError("unknown built-in hypothesis \"" + name +
                                          "\" (available: galor-ldc, nielsen-africa)");
            out.push_back(std::move(*h));
        }
    }
    if (!file.empty()) {
        gf::json j = load_json_file(file, "hypotheses file");
        if (!j.is_array()) j = gf::json::array({j});
        for (const auto& item : j) {
            gf::RegimeHypothesis h;
            h.name = item.at("name").get<std::string>();
            for (const auto& b : item.at("boundaries")) h.boundaries.push_back(b.get<double>());
            for (const auto& k : item.at("segment_kinds")) {
                auto kind = gf::segment_kind_from_string(k.get<std::string>());
                if (!kind) throw gf::ValidationError("hypothesis \"" + h.name +
                                                     "\": unknown segment kind \"" +
                                                     k.get<std::string>() + "\"");
                h.segment_kinds.push_back(*kind);
            }
            out.push_back(std::move(h));
        }
    }
    if (out.empty()) throw gf::ValidationError("no hypotheses given");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise hyperbolic growth analysis"};
    app.require_subcommand(1);

    // ---- fit ----
    InputOptions fit_in;
    ThresholdOptions fit_thr;
    std::string fit_window_s, fit_out;
    auto* cmd_fit = app.add_subcommand("fit", "single-segment hyperbolic fit on a window");
    add_input_options(cmd_fit, fit_in);
    add_threshold_options(cmd_fit, fit_thr);
    cmd_fit->add_option("--window", fit_window_s, "inclusive year window START:END");
    cmd_fit->add_option("--out", fit_out, "output file (default stdout)");

    // ---- breaks ----
    InputOptions br_in;
    ThresholdOptions br_thr;
    std::string br_window_s, br_out;
    int br_n_breaks = 1;
    auto* cmd_breaks = app.add_subcommand("breaks", "exhaustive breakpoint search");
    add_input_options(cmd_breaks, br_in);
    add_threshold_options(cmd_breaks, br_thr);
    cmd_breaks->add_option("--window", br_window_s, "inclusive year window START:END");
    cmd_breaks->add_option("--n-breaks", br_n_breaks, "number of breakpoints, 1 or 2 (default 1)");
    cmd_breaks->add_option("--out", br_out, "output file (default stdout)");

    // ---- stagnation ----
    InputOptions st_in;
    ThresholdOptions st_thr;
    std::string st_window_s, st_out;
    auto* cmd_stag = app.add_subcommand("stagnation", "test a window against the constant-reciprocal null");
    add_input_options(cmd_stag, st_in);
    add_threshold_options(cmd_stag, st_thr);
    cmd_stag->add_option("--window", st_window_s, "inclusive year window START:END");
    cmd_stag->add_option("--out", st_out, "output file (default stdout)");

    // ---- diverge ----
    InputOptions dv_in;
    ThresholdOptions dv_thr;
    std::string dv_baseline_s, dv_out;
    int dv_from = 0;
    auto* cmd_div = app.add_subcommand("diverge", "detect sustained divergence from a baseline hyperbola");
    add_input_options(cmd_div, dv_in);
    add_threshold_options(cmd_div, dv_thr);
    cmd_div->add_option("--baseline", dv_baseline_s, "baseline fit window START:END")->required();
    auto* dv_from_opt = cmd_div->add_option("--from", dv_from, "first year scanned for divergence");
    cmd_div->add_option("--out", dv_out, "output file (default stdout)");

    // ---- compare ----
    InputOptions cp_in;
    ThresholdOptions cp_thr;
    std::string cp_names = "galor-ldc,nielsen-africa", cp_file, cp_out;
    auto* cmd_cmp = app.add_subcommand("compare", "rank regime hypotheses by AIC");
    add_input_options(cmd_cmp, cp_in);
    add_threshold_options(cmd_cmp, cp_thr);
    cmd_cmp->add_option("--hypotheses", cp_names,
                        "comma-separated built-in names (default galor-ldc,nielsen-africa)");
    cmd_cmp->add_option("--hypotheses-file", cp_file, "JSON file with custom hypotheses");
    cmd_cmp->add_option("--out", cp_out, "output file (default stdout)");

    // ---- plot ----
    InputOptions pl_in;
    std::string pl_space = "reciprocal", pl_window_s, pl_out, pl_title;
    std::vector<std::string> pl_fit_windows, pl_annotations;
    bool pl_log = false;
    auto* cmd_plot = app.add_subcommand("plot", "emit an SVG figure");
    add_input_options(cmd_plot, pl_in);
    cmd_plot->add_option("--space", pl_space, "reciprocal | direct (default reciprocal)")
        ->check(CLI::IsMember({"reciprocal", "direct"}));
    cmd_plot->add_option("--window", pl_window_s, "plotted year window START:END");
    cmd_plot->add_option("--fit-window", pl_fit_windows,
                         "fit a hyperbola on START:END and overlay it (repeatable)");
    cmd_plot->add_option("--annotate", pl_annotations, "vertical marker YEAR:LABEL (repeatable)");
    cmd_plot->add_flag("--log-value", pl_log, "log-scale the value axis (direct space)");
    cmd_plot->add_option("--title", pl_title, "plot title");
    cmd_plot->add_option("--out", pl_out, "output file (default stdout)");

    // ---- report ----
    InputOptions rp_in;
    ThresholdOptions rp_thr;
    std::string rp_out_dir = ".", rp_breaks_s = "1:1913", rp_stag_s, rp_baseline_s = "1820:1950";
    std::string rp_names = "galor-ldc,nielsen-africa", rp_file;
    int rp_from = 1920, rp_n_breaks = 1, rp_zoom_start = 1500;
    auto* cmd_rep = app.add_subcommand(
        "report", "full pipeline: fit + breaks + stagnation + diverge + compare + all figures");
    add_input_options(cmd_rep, rp_in);
    add_threshold_options(cmd_rep, rp_thr);
    cmd_rep->add_option("--out-dir", rp_out_dir, "output directory (default .)");
    auto* rp_breaks_opt =
        cmd_rep->add_option("--breaks-window", rp_breaks_s, "breakpoint search window (default 1:1913)");
    auto* rp_nb_opt = cmd_rep->add_option("--n-breaks", rp_n_breaks, "breakpoints searched (default 1)");
    auto* rp_stag_opt =
        cmd_rep->add_option("--stagnation-window", rp_stag_s,
                            "stagnation test window (default: data start to the found breakpoint)");
    auto* rp_base_opt =
        cmd_rep->add_option("--baseline", rp_baseline_s, "divergence baseline window (default 1820:1950)");
    auto* rp_from_opt = cmd_rep->add_option("--from", rp_from, "divergence search start (default 1920)");
    auto* rp_names_opt =
        cmd_rep->add_option("--hypotheses", rp_names, "hypotheses to rank (default both built-ins)");
    cmd_rep->add_option("--hypotheses-file", rp_file, "JSON file with custom hypotheses");
    cmd_rep->add_option("--zoom-start", rp_zoom_start, "start year of the zoomed figures (default 1500)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_fit->parsed()) {
            apply_config_file(fit_thr);
            gf::TimeSeries series = load_series(fit_in);
            gf::YearRange w = fit_window_s.empty() ? series.year_span() : parse_window(fit_window_s);
            gf::HyperbolicFit fit = gf::fit_window(series, w);
            gf::json config = config_echo(fit_thr.config);
            config["window"] = gf::to_json(w);
            config["input"] = fit_in.path;
            emit_json(fit_out, gf::json{{"config", config}, {"fit", gf::fit_record(fit.line)}});
        } else if (cmd_breaks->parsed()) {
            apply_config_file(br_thr);
            gf::TimeSeries series = load_series(br_in);
            gf::YearRange w = br_window_s.empty() ? series.year_span() : parse_window(br_window_s);
            gf::BreakpointSearch found =
                gf::search_breakpoints(gf::window(series, w), br_n_breaks, br_thr.config.min_points,
                                       br_thr.config.break_support_threshold);
            gf::json config = config_echo(br_thr.config);
            config["window"] = gf::to_json(w);
            config["n_breaks"] = br_n_breaks;
            config["input"] = br_in.path;
            emit_json(br_out, gf::json{{"config", config}, {"breakpoints", gf::to_json(found)}});
        } else if (cmd_stag->parsed()) {
            apply_config_file(st_thr);
            gf::TimeSeries series = load_series(st_in);
            gf::YearRange w = st_window_s.empty() ? series.year_span() : parse_window(st_window_s);
            gf::StagnationVerdict v = gf::test_stagnation(series, w, st_thr.config.t_critical);
            gf::json config = config_echo(st_thr.config);
            config["window"] = gf::to_json(w);
            config["input"] = st_in.path;
            emit_json(st_out, gf::json{{"config", config}, {"stagnation", gf::to_json(v)}});
        } else if (cmd_div->parsed()) {
            apply_config_file(dv_thr);
            gf::TimeSeries series = load_series(dv_in);
            gf::YearRange baseline = parse_window(dv_baseline_s);
            if (dv_from_opt->count() == 0) dv_from = baseline.start;
            gf::DivergenceReport rep =
                gf::detect_divergence(series, baseline, dv_from, dv_thr.config.run_length,
                                      dv_thr.config.exceedance_factor);
            gf::json config = config_echo(dv_thr.config);
            config["baseline_range"] = gf::to_json(baseline);
            config["search_from"] = dv_from;
            config["input"] = dv_in.path;
            emit_json(dv_out, gf::json{{"config", config}, {"divergence", gf::to_json(rep)}});
        } else if (cmd_cmp->parsed()) {
            apply_config_file(cp_thr);
            gf::TimeSeries series = load_series(cp_in);
            std::vector<gf::RegimeHypothesis> hyps = resolve_hypotheses(cp_names, cp_file);
            std::vector<gf::HypothesisFit> ranked =
                gf::compare_hypotheses(series, hyps, cp_thr.config.min_points);
            gf::json config = config_echo(cp_thr.config);
            gf::json names = gf::json::array();
            for (const auto& h : hyps) names.push_back(h.name);
            config["hypotheses"] = names;
            config["input"] = cp_in.path;
            gf::json out = gf::json::array();
            for (const auto& h : ranked) out.push_back(gf::to_json(h));
            emit_json(cp_out, gf::json{{"config", config}, {"hypotheses", out}});
        } else if (cmd_plot->parsed()) {
            gf::TimeSeries series = load_series(pl_in);
            gf::PlotSpec spec;
            spec.space = pl_space == "direct" ? gf::PlotSpace::direct : gf::PlotSpace::reciprocal;
            spec.series = series;
            spec.year_range = pl_window_s.empty() ? series.year_span() : parse_window(pl_window_s);
            spec.log_value = pl_log;
            spec.title = pl_title.empty() ? series.name() + " (" + pl_space + " space)" : pl_title;
            for (const std::string& fw : pl_fit_windows) {
                spec.overlays.push_back(gf::fit_window(series, parse_window(fw)));
            }
            for (const std::string& an : pl_annotations) {
                const std::size_t colon = an.find(':');
                gf::Annotation a;
                int year = 0;
                if (colon == std::string::npos ||
                    !gf::detail::parse_int(std::string_view(an).substr(0, colon), year)) {
                    throw gf::ValidationError("annotation \"" + an + "\" is not YEAR:LABEL");
                }
                a.year = year;
                a.label = an.substr(colon + 1);
                spec.annotations.push_back(std::move(a));
            }
            emit(pl_out, gf::render_plot(spec));
        } else if (cmd_rep->parsed()) {
            apply_config_file(rp_thr);
            // the config file shares the report's config-echo vocabulary:
            // run-description keys apply wherever the flag was not given
            if (!rp_thr.config_file.empty()) {
                const gf::json j = load_json_file(rp_thr.config_file, "config file");
                auto window_string = [](const gf::json& w) {
                    return std::to_string(w.at("start").get<int>()) + ":" +
                           std::to_string(w.at("end").get<int>());
                };
                if (j.contains("breaks_window") && rp_breaks_opt->count() == 0)
                    rp_breaks_s = window_string(j["breaks_window"]);
                if (j.contains("n_breaks") && rp_nb_opt->count() == 0) rp_n_breaks = j["n_breaks"];
                if (j.contains("stagnation_window") && rp_stag_opt->count() == 0)
                    rp_stag_s = window_string(j["stagnation_window"]);
                if (j.contains("baseline_range") && rp_base_opt->count() == 0)
                    rp_baseline_s = window_string(j["baseline_range"]);
                if (j.contains("search_from") && rp_from_opt->count() == 0)
                    rp_from = j["search_from"];
                if (j.contains("hypotheses") && rp_names_opt->count() == 0) {
                    std::string names;
                    for (const auto& n : j["hypotheses"]) {
                        if (!names.empty()) names += ",";
                        names += n.get<std::string>();
                    }
                    rp_names = names;
                }
            }
            gf::TimeSeries series = load_series(rp_in);
            const gf::AnalysisConfig& cfg = rp_thr.config;

            gf::AnalysisReport rep;
            rep.input_file = rp_in.path;
            rep.series_name = series.name();
            rep.unit = series.unit();
            rep.n_observations = static_cast<int>(series.size());
            rep.years = series.year_span();
            rep.config = cfg;
            rep.n_breaks = rp_n_breaks;
            rep.breaks_window = parse_window(rp_breaks_s);
            rep.baseline_range = parse_window(rp_baseline_s);
            rep.search_from = rp_from;

            rep.full_fit = gf::fit_series(series);
            rep.breaks = gf::search_breakpoints(gf::window(series, rep.breaks_window), rp_n_breaks,
                                                cfg.min_points, cfg.break_support_threshold);
            rep.stagnation_window =
                rp_stag_s.empty()
                    ? gf::YearRange{rep.years.start,
                                    static_cast<int>(rep.breaks.model.breakpoints.front())}
                    : parse_window(rp_stag_s);
            rep.stagnation = gf::test_stagnation(series, rep.stagnation_window, cfg.t_critical);
            rep.divergence = gf::detect_divergence(series, rep.baseline_range, rep.search_from,
                                                   cfg.run_length, cfg.exceedance_factor);
            std::vector<gf::RegimeHypothesis> hyps = resolve_hypotheses(rp_names, rp_file);
            for (const auto& h : hyps) rep.hypothesis_names.push_back(h.name);
            rep.hypotheses = gf::compare_hypotheses(series, hyps, cfg.min_points);

            fs::create_directories(rp_out_dir);
            auto out_path = [&](const std::string& f) { return (fs::path(rp_out_dir) / f).string(); };
            emit(out_path("report.json"), gf::write_report(rep, gf::ReportFormat::structured));
            emit(out_path("report.txt"), gf::write_report(rep, gf::ReportFormat::human));

            std::vector<gf::Annotation> annotations;
            for (double b : rep.breaks.model.breakpoints) {
                annotations.push_back({b, "break " + gf::fmt_sig(b)});
            }
            if (rep.divergence.onset_year) {
                annotations.push_back({static_cast<double>(*rep.divergence.onset_year),
                                       "diversion " + std::to_string(*rep.divergence.onset_year)});
            }
            const gf::YearRange full = rep.years;
            const gf::YearRange zoom{rp_zoom_start, full.end};
            struct FigureDef {
                const char* file;
                gf::PlotSpace space;
                gf::YearRange range;
            } figures[] = {
                {"fig_reciprocal_full.svg", gf::PlotSpace::reciprocal, full},
                {"fig_reciprocal_zoom.svg", gf::PlotSpace::reciprocal, zoom},
                {"fig_direct_full.svg", gf::PlotSpace::direct, full},
                {"fig_direct_zoom.svg", gf::PlotSpace::direct, zoom},
            };
            for (const FigureDef& fd : figures) {
                gf::PlotSpec spec;
                spec.space = fd.space;
                spec.series = series;
                spec.year_range = fd.range;
                spec.overlays = rep.breaks.model.segments;
                spec.annotations = annotations;
                spec.title = series.name() + ", " +
                             (fd.space == gf::PlotSpace::reciprocal ? "reciprocal values"
                                                                    : "observed values") +
                             ", " + std::to_string(fd.range.start) + "-" + std::to_string(fd.range.end);
                emit(out_path(fd.file), gf::render_plot(spec));
            }
            std::cerr << "wrote report.json, report.txt and 4 figures to " << rp_out_dir << "\n";
        }
    } catch (const gf::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gf::SingularityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
