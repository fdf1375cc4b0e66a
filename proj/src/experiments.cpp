// experiments.cpp — Config parsing and the per-subcommand figure-data runners

#include "fpt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "fpt/floquet.hpp"
#include "fpt/io.hpp"
#include "fpt/observables.hpp"
#include "fpt/perturbation.hpp"
#include "fpt/svg.hpp"
#include "fpt/sweep.hpp"
#include "fpt/symmetry.hpp"

namespace fpt {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

// One JSON entry is a real number or an [re, im] pair.
cplx parse_entry(const json& j, std::vector<std::string>& problems, const std::string& where) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    problems.push_back(where + ": matrix entries must be numbers or [re, im] pairs");
    return cplx(0.0, 0.0);
}

Matrix parse_matrix(const json& j, std::vector<std::string>& problems, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        problems.push_back(where + ": expected an array of rows");
        return Matrix::Zero(1, 1);
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m = Matrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
            problems.push_back(where + ": ragged rows");
            return m;
        }
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = parse_entry(j[r][c], problems, where);
    }
    return m;
}

std::vector<Matrix> parse_matrix_list(const json& j, std::vector<std::string>& problems,
                                      const std::string& where) {
    std::vector<Matrix> out;
    if (!j.is_array()) {
        problems.push_back(where + ": expected an array of matrices");
        return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_matrix(j[i], problems, where + "[" + std::to_string(i) + "]"));
    return out;
}

MultiBandSpec parse_ansatz(const json& j, std::vector<std::string>& problems) {
    MultiBandSpec a;
    if (!j.is_object()) {
        problems.push_back("ansatz: expected an object");
        return a;
    }
    static const std::set<std::string> keys = {"range_w", "a1", "a2", "x1", "x2", "y1", "y2"};
    for (const auto& item : j.items())
        if (!keys.count(item.key()))
            problems.push_back("ansatz: unknown key '" + item.key() + "'");
    for (const auto& k : keys)
        if (!j.contains(k)) problems.push_back("ansatz: missing key '" + k + "'");
    if (!problems.empty()) return a;

    if (j["range_w"].is_number_integer() && j["range_w"].get<int>() >= 1)
        a.range_w = j["range_w"].get<int>();
    else
        problems.push_back("ansatz.range_w: expected an integer >= 1");
    a.a1 = parse_matrix(j["a1"], problems, "ansatz.a1");
    a.a2 = parse_matrix(j["a2"], problems, "ansatz.a2");
    a.x1 = parse_matrix_list(j["x1"], problems, "ansatz.x1");
    a.x2 = parse_matrix_list(j["x2"], problems, "ansatz.x2");
    a.y1 = parse_matrix_list(j["y1"], problems, "ansatz.y1");
    a.y2 = parse_matrix_list(j["y2"], problems, "ansatz.y2");
    if (problems.empty()) {
        try {
            a.validate();
        } catch (const std::invalid_argument& e) {
            problems.push_back(std::string("ansatz: ") + e.what());
        }
    }
    return a;
}

double take_number(const json& doc, const char* key, double fallback,
                   std::vector<std::string>& problems) {
    if (!doc.contains(key)) return fallback;
    if (!doc[key].is_number() || !std::isfinite(doc[key].get<double>())) {
        problems.push_back(std::string(key) + ": expected a finite number");
        return fallback;
    }
    return doc[key].get<double>();
}

int take_int(const json& doc, const char* key, int fallback, int minimum,
             std::vector<std::string>& problems) {
    if (!doc.contains(key)) return fallback;
    if (!doc[key].is_number_integer() || doc[key].get<int>() < minimum) {
        problems.push_back(std::string(key) + ": expected an integer >= " +
                           std::to_string(minimum));
        return fallback;
    }
    return doc[key].get<int>();
}

std::vector<int> take_int_list(const json& doc, const char* key, int minimum,
                               std::vector<std::string>& problems) {
    std::vector<int> out;
    if (!doc.contains(key)) return out;
    if (!doc[key].is_array()) {
        problems.push_back(std::string(key) + ": expected an array of integers");
        return out;
    }
    for (const auto& v : doc[key]) {
        if (!v.is_number_integer() || v.get<int>() < minimum) {
            problems.push_back(std::string(key) + ": entries must be integers >= " +
                               std::to_string(minimum));
            return {};
        }
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::string& subcommand) {
    std::vector<std::string> problems;
    ExperimentConfig cfg;
    cfg.subcommand = subcommand;

    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

    static const std::set<std::string> common = {"model",  "sites", "eta",     "period",
                                                 "t",      "t1",    "t2",      "ansatz",
                                                 "out_dir", "workers"};
    std::set<std::string> allowed = common;
    if (subcommand == "spectrum") allowed.insert("sweep");
    else if (subcommand == "phase-diagram") { allowed.insert("sweep"); allowed.insert("sizes"); }
    else if (subcommand == "trajectory") { allowed.insert("sweep"); allowed.insert("pair"); }
    else if (subcommand == "scale-free") {
        allowed.insert("sizes"); allowed.insert("coupling"); allowed.insert("profile_sizes");
    } else if (subcommand == "perturbation") {
        allowed.insert("sizes"); allowed.insert("coupling");
        allowed.insert("cutoff"); allowed.insert("heatmap");
    } else if (subcommand == "validate-model") {
        allowed.insert("parity");
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }

    for (const auto& item : doc.items())
        if (!allowed.count(item.key()))
            problems.push_back("unknown or inapplicable key '" + item.key() + "' for " +
                               subcommand);

    if (doc.contains("model")) {
        if (doc["model"].is_string()) cfg.model = doc["model"].get<std::string>();
        else problems.push_back("model: expected a string");
    }
    if (cfg.model != "minimal" && cfg.model != "type1" && cfg.model != "type2" &&
        cfg.model != "ansatz")
        problems.push_back("model: expected minimal | type1 | type2 | ansatz, got '" +
                           cfg.model + "'");
    if (cfg.model == "ansatz") {
        if (doc.contains("ansatz")) cfg.ansatz = parse_ansatz(doc["ansatz"], problems);
        else problems.push_back("model 'ansatz' needs an 'ansatz' object");
    } else if (doc.contains("ansatz")) {
        problems.push_back("ansatz: only applicable when model is 'ansatz'");
    }

    cfg.sites = take_int(doc, "sites", cfg.sites, 2, problems);
    cfg.eta = take_number(doc, "eta", cfg.eta, problems);
    if (cfg.eta < 0.0 || cfg.eta > 1.0) problems.push_back("eta: expected a value in [0, 1]");
    cfg.period = take_number(doc, "period", cfg.period, problems);
    if (!(cfg.period > 0.0)) problems.push_back("period: expected a positive number");
    cfg.t = take_number(doc, "t", cfg.t, problems);
    cfg.t1 = take_number(doc, "t1", cfg.t1, problems);
    cfg.t2 = take_number(doc, "t2", cfg.t2, problems);
    cfg.coupling = take_number(doc, "coupling", cfg.coupling, problems);
    cfg.cutoff = take_int(doc, "cutoff", cfg.cutoff, 0, problems);
    cfg.workers = take_int(doc, "workers", cfg.workers, 1, problems);

    if (doc.contains("heatmap")) {
        if (doc["heatmap"].is_boolean()) cfg.heatmap = doc["heatmap"].get<bool>();
        else problems.push_back("heatmap: expected a boolean");
    }
    if (doc.contains("parity")) {
        if (doc["parity"].is_string()) cfg.parity = doc["parity"].get<std::string>();
        else problems.push_back("parity: expected a string");
    }
    if (cfg.parity != "reflection" && cfg.parity != "identity")
        problems.push_back("parity: expected reflection | identity");
    if (doc.contains("out_dir")) {
        if (doc["out_dir"].is_string())
            cfg.out_dir = std::filesystem::path(doc["out_dir"].get<std::string>());
        else problems.push_back("out_dir: expected a string path");
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        SweepAxis axis;
        if (!s.is_object()) {
            problems.push_back("sweep: expected an object");
        } else {
            for (const auto& item : s.items())
                if (item.key() != "parameter" && item.key() != "start" &&
                    item.key() != "stop" && item.key() != "steps")
                    problems.push_back("sweep: unknown key '" + item.key() + "'");
            if (s.contains("parameter") && s["parameter"].is_string())
                axis.parameter = s["parameter"].get<std::string>();
            else
                problems.push_back("sweep.parameter: expected a string");
            axis.start = take_number(s, "start", axis.start, problems);
            axis.stop = take_number(s, "stop", axis.stop, problems);
            axis.steps = take_int(s, "steps", axis.steps, 2, problems);
            if (!(axis.stop > axis.start))
                problems.push_back("sweep: stop must exceed start (zero-width sweeps are "
                                   "rejected)");
            cfg.sweep = axis;
        }
    }
    if (doc.contains("pair")) {
        const json& p = doc["pair"];
        if (p.is_array() && p.size() == 2 && p[0].is_number_integer() &&
            p[1].is_number_integer() && p[0].get<int>() >= 0 && p[1].get<int>() >= 0 &&
            p[0].get<int>() != p[1].get<int>())
            cfg.pair = std::make_pair(p[0].get<int>(), p[1].get<int>());
        else
            problems.push_back("pair: expected two distinct non-negative integers");
    }
    cfg.size_list = take_int_list(doc, "sizes", 2, problems);
    cfg.profile_sizes = take_int_list(doc, "profile_sizes", 2, problems);

    const bool needs_sweep = subcommand == "spectrum" || subcommand == "phase-diagram" ||
                             subcommand == "trajectory";
    if (needs_sweep && !cfg.sweep) problems.push_back(subcommand + ": missing 'sweep'");
    const bool needs_sizes = subcommand == "phase-diagram" || subcommand == "scale-free" ||
                             subcommand == "perturbation";
    if (needs_sizes && cfg.size_list.empty())
        problems.push_back(subcommand + ": missing or empty 'sizes'");

    if (!problems.empty()) {
        std::string msg = "invalid config for '" + subcommand + "':";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

DrivingProtocol protocol_for(const ExperimentConfig& cfg, double parameter, int sites,
                             double eta) {
    LatticeSpec spec{sites, eta, 1};
    if (cfg.model == "minimal")
        return build_minimal(spec, 2.0 * parameter / cfg.period, cfg.period);
    spec.band_dim = 2;
    if (cfg.model == "type1") return build_type1(spec, parameter, cfg.period);
    if (cfg.model == "type2") return build_type2(spec, parameter, cfg.t2, cfg.period);
    spec.band_dim = cfg.ansatz->band_dim();
    return build_general(spec, ansatz_for(cfg, parameter), cfg.period);
}

MultiBandSpec ansatz_for(const ExperimentConfig& cfg, double parameter) {
    if (cfg.model == "minimal") return minimal_ansatz(2.0 * parameter / cfg.period);
    if (cfg.model == "type1") return type1_ansatz(parameter);
    if (cfg.model == "type2") return type2_ansatz(parameter, cfg.t2);
    // Declarative ansatz: the sweep parameter is a global scale on both steps.
    MultiBandSpec a = *cfg.ansatz;
    a.a1 *= parameter; a.a2 *= parameter;
    for (auto& m : a.x1) m *= parameter;
    for (auto& m : a.x2) m *= parameter;
    for (auto& m : a.y1) m *= parameter;
    for (auto& m : a.y2) m *= parameter;
    return a;
}

namespace {

std::vector<double> axis_grid(const SweepAxis& axis) {
    std::vector<double> g(static_cast<std::size_t>(axis.steps));
    const double d = (axis.stop - axis.start) / (axis.steps - 1);
    for (int i = 0; i < axis.steps; ++i) g[static_cast<std::size_t>(i)] = axis.start + d * i;
    return g;
}

int band_dim_for(const ExperimentConfig& cfg) {
    if (cfg.model == "minimal") return 1;
    if (cfg.model == "ansatz") return cfg.ansatz->band_dim();
    return 2;
}

ProtocolFamily family_for(const ExperimentConfig& cfg, int sites) {
    return [cfg, sites](double p) { return protocol_for(cfg, p, sites, cfg.eta); };
}

std::string svg_color(int i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    return palette[i % 4];
}

double log10_clamped(double v) {
    return std::log10(std::max(v, 1e-300));
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Predicted critical sweep parameter from the bandwidth criterion, located by
// bisecting the folding condition over the sweep range. Empty when the
// criterion does not change across the range.
std::optional<double> predicted_threshold(const ExperimentConfig& cfg, const SweepAxis& axis) {
    BandwidthRule rule =
        (cfg.model == "minimal" || cfg.model == "type1") ? BandwidthRule::single_band
                                                         : BandwidthRule::total;
    auto critical = [&](double p) {
        return bandwidth_criterion(ansatz_for(cfg, p), cfg.period, rule).predicted_critical;
    };
    double lo = axis.start, hi = axis.stop;
    if (critical(lo) || !critical(hi)) return std::nullopt;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (critical(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<std::filesystem::path> run_spectrum_sweep(const ExperimentConfig& cfg) {
    const auto grid = axis_grid(*cfg.sweep);
    const auto family = family_for(cfg, cfg.sites);
    auto records = map_indexed<SpectrumRecord>(
        grid.size(), cfg.workers,
        [&](std::size_t i) { return spectrum_at(family, grid[i]); });

    const auto spectrum_path = cfg.out_dir / "spectrum.csv";
    CsvWriter spectrum(spectrum_path, {"param", "index", "re_E", "im_E"});
    const auto pcom_path = cfg.out_dir / "p_com.csv";
    CsvWriter pcom(pcom_path, {"param", "p_com"});

    SvgPlot re_plot("Quasienergy spectrum", cfg.sweep->parameter, "Re E");
    SvgPlot im_plot("Quasienergy imaginary parts", cfg.sweep->parameter, "Im E");
    SvgPlot pc_plot("Complex fraction", cfg.sweep->parameter, "p_com");
    std::vector<double> xs_re, ys_re, xs_im, ys_im, xs_p, ys_p;
    for (const auto& rec : records) {
        for (Eigen::Index n = 0; n < rec.quasienergies.size(); ++n) {
            const cplx e = rec.quasienergies[n];
            spectrum.row({rec.parameter, static_cast<long long>(n), e.real(), e.imag()});
            xs_re.push_back(rec.parameter); ys_re.push_back(e.real());
            xs_im.push_back(rec.parameter); ys_im.push_back(e.imag());
        }
        pcom.row({rec.parameter, rec.p_com});
        xs_p.push_back(rec.parameter); ys_p.push_back(rec.p_com);
    }
    spectrum.close();
    pcom.close();

    const double zone = M_PI / cfg.period;
    re_plot.hline(zone, "#bbbbbb"); re_plot.hline(-zone, "#bbbbbb");
    re_plot.scatter(xs_re, ys_re, svg_color(0), 1.2);
    im_plot.scatter(xs_im, ys_im, svg_color(1), 1.2);
    pc_plot.polyline(xs_p, ys_p, svg_color(2));
    if (auto pc = predicted_threshold(cfg, *cfg.sweep)) {
        re_plot.vline(*pc, "#888888");
        im_plot.vline(*pc, "#888888");
        pc_plot.vline(*pc, "#888888");
    }
    const auto re_path = cfg.out_dir / "spectrum_re.svg";
    const auto im_path = cfg.out_dir / "spectrum_im.svg";
    const auto pc_path = cfg.out_dir / "p_com.svg";
    re_plot.save(re_path);
    im_plot.save(im_path);
    pc_plot.save(pc_path);
    return {spectrum_path, pcom_path, re_path, im_path, pc_path};
}

std::vector<std::filesystem::path> run_phase_diagram(const ExperimentConfig& cfg) {
    const auto grid = axis_grid(*cfg.sweep);
    const auto& sizes = cfg.size_list;
    const std::size_t total = grid.size() * sizes.size();
    auto cells = map_indexed<SpectrumRecord>(total, cfg.workers, [&](std::size_t i) {
        const int N = sizes[i / grid.size()];
        const double p = grid[i % grid.size()];
        return spectrum_at(family_for(cfg, N), p);
    });

    const auto grid_path = cfg.out_dir / "phase_diagram.csv";
    CsvWriter out(grid_path, {"param", "sites", "p_com"});
    SvgPlot plot("Phase diagram", cfg.sweep->parameter, "sites");
    std::vector<double> xb, yb, xu, yu;
    for (std::size_t i = 0; i < total; ++i) {
        const int N = sizes[i / grid.size()];
        out.row({cells[i].parameter, static_cast<long long>(N), cells[i].p_com});
        (cells[i].p_com > 0.0 ? xb : xu).push_back(cells[i].parameter);
        (cells[i].p_com > 0.0 ? yb : yu).push_back(static_cast<double>(N));
    }
    out.close();

    // Threshold overlay; sizes whose onset lies outside the sweep are skipped.
    const auto thr_path = cfg.out_dir / "thresholds.csv";
    CsvWriter thr(thr_path, {"sites", "lambda_c"});
    const int coarse = std::max(48, cfg.sweep->steps);
    auto onsets = map_indexed<double>(sizes.size(), cfg.workers, [&](std::size_t i) {
        try {
            return threshold_lambda_c(family_for(cfg, sizes[i]),
                                      {cfg.sweep->start, cfg.sweep->stop}, 1e-4, coarse);
        } catch (const std::invalid_argument&) {
            return std::nan("");
        }
    });
    std::vector<double> xt, yt;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (std::isnan(onsets[i])) continue;
        thr.row({static_cast<long long>(sizes[i]), onsets[i]});
        xt.push_back(onsets[i]);
        yt.push_back(static_cast<double>(sizes[i]));
    }
    thr.close();

    plot.scatter(xu, yu, "#c8d6e5", 2.0);
    plot.scatter(xb, yb, svg_color(1), 2.0);
    plot.scatter(xt, yt, "#000000", 3.0);
    if (auto pc = predicted_threshold(cfg, *cfg.sweep)) plot.vline(*pc, "#888888");
    const auto svg_path = cfg.out_dir / "phase_diagram.svg";
    plot.save(svg_path);
    return {grid_path, thr_path, svg_path};
}

std::vector<std::filesystem::path> run_trajectory(const ExperimentConfig& cfg) {
    const auto grid = axis_grid(*cfg.sweep);
    auto uf_at = [&](double p) { return evolve_protocol(protocol_for(cfg, p, cfg.sites, cfg.eta)); };
    TrajectoryOptions opts;
    opts.pair = cfg.pair;
    const auto points = trajectory(uf_at, grid, opts);

    const auto csv_path = cfg.out_dir / "trajectory.csv";
    CsvWriter out(csv_path,
                  {"param", "re_xi1", "im_xi1", "re_xi2", "im_xi2", "product_modulus",
                   "ambiguous"});
    std::vector<double> x1, y1, x2, y2;
    for (const auto& pt : points) {
        out.row({pt.parameter, pt.xi1.real(), pt.xi1.imag(), pt.xi2.real(), pt.xi2.imag(),
                 pt.product_modulus, static_cast<long long>(pt.ambiguous ? 1 : 0)});
        x1.push_back(pt.xi1.real()); y1.push_back(pt.xi1.imag());
        x2.push_back(pt.xi2.real()); y2.push_back(pt.xi2.imag());
    }
    out.close();

    SvgPlot plot("Eigenvalue pair on the unit circle", "Re xi", "Im xi");
    std::vector<double> cx(257), cy(257);
    for (int i = 0; i <= 256; ++i) {
        cx[static_cast<std::size_t>(i)] = std::cos(2 * M_PI * i / 256.0);
        cy[static_cast<std::size_t>(i)] = std::sin(2 * M_PI * i / 256.0);
    }
    plot.polyline(cx, cy, "#cccccc");
    plot.scatter(x1, y1, svg_color(0), 1.6);
    plot.scatter(x2, y2, svg_color(1), 1.6);
    const auto svg_path = cfg.out_dir / "trajectory.svg";
    plot.save(svg_path);
    return {csv_path, svg_path};
}

std::vector<std::filesystem::path> run_scale_free(const ExperimentConfig& cfg) {
    auto model_at_size = [&](int N) { return protocol_for(cfg, cfg.coupling, N, cfg.eta); };
    const ScaleFreeFit fit = scale_free_fits(model_at_size, cfg.size_list);

    std::vector<std::filesystem::path> files;
    const auto table_path = cfg.out_dir / "scale_free.csv";
    CsvWriter table(table_path, {"inv_size", "size", "mean_abs_im", "n_com"});
    std::vector<double> lx, ly;
    for (const auto& p : fit.points) {
        table.row({1.0 / p.size, static_cast<long long>(p.size), p.mean_abs_im,
                   static_cast<long long>(p.n_com)});
        lx.push_back(std::log10(static_cast<double>(p.size)));
        ly.push_back(log10_clamped(p.mean_abs_im));
    }
    table.close();
    files.push_back(table_path);

    json fit_doc;
    fit_doc["coupling"] = cfg.coupling;
    fit_doc["slope"] = fit.slope;
    fit_doc["intercept"] = fit.intercept;
    fit_doc["sizes"] = cfg.size_list;
    const auto fit_path = cfg.out_dir / "scale_free_fit.json";
    write_text(fit_path, dump_json(fit_doc));
    files.push_back(fit_path);

    SvgPlot fit_plot("Broken-pair magnitude vs size", "log10 N", "log10 mean |Im E|");
    fit_plot.scatter(lx, ly, svg_color(0), 3.0);
    if (lx.size() >= 2) {
        const double ln10 = std::log(10.0);
        std::vector<double> fx = {lx.front(), lx.back()};
        std::vector<double> fy = {(fit.intercept + fit.slope * lx.front() * ln10) / ln10,
                                  (fit.intercept + fit.slope * lx.back() * ln10) / ln10};
        fit_plot.polyline(fx, fy, svg_color(1));
    }
    const auto fit_svg = cfg.out_dir / "scale_free.svg";
    fit_plot.save(fit_svg);
    files.push_back(fit_svg);

    // Position profiles and a few envelopes at the requested (or largest) size.
    std::vector<int> profile_sizes = cfg.profile_sizes;
    if (profile_sizes.empty())
        profile_sizes.push_back(*std::max_element(cfg.size_list.begin(), cfg.size_list.end()));
    const int m = band_dim_for(cfg);
    for (int N : profile_sizes) {
        const auto rec = spectrum_at(family_for(cfg, N), cfg.coupling, true);
        const auto loc = mean_positions(rec.eigvecs, rec.quasienergies, N, m);

        const auto prof_path = cfg.out_dir / ("profile_N" + std::to_string(N) + ".csv");
        CsvWriter prof(prof_path, {"index", "re_E", "im_E", "mean_x_over_N", "alpha"});
        std::vector<double> px, py;
        for (std::size_t i = 0; i < loc.mean_x.size(); ++i) {
            prof.row({static_cast<long long>(i), loc.energies[i].real(),
                      loc.energies[i].imag(), loc.mean_x[i] / N, loc.alpha[i]});
            px.push_back(static_cast<double>(i));
            py.push_back(loc.mean_x[i] / N);
        }
        prof.close();
        files.push_back(prof_path);

        SvgPlot prof_plot("Mean position by state (N=" + std::to_string(N) + ")",
                          "state (ascending Im E)", "<x>/N");
        prof_plot.hline(0.5, "#bbbbbb");
        prof_plot.scatter(px, py, svg_color(0), 1.6);
        const auto prof_svg = cfg.out_dir / ("profile_N" + std::to_string(N) + ".svg");
        prof_plot.save(prof_svg);
        files.push_back(prof_svg);

        // Envelopes: the extreme conjugate pair plus the most-real state.
        std::vector<Eigen::Index> order(static_cast<std::size_t>(rec.quasienergies.size()));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const cplx ea = rec.quasienergies[a], eb = rec.quasienergies[b];
            if (ea.imag() != eb.imag()) return ea.imag() < eb.imag();
            return ea.real() < eb.real();
        });
        Eigen::Index most_real = order[0];
        for (Eigen::Index i : order)
            if (std::abs(rec.quasienergies[i].imag()) <
                std::abs(rec.quasienergies[most_real].imag()))
                most_real = i;
        const std::vector<std::pair<std::string, Eigen::Index>> picks = {
            {"min_im", order.front()}, {"real", most_real}, {"max_im", order.back()}};

        const auto env_path = cfg.out_dir / ("envelope_N" + std::to_string(N) + ".csv");
        CsvWriter env(env_path, {"state", "site", "weight"});
        SvgPlot env_plot("Wavefunction envelopes (N=" + std::to_string(N) + ")", "site",
                         "log10 weight");
        int color = 0;
        for (const auto& [label, col] : picks) {
            std::vector<double> w(static_cast<std::size_t>(N), 0.0);
            double total = 0.0;
            for (Eigen::Index row = 0; row < rec.eigvecs.rows(); ++row) {
                const double a = std::norm(rec.eigvecs(row, col));
                w[static_cast<std::size_t>(row / m)] += a;
                total += a;
            }
            std::vector<double> sx, sy;
            for (int j = 0; j < N; ++j) {
                env.row({label, static_cast<long long>(j + 1),
                         w[static_cast<std::size_t>(j)] / total});
                sx.push_back(static_cast<double>(j + 1));
                sy.push_back(log10_clamped(w[static_cast<std::size_t>(j)] / total));
            }
            env_plot.polyline(sx, sy, svg_color(color++));
        }
        env.close();
        files.push_back(env_path);
        const auto env_svg = cfg.out_dir / ("envelope_N" + std::to_string(N) + ".svg");
        env_plot.save(env_svg);
        files.push_back(env_svg);
    }
    return files;
}

std::vector<std::filesystem::path> run_perturbation(const ExperimentConfig& cfg) {
    struct SizeResult {
        int size;
        int cutoff;
        PerturbationSplit split;
    };
    const auto& sizes = cfg.size_list;
    auto results = map_indexed<SizeResult>(sizes.size(), cfg.workers, [&](std::size_t i) {
        const int N = sizes[i];
        const int s = cfg.cutoff > 0 ? cfg.cutoff : (N + 3) / 4;
        const DrivingProtocol p = protocol_for(cfg, cfg.coupling, N, 0.0);
        const FloquetResult fr = floquet_of(p);
        return SizeResult{N, s, perturbation_split(fr.h_f, averaged_hamiltonian(p), s)};
    });

    std::vector<std::filesystem::path> files;
    const auto gamma_path = cfg.out_dir / "gamma_p.csv";
    CsvWriter gamma(gamma_path, {"inv_size", "size", "cutoff", "gamma_p"});
    std::vector<double> lx, ly;
    for (const auto& r : results) {
        gamma.row({1.0 / r.size, static_cast<long long>(r.size),
                   static_cast<long long>(r.cutoff), r.split.gamma_p});
        lx.push_back(std::log10(static_cast<double>(r.size)));
        ly.push_back(log10_clamped(r.split.gamma_p));
    }
    gamma.close();
    files.push_back(gamma_path);

    const double slope = lx.size() >= 2 ? lsq_slope(lx, ly) : 0.0;
    SvgPlot gamma_plot("Averaged bulk perturbation vs size", "log10 N", "log10 Gamma_p");
    gamma_plot.scatter(lx, ly, svg_color(0), 3.0);
    const auto gamma_svg = cfg.out_dir / "gamma_p.svg";
    gamma_plot.save(gamma_svg);
    files.push_back(gamma_svg);

    // Heatmap for the smallest size, profiles for the largest.
    const auto& small = *std::min_element(results.begin(), results.end(),
                                          [](const auto& a, const auto& b) {
                                              return a.size < b.size;
                                          });
    const auto& large = *std::max_element(results.begin(), results.end(),
                                          [](const auto& a, const auto& b) {
                                              return a.size < b.size;
                                          });
    if (cfg.heatmap) {
        const auto heat_path =
            cfg.out_dir / ("v_heatmap_N" + std::to_string(small.size) + ".csv");
        CsvWriter heat(heat_path, {"site_i", "site_j", "abs_v"});
        const Matrix& v = small.split.v;
        const int m = band_dim_for(cfg);
        for (Eigen::Index i = 0; i < v.rows(); i += m)
            for (Eigen::Index j = 0; j < v.cols(); j += m) {
                double cell = 0.0;
                for (Eigen::Index a = 0; a < m; ++a)
                    for (Eigen::Index b = 0; b < m; ++b) cell += std::abs(v(i + a, j + b));
                heat.row({static_cast<long long>(i / m + 1), static_cast<long long>(j / m + 1),
                          cell});
            }
        heat.close();
        files.push_back(heat_path);
    }

    json report;
    report["coupling"] = cfg.coupling;
    report["slope_log_gamma_vs_log_size"] = slope;
    report["sizes"] = sizes;
    std::vector<double> gammas;
    for (const auto& r : results) gammas.push_back(r.split.gamma_p);
    report["gamma_p"] = gammas;

    SvgPlot prof_plot("Boundary decay of V (N=" + std::to_string(large.size) + ")", "site",
                      "log10 |V|");
    int color = 0;
    for (auto kind : {DiagonalKind::main, DiagonalKind::secondary}) {
        const auto profile = boundary_decay_profile(large.split, kind);
        const char* name = kind == DiagonalKind::main ? "main" : "secondary";
        const auto prof_path = cfg.out_dir / ("v_profile_" + std::string(name) + "_N" +
                                              std::to_string(large.size) + ".csv");
        CsvWriter prof(prof_path, {"site", "magnitude"});
        std::vector<double> sx, sy;
        for (const auto& [site, mag] : profile) {
            prof.row({static_cast<long long>(site), mag});
            sx.push_back(static_cast<double>(site));
            sy.push_back(log10_clamped(mag));
        }
        prof.close();
        files.push_back(prof_path);
        prof_plot.polyline(sx, sy, svg_color(color++));
        report[std::string("decay_length_") + name] = fit_decay_length(profile, large.cutoff);
    }
    const auto prof_svg = cfg.out_dir / ("v_profile_N" + std::to_string(large.size) + ".svg");
    prof_plot.save(prof_svg);
    files.push_back(prof_svg);

    const auto report_path = cfg.out_dir / "perturbation.json";
    write_text(report_path, dump_json(report));
    files.push_back(report_path);
    return files;
}

std::vector<std::filesystem::path> run_validate(const ExperimentConfig& cfg) {
    const MultiBandSpec ansatz =
        cfg.model == "ansatz" ? *cfg.ansatz
                              : ansatz_for(cfg, cfg.model == "minimal"
                                                    ? cfg.period / 2.0 * cfg.t
                                                    : (cfg.model == "type1" ? cfg.t : cfg.t1));
    LatticeSpec spec{cfg.sites, cfg.eta, ansatz.band_dim()};
    const PTOperators pt = cfg.parity == "identity"
                               ? PTOperators::identity(cfg.sites * ansatz.band_dim())
                               : PTOperators::reflection(cfg.sites, ansatz.band_dim());
    const AuditReport rep = audit_model(ansatz, spec, pt, cfg.period);

    auto line = [](bool pass, const std::string& label, double defect) {
        std::printf("%-34s %s   (defect %.3e)\n", label.c_str(), pass ? "PASS" : "FAIL",
                    defect);
    };
    std::printf("model audit: %s, N=%d, parity=%s\n", cfg.model.c_str(), cfg.sites,
                cfg.parity.c_str());
    line(rep.pt_protocol.pass, "(i)   protocol PT relation", rep.pt_protocol.defect);
    line(rep.pt_floquet.pass, "(ii)  composed-evolution PT", rep.pt_floquet.defect);
    line(rep.bloch.hermitian_sum_pass, "(iii) Hermitian Bloch sum",
         rep.bloch.max_hermitian_defect);
    line(rep.bloch.commute_pass, "(iii) commuting Bloch blocks",
         rep.bloch.max_commutator_norm);
    std::printf("open-chain commutator norm        %.6e (%s)\n", rep.obc_commutator_norm,
                rep.obc_noncommute ? "boundary effect present" : "commuting");
    std::printf("bulk/boundary split norms         G1 %.6e   G2 %.6e\n", rep.g1_norm,
                rep.g2_norm);
    for (const auto& o : rep.obstructions.entries)
        std::printf("obstruction r=%d rp=%d            [X1,Y2] %d   [Y1,X2] %d   Y2X1-X2Y1 %d\n",
                    o.r, o.rp, o.xy_commutator ? 1 : 0, o.yx_commutator ? 1 : 0,
                    o.product_difference ? 1 : 0);

    json doc;
    doc["model"] = cfg.model;
    doc["sites"] = cfg.sites;
    doc["parity"] = cfg.parity;
    doc["pt_protocol"] = {{"pass", rep.pt_protocol.pass}, {"defect", rep.pt_protocol.defect}};
    doc["pt_floquet"] = {{"pass", rep.pt_floquet.pass}, {"defect", rep.pt_floquet.defect}};
    doc["bloch"] = {{"hermitian_sum_pass", rep.bloch.hermitian_sum_pass},
                    {"max_hermitian_defect", rep.bloch.max_hermitian_defect},
                    {"commute_pass", rep.bloch.commute_pass},
                    {"max_commutator_norm", rep.bloch.max_commutator_norm},
                    {"k_samples", rep.bloch.k_samples}};
    doc["obc_commutator_norm"] = rep.obc_commutator_norm;
    doc["obc_noncommute"] = rep.obc_noncommute;
    doc["g1_norm"] = rep.g1_norm;
    doc["g2_norm"] = rep.g2_norm;
    json obs = json::array();
    for (const auto& o : rep.obstructions.entries)
        obs.push_back({{"r", o.r},
                       {"rp", o.rp},
                       {"xy_commutator", o.xy_commutator},
                       {"yx_commutator", o.yx_commutator},
                       {"product_difference", o.product_difference}});
    doc["obstructions"] = obs;
    doc["obstructions_any"] = rep.obstructions.any;

    const auto path = cfg.out_dir / "audit.json";
    write_text(path, dump_json(doc));
    return {path};
}

int run_experiment(const std::string& subcommand, const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override,
                   const std::optional<int>& workers_override) {
    ExperimentConfig cfg = parse_config(load_json(config_path), subcommand);
    if (out_override) cfg.out_dir = *out_override;
    if (workers_override) cfg.workers = *workers_override;

    std::vector<std::filesystem::path> files;
    if (subcommand == "spectrum") files = run_spectrum_sweep(cfg);
    else if (subcommand == "phase-diagram") files = run_phase_diagram(cfg);
    else if (subcommand == "trajectory") files = run_trajectory(cfg);
    else if (subcommand == "scale-free") files = run_scale_free(cfg);
    else if (subcommand == "perturbation") files = run_perturbation(cfg);
    else files = run_validate(cfg);

    for (const auto& f : files) std::cout << f.string() << "\n";
    return 0;
}

} // namespace fpt
