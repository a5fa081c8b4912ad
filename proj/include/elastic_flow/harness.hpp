#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "curve.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "exact.hpp"
#include "metric.hpp"
#include "scheme.hpp"

namespace elastic_flow {

struct InitialSpec {
    std::string type = "perturbed_circle";  // perturbed_circle | circle | ellipse | file
    double r0 = 1.0;
    double a0 = 0.0;
    double rx = 1.0;
    double ry = 1.0;
    Vec2 center = Vec2::Zero();
    std::string path;
};

struct RunConfig {
    MetricFamily family = MetricFamily::euclidean;
    double metric_parameter = 0.0;
    std::string scheme = "P";
    std::size_t J = 64;
    double T = 1.0;
    std::optional<double> dt;   // absolute step; otherwise dt = 0.1 h^2 of the initial polygon
    double lambda = 0.0;
    InitialSpec initial;
    std::size_t snapshot_every = 0;
    std::string output_dir;
    bool embed = false;
};

namespace detail {

inline const char* parameter_key(MetricFamily f) {
    switch (f) {
        case MetricFamily::mu: return "mu";
        case MetricFamily::alpha: return "alpha";
        case MetricFamily::torus: return "s";
        default: return nullptr;
    }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

inline Vec2 get_point(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return Vec2::Zero();
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(std::string("field '") + key + "' must be a two-element number array");
    }
    return Vec2(v[0].get<double>(), v[1].get<double>());
}

}  // namespace detail

inline Scheme parse_scheme(const std::string& name) {
    if (name == "P") return Scheme::p();
    if (name == "Qh") return Scheme::qh();
    if (name == "Qstar") return Scheme::qstar();
    throw ConfigError("unknown scheme '" + name + "' (expected P, Qh or Qstar)");
}

inline void validate(const RunConfig& c) {
    parse_scheme(c.scheme);
    if (c.J < 3) throw ConfigError("J must be at least 3");
    if (!(c.T > 0.0)) throw ConfigError("T must be positive");
    if (c.dt && !(*c.dt > 0.0)) throw ConfigError("dt must be positive");
    const auto& i = c.initial;
    if (i.type == "perturbed_circle" || i.type == "circle") {
        if (!(i.r0 > 0.0)) throw ConfigError("initial r0 must be positive");
    } else if (i.type == "ellipse") {
        if (!(i.rx > 0.0) || !(i.ry > 0.0)) throw ConfigError("ellipse radii must be positive");
    } else if (i.type == "file") {
        if (i.path.empty()) throw ConfigError("initial file needs a path");
    } else {
        throw ConfigError("unknown initial type '" + i.type + "'");
    }
    try {
        make_metric(c.family, c.metric_parameter);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    if (!j.contains("metric") || !j.at("metric").is_object()) throw ConfigError("missing 'metric' object");
    const auto& m = j.at("metric");
    const auto fam_name = detail::get_or<std::string>(m, "family", "");
    const auto fam = parse_family(fam_name);
    if (!fam) throw ConfigError("unknown metric family '" + fam_name + "'");
    c.family = *fam;
    if (const char* key = detail::parameter_key(c.family)) {
        c.metric_parameter = detail::get_or<double>(m, key, detail::get_or<double>(m, "parameter", 0.0));
    }
    if (c.family == MetricFamily::mu && !m.contains("mu") && !m.contains("parameter")) c.metric_parameter = 1.0;

    c.scheme = detail::get_or<std::string>(j, "scheme", c.scheme);
    const auto J = detail::get_or<long long>(j, "J", 64);
    if (J < 3) throw ConfigError("J must be at least 3");
    c.J = static_cast<std::size_t>(J);
    c.T = detail::get_or<double>(j, "T", c.T);
    if (j.contains("dt")) c.dt = detail::get_or<double>(j, "dt", 0.0);
    const auto rule = detail::get_or<std::string>(j, "dt_rule", "0.1h2");
    if (rule != "0.1h2") throw ConfigError("unknown dt_rule '" + rule + "'");
    c.lambda = detail::get_or<double>(j, "lambda", 0.0);
    const auto every = detail::get_or<long long>(j, "snapshot_every", 0);
    if (every < 0) throw ConfigError("snapshot_every must be nonnegative");
    c.snapshot_every = static_cast<std::size_t>(every);
    c.output_dir = detail::get_or<std::string>(j, "output_dir", "");
    c.embed = detail::get_or<bool>(j, "embed", false);

    if (j.contains("initial")) {
        const auto& i = j.at("initial");
        if (!i.is_object()) throw ConfigError("'initial' must be an object");
        c.initial.type = detail::get_or<std::string>(i, "type", "perturbed_circle");
        c.initial.r0 = detail::get_or<double>(i, "r0", 1.0);
        c.initial.a0 = detail::get_or<double>(i, "a0", 0.0);
        c.initial.rx = detail::get_or<double>(i, "rx", 1.0);
        c.initial.ry = detail::get_or<double>(i, "ry", 1.0);
        c.initial.center = detail::get_point(i, "center");
        c.initial.path = detail::get_or<std::string>(i, "path", "");
    }
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

inline PolygonalCurve initial_curve(const RunConfig& c) {
    const auto& i = c.initial;
    if (i.type == "perturbed_circle") return perturbed_circle(c.J, i.r0, i.a0);
    if (i.type == "circle") return regular_circle(c.J, i.r0, i.center);
    if (i.type == "ellipse") {
        std::vector<Vec2> pts(c.J);
        for (std::size_t j = 0; j < c.J; ++j) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(c.J);
            pts[j] = i.center + Vec2(i.rx * std::cos(th), i.ry * std::sin(th));
        }
        return PolygonalCurve(std::move(pts));
    }
    try {
        return read_curve_csv(i.path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

inline double resolve_dt(const RunConfig& c, const PolygonalCurve& x0) { return c.dt ? *c.dt : dt_rule(x0); }

inline void write_diagnostics_csv(const std::string& path, const RunRecord& rec) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "step,t,energy,ratio,min_edge,max_edge\n";
    for (const auto& r : rec.rows) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.energy) << ',' << format_double(r.ratio)
            << ',' << format_double(r.min_edge) << ',' << format_double(r.max_edge) << '\n';
    }
}

inline void write_embedded_csv(const std::string& path, const PolygonalCurve& c, const ConformalMetric& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "x,y,z\n";
    for (const auto& v : c.vertices()) {
        const Vec3 p = m.embed(v);
        out << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
    }
}

inline void write_outputs(const RunConfig& c, const RunRecord& rec, const ConformalMetric& m) {
    if (c.output_dir.empty()) return;
    namespace fs = std::filesystem;
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    write_diagnostics_csv((dir / "diagnostics.csv").string(), rec);
    const bool embed = c.embed && m.has_embedding();
    for (const auto& s : rec.snapshots) {
        const std::string id = std::to_string(s.step);
        write_curve_csv((dir / ("snapshot_" + id + ".csv")).string(), s.curve);
        if (embed) write_embedded_csv((dir / ("embedded_" + id + ".csv")).string(), s.curve, m);
    }
}

/// Builds and evolves one configured run; files go to output_dir when set.
/// Aborts are reported in the record status, with partial output written.
inline RunRecord run(const RunConfig& c, const StepObserver& observer = {}) {
    validate(c);
    const ConformalMetric metric = make_metric(c.family, c.metric_parameter);
    const PolygonalCurve x0 = initial_curve(c);
    SchemeState state;
    try {
        state = init_state(parse_scheme(c.scheme), metric, x0, c.lambda);
    } catch (const StepError& e) {
        throw ConfigError(e.what());
    }
    RunRecord rec = evolve(state, resolve_dt(c, x0), c.T, c.snapshot_every, observer);
    write_outputs(c, rec, metric);
    return rec;
}

/// Exact circle solution matching a config, when one exists.
inline ExactCircle exact_for(const RunConfig& c) {
    const auto& i = c.initial;
    double a0 = 0.0;
    if (i.type == "perturbed_circle") {
        a0 = i.a0;
    } else if (i.type == "circle" && i.center.x() == 0.0) {
        a0 = i.center.y();
    } else {
        throw ConfigError("convergence needs a circle centred on the vertical axis");
    }
    if (c.lambda != 0.0) throw ConfigError("exact circle solutions assume lambda = 0");
    switch (c.family) {
        case MetricFamily::euclidean:
            if (a0 == 0.0) return ExactCircle::alpha(0.0, i.r0);
            break;
        case MetricFamily::alpha:
            if (a0 == 0.0) return ExactCircle::alpha(c.metric_parameter, i.r0);
            break;
        case MetricFamily::mu:
            if (c.metric_parameter == 1.0) return ExactCircle::hyperbolic(a0, i.r0);
            break;
        default: break;
    }
    throw ConfigError("no exact solution for this metric and initial circle");
}

struct ConvergenceRow {
    std::size_t J = 0;
    double h = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();
    double eoc = std::numeric_limits<double>::quiet_NaN();  // NaN on the first row
    double final_ratio = std::numeric_limits<double>::quiet_NaN();
    bool completed = false;
    std::string note;
};

inline ConvergenceRow convergence_level(RunConfig c, std::size_t J, const ExactCircle& exact) {
    c.J = J;
    c.dt.reset();
    c.snapshot_every = 0;
    c.output_dir.clear();
    ConvergenceRow row;
    row.J = J;
    const PolygonalCurve x0 = initial_curve(c);
    row.h = max_edge_length(x0);
    const double dt = dt_rule(x0);
    LinfAccumulator acc(exact, dt, step_count(c.T, dt));
    try {
        const RunRecord rec = run(c, [&](const SchemeState& s) { acc.observe(s.step, s.curve); });
        row.completed = rec.status.completed;
        row.final_ratio = rec.rows.back().ratio;
        if (rec.status.completed) {
            row.error = acc.error();
        } else {
            row.note = "aborted at step " + std::to_string(rec.status.step) + ": " + rec.status.reason;
        }
    } catch (const Error& e) {
        row.note = e.what();
    }
    return row;
}

inline std::string format_sci(double v, const char* fmt) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "J,h,error,eoc\n";
    for (const auto& r : rows) {
        out << r.J << ',' << format_sci(r.h, "%.4e") << ',' << format_sci(r.error, "%.4e") << ','
            << (std::isfinite(r.eoc) ? format_sci(r.eoc, "%.2f") : "") << '\n';
    }
}

/// Sweep over J with dt = 0.1 h^2 per level; levels run concurrently, rows come back ordered by J.
inline std::vector<ConvergenceRow> converge(const RunConfig& base, std::vector<std::size_t> Js) {
    validate(base);
    if (Js.empty()) throw ConfigError("empty J list");
    std::sort(Js.begin(), Js.end());
    const ExactCircle exact = exact_for(base);
    std::vector<std::future<ConvergenceRow>> jobs;
    for (auto J : Js) {
        if (J < 3) throw ConfigError("J must be at least 3");
        jobs.push_back(std::async(std::launch::async, convergence_level, base, J, exact));
    }
    std::vector<ConvergenceRow> rows;
    for (auto& f : jobs) rows.push_back(f.get());
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& a = rows[k - 1];
        const auto& b = rows[k];
        if (a.error > 0.0 && b.error > 0.0) rows[k].eoc = eoc({a.error, b.error}, {a.h, b.h}).front();
    }
    if (!base.output_dir.empty()) {
        std::filesystem::create_directories(base.output_dir);
        write_convergence_csv((std::filesystem::path(base.output_dir) / "convergence.csv").string(), rows);
    }
    return rows;
}

}  // namespace elastic_flow
