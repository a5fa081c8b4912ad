// elastic-flow: run, sweep and inspect elastic flow of curves in conformal metrics.
//
// Exit codes: 0 completed, 2 aborted run (or failed check), 1 configuration error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <elastic_flow/elastic_flow.hpp>

namespace ef = elastic_flow;

namespace {

struct Overrides {
    std::optional<std::size_t> J;
    std::optional<double> T;
    std::optional<double> dt;
    std::optional<double> lambda;
    std::optional<std::string> scheme;
    std::optional<std::string> output_dir;
    std::optional<std::size_t> snapshot_every;
    bool embed = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--T", o.T, "final time");
    cmd->add_option("--dt", o.dt, "absolute time step (default 0.1 h^2)");
    cmd->add_option("--lambda", o.lambda, "length penalty");
    cmd->add_option("--scheme", o.scheme, "P, Qh or Qstar");
    cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
    cmd->add_flag("--embed", o.embed, "also write embedded 3D snapshots");
}

void apply(ef::RunConfig& c, const Overrides& o) {
    if (o.J) c.J = *o.J;
    if (o.T) c.T = *o.T;
    if (o.dt) c.dt = *o.dt;
    if (o.lambda) c.lambda = *o.lambda;
    if (o.scheme) c.scheme = *o.scheme;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
    if (o.embed) c.embed = true;
    ef::validate(c);
}

std::vector<std::size_t> parse_levels(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 3) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ef::ConfigError("bad J level '" + item + "'");
        }
    }
    if (out.empty()) throw ef::ConfigError("empty J list");
    return out;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& raw : items) {
        std::stringstream ss(raw);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ef::ConfigError("expected key=value, got '" + kv + "'");
            try {
                out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw ef::ConfigError("not a number in '" + kv + "'");
            }
        }
    }
    return out;
}

double need(const std::map<std::string, double>& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw ef::ConfigError("missing parameter '" + key + "'");
    return it->second;
}

ef::ConformalMetric parse_metric_spec(const std::string& spec) {
    const auto eq = spec.find('=');
    const std::string name = spec.substr(0, eq);
    const auto fam = ef::parse_family(name);
    if (!fam) throw ef::ConfigError("unknown metric family '" + name + "'");
    double value = *fam == ef::MetricFamily::mu ? 1.0 : 0.0;
    if (eq != std::string::npos) {
        try {
            value = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
            throw ef::ConfigError("bad metric parameter in '" + spec + "'");
        }
    }
    try {
        return ef::make_metric(*fam, value);
    } catch (const ef::ParameterError& e) {
        throw ef::ConfigError(e.what());
    }
}

int cmd_evolve(const std::string& path, const Overrides& o) {
    auto c = ef::load_config(path);
    apply(c, o);
    const auto rec = ef::run(c);
    const auto& last = rec.rows.back();
    std::printf("scheme=%s J=%zu steps=%zu t=%.6g energy=%.10g ratio=%.6g\n", c.scheme.c_str(), c.J, last.step,
                last.t, last.energy, last.ratio);
    if (!rec.status.completed) {
        std::fprintf(stderr, "aborted at step %zu: %s\n", rec.status.step, rec.status.reason.c_str());
        return 2;
    }
    return 0;
}

int cmd_converge(const std::string& path, const std::string& levels, const Overrides& o) {
    auto c = ef::load_config(path);
    apply(c, o);
    const auto rows = ef::converge(c, parse_levels(levels));
    std::printf("J,h,error,eoc,ratio\n");
    bool ok = true;
    for (const auto& r : rows) {
        std::printf("%zu,%s,%s,%s,%s\n", r.J, ef::format_sci(r.h, "%.4e").c_str(),
                    ef::format_sci(r.error, "%.4e").c_str(),
                    std::isfinite(r.eoc) ? ef::format_sci(r.eoc, "%.2f").c_str() : "",
                    ef::format_sci(r.final_ratio, "%.3f").c_str());
        if (!r.completed) {
            ok = false;
            std::fprintf(stderr, "J=%zu: %s\n", r.J, r.note.c_str());
        }
    }
    return ok ? 0 : 2;
}

int cmd_exact(const std::string& which, const std::vector<std::string>& params, double T, std::size_t samples) {
    const auto p = parse_params(params);
    if (!(T > 0.0) || samples == 0) throw ef::ConfigError("need T > 0 and samples > 0");
    std::optional<ef::ExactCircle> ex;
    try {
        if (which == "alpha") {
            ex = ef::ExactCircle::alpha(need(p, "alpha"), need(p, "r0"));
        } else if (which == "hyperbolic") {
            ex = ef::ExactCircle::hyperbolic(need(p, "a0"), need(p, "r0"));
        } else {
            throw ef::ConfigError("unknown case '" + which + "'");
        }
    } catch (const ef::ContractError& e) {
        throw ef::ConfigError(e.what());
    }
    std::vector<double> times(samples);
    for (std::size_t k = 0; k < samples; ++k) times[k] = T * static_cast<double>(k + 1) / static_cast<double>(samples);
    const auto pts = ex->evaluate(times);
    std::printf("t,a,r\n");
    std::printf("0,%s,%s\n", ef::format_double(ex->a0()).c_str(), ef::format_double(ex->r0()).c_str());
    for (std::size_t k = 0; k < samples; ++k) {
        std::printf("%s,%s,%s\n", ef::format_double(times[k]).c_str(), ef::format_double(pts[k].a).c_str(),
                    ef::format_double(pts[k].r).c_str());
    }
    return 0;
}

int cmd_check(const std::string& path, const std::string& metric_spec, const std::string& rule_name) {
    const auto metric = parse_metric_spec(metric_spec);
    ef::QuadratureRule rule;
    if (rule_name == "vertex") {
        rule = ef::vertex_rule();
    } else if (rule_name == "gauss3") {
        rule = ef::gauss3_rule();
    } else {
        throw ef::ConfigError("unknown rule '" + rule_name + "'");
    }
    ef::PolygonalCurve curve;
    try {
        curve = ef::read_curve_csv(path);
    } catch (const ef::Error& e) {
        throw ef::ConfigError(e.what());
    }
    const auto rep = ef::check_assumptions(curve, metric, rule);
    std::printf("vertices=%zu\n", curve.size());
    std::printf("in_domain=%d\ndistinct_vertices=%d\nnormals_span=%d\nweighted_normals_span=%d\n", rep.in_domain,
                rep.distinct_vertices, rep.normals_span, rep.weighted_normals_span);
    std::printf("ok_for_P=%d\nok_for_Q=%d\n", rep.ok_for_p(), rep.ok_for_q());
    if (rep.distinct_vertices) std::printf("mesh_ratio=%.6g\n", ef::mesh_ratio(curve));
    if (!rep.message.empty()) std::printf("message=%s\n", rep.message.c_str());
    return rep.ok_for_q() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastic flow of closed curves in conformally flat metrics"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ev;
    auto* evolve = app.add_subcommand("evolve", "run one configured evolution");
    evolve->add_option("config", config_path, "JSON run configuration")->required();
    evolve->add_option("--J", ev.J, "number of vertices");
    evolve->add_option("--snapshot-every", ev.snapshot_every, "snapshot interval in steps (0: none)");
    add_overrides(evolve, ev);

    std::string levels = "32,64,128";
    Overrides cv;
    auto* converge = app.add_subcommand("converge", "convergence sweep against the exact circle");
    converge->add_option("config", config_path, "JSON run configuration")->required();
    converge->add_option("--J", levels, "comma separated J levels");
    add_overrides(converge, cv);

    std::string which;
    std::vector<std::string> params;
    double T = 1.0;
    std::size_t samples = 10;
    auto* exact = app.add_subcommand("exact", "tabulate an exact circle solution");
    exact->add_option("--case", which, "alpha or hyperbolic")->required();
    exact->add_option("--params", params, "key=value pairs: alpha,r0 or a0,r0")->required();
    exact->add_option("--T", T, "final time");
    exact->add_option("--samples", samples, "number of output times after t=0");

    std::string curve_path;
    std::string metric_spec = "euclidean";
    std::string rule_name = "gauss3";
    auto* check = app.add_subcommand("check", "test a curve against the solvability assumptions");
    check->add_option("curve", curve_path, "CSV with header x,y")->required();
    check->add_option("--metric", metric_spec, "family[=parameter]");
    check->add_option("--rule", rule_name, "vertex or gauss3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*evolve) return cmd_evolve(config_path, ev);
        if (*converge) return cmd_converge(config_path, levels, cv);
        if (*exact) return cmd_exact(which, params, T, samples);
        if (*check) return cmd_check(curve_path, metric_spec, rule_name);
    } catch (const ef::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ef::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
