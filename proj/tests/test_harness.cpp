#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <elastic_flow/harness.hpp>

using namespace elastic_flow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ef_harness_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config() {
    RunConfig c;
    c.family = MetricFamily::mu;
    c.metric_parameter = 1.0;
    c.J = 16;
    c.T = 0.05;
    c.initial.type = "perturbed_circle";
    c.initial.r0 = 1.0;
    c.initial.a0 = 2.0;
    return c;
}

}  // namespace

TEST(Harness, ParsesShippedConfigs) {
    const fs::path dir = fs::path(ELASTIC_FLOW_SOURCE_DIR) / "configs";
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 4u);
    const auto c = load_config((dir / "hyperbolic_plane.json").string());
    EXPECT_EQ(c.family, MetricFamily::mu);
    EXPECT_EQ(c.metric_parameter, 1.0);
    EXPECT_EQ(c.J, 32u);
    EXPECT_FALSE(c.dt.has_value());
    EXPECT_EQ(c.initial.a0, 2.0);
}

TEST(Harness, ConfigErrors) {
    using nlohmann::json;
    const json ok = {{"metric", {{"family", "alpha"}, {"alpha", -1}}}, {"J", 8}};
    EXPECT_NO_THROW(config_from_json(ok));
    auto bad = ok;
    bad["metric"]["family"] = "hyperbolic";
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["J"] = 2;
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["scheme"] = "R";
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["T"] = -1.0;
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["dt"] = 0.0;
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["dt_rule"] = "h";
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["J"] = "many";
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = {{"metric", {{"family", "torus"}, {"s", 0.0}}}};
    EXPECT_THROW(config_from_json(bad), ConfigError);
    bad = ok;
    bad["initial"] = {{"type", "ellipse"}, {"rx", 0.0}};
    EXPECT_THROW(config_from_json(bad), ConfigError);
    EXPECT_THROW(config_from_json(json::array()), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);

    // initial curve outside the domain is a configuration problem
    auto c = small_config();
    c.initial.a0 = 0.0;
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Harness, RowsPerStep) {
    auto c = small_config();
    const auto x0 = initial_curve(c);
    const double dt = dt_rule(x0);
    const auto rec = run(c);
    ASSERT_TRUE(rec.status.completed);
    EXPECT_EQ(rec.rows.size(), step_count(c.T, dt) + 1);
    for (std::size_t k = 1; k < rec.rows.size(); ++k) EXPECT_GT(rec.rows[k].t, rec.rows[k - 1].t);
    EXPECT_EQ(rec.rows.front().t, 0.0);
    EXPECT_NEAR(rec.rows.back().t, c.T, dt);
}

TEST(Harness, OutputsAreDeterministic) {
    auto c = small_config();
    c.family = MetricFamily::torus;
    c.initial = {};
    c.initial.type = "circle";
    c.initial.r0 = 3.0;
    c.initial.center = Vec2(0, 2);
    c.scheme = "Qstar";
    c.dt = 1e-3;
    c.T = 0.01;
    c.snapshot_every = 5;
    c.embed = true;
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    c.output_dir = a.string();
    run(c);
    c.output_dir = b.string();
    run(c);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto other = b / e.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
        ++files;
    }
    // diagnostics, snapshots 0/5/10, embedded 0/5/10
    EXPECT_EQ(files, 7u);
    EXPECT_TRUE(fs::exists(a / "embedded_10.csv"));
    const auto diag = slurp(a / "diagnostics.csv");
    EXPECT_EQ(diag.substr(0, diag.find('\n')), "step,t,energy,ratio,min_edge,max_edge");
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Harness, AbortedRunIsReported) {
    // a large step drives the hyperbolic circle across the boundary
    auto c = small_config();
    c.initial.a0 = 1.05;
    c.dt = 5.0;
    c.T = 50.0;
    const auto rec = run(c);
    EXPECT_FALSE(rec.status.completed);
    EXPECT_FALSE(rec.status.reason.empty());
    EXPECT_EQ(rec.rows.size(), rec.status.step);
}

TEST(Harness, ExactSolutionLookup) {
    auto c = small_config();
    EXPECT_EQ(exact_for(c).kind(), ExactCircle::Kind::hyperbolic_plane);
    c.family = MetricFamily::alpha;
    c.metric_parameter = -1.0;
    c.initial.a0 = 0.0;
    EXPECT_EQ(exact_for(c).kind(), ExactCircle::Kind::alpha_family);
    c.family = MetricFamily::torus;
    c.metric_parameter = 1.0;
    EXPECT_THROW(exact_for(c), ConfigError);
    c = small_config();
    c.lambda = 1.0;
    EXPECT_THROW(exact_for(c), ConfigError);
}

TEST(Harness, ConvergenceCsv) {
    auto c = small_config();
    c.family = MetricFamily::alpha;
    c.metric_parameter = -1.0;
    c.initial.r0 = 1.5;
    c.initial.a0 = 0.0;
    c.T = 0.1;
    const auto dir = scratch("conv");
    c.output_dir = dir.string();
    const auto rows = converge(c, {32, 16});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].J, 16u);
    EXPECT_TRUE(std::isnan(rows[0].eoc));
    EXPECT_GT(rows[1].eoc, 1.5);
    const auto text = slurp(dir / "convergence.csv");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "J,h,error,eoc");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 3), "16,");
    EXPECT_EQ(line.back(), ',');
    std::getline(in, line);
    EXPECT_EQ(line, "32," + format_sci(rows[1].h, "%.4e") + "," + format_sci(rows[1].error, "%.4e") + "," +
                        format_sci(rows[1].eoc, "%.2f"));
    fs::remove_all(dir);

    EXPECT_EQ(format_sci(1.23456e-3, "%.4e"), "1.2346e-03");
    EXPECT_EQ(format_sci(std::nan(""), "%.4e"), "nan");
}
