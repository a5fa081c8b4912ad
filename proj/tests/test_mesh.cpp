#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <elastic_flow/assumptions.hpp>
#include <elastic_flow/curve.hpp>
#include <elastic_flow/exact.hpp>
#include <elastic_flow/quadrature.hpp>
#include <elastic_flow/scheme.hpp>

using namespace elastic_flow;
using std::numbers::pi;

TEST(Mesh, PerpConvention) {
    EXPECT_EQ(perp(Vec2(1, 2)), Vec2(2, -1));
    // counterclockwise circle: inward normals
    const auto f = frame(regular_circle(256, 1.0));
    for (std::size_t j = 0; j < 256; ++j) {
        EXPECT_NEAR(f.edge_tangents[j].norm(), 1.0, 1e-15);
        EXPECT_NEAR(f.edge_tangents[j].dot(f.edge_normals[j]), 0.0, 1e-15);
    }
    const auto c = regular_circle(256, 1.0);
    for (std::size_t j = 0; j < 256; ++j) EXPECT_LT(f.unit_vertex_normals[j].dot(c[j]), 0.0);
    const auto kv = curvature_vector(f);
    for (std::size_t j = 0; j < 256; ++j) EXPECT_GT(kv[j].dot(f.unit_vertex_normals[j]), 0.0);
}

TEST(Mesh, RegularPolygonVertexNormals) {
    for (std::size_t J : {3u, 5u, 16u, 101u}) {
        const double r = 1.7;
        const auto c = regular_circle(J, r, Vec2(0.3, -2.0));
        const auto f = frame(c);
        for (std::size_t j = 0; j < J; ++j) {
            EXPECT_NEAR(f.vertex_normals[j].norm(), std::cos(pi / static_cast<double>(J)), 1e-14);
            const Vec2 inward = (Vec2(0.3, -2.0) - c[j]).normalized();
            EXPECT_NEAR(f.unit_vertex_normals[j].dot(inward), 1.0, 1e-14);
            EXPECT_LE(f.vertex_normals[j].norm(), 1.0);
        }
    }
}

TEST(Mesh, UnitSquare) {
    const PolygonalCurve sq({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)});
    const auto f = frame(sq);
    const Vec2 centre(0.5, 0.5);
    for (std::size_t j = 0; j < 4; ++j) {
        const Vec2 diag = (centre - sq[j]).normalized();
        EXPECT_TRUE(f.vertex_normals[j].isApprox(std::cos(pi / 4) * diag, 1e-15));
    }
}

TEST(Mesh, DegenerateMeshes) {
    const PolygonalCurve dup({Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(0, 1)});
    try {
        frame(dup);
        FAIL() << "expected DegenerateMeshError";
    } catch (const DegenerateMeshError& e) {
        EXPECT_EQ(e.index(), 1u);
    }
    const PolygonalCurve fold({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(1, 0)});
    try {
        frame(fold);
        FAIL() << "expected DegenerateMeshError";
    } catch (const DegenerateMeshError& e) {
        EXPECT_EQ(e.index(), 0u);  // vertices 1 and 3 flank vertex 0
    }
    EXPECT_THROW(PolygonalCurve({Vec2(0, 0), Vec2(1, 0)}), ContractError);
    EXPECT_THROW(mesh_ratio(dup), DegenerateMeshError);
}

TEST(Mesh, MeshRatio) {
    EXPECT_NEAR(mesh_ratio(regular_circle(17, 2.0)), 1.0, 1e-13);
    const auto pc = perturbed_circle(32, 1.0, 0.0);
    double lo = 1e300, hi = 0;
    for (std::size_t e = 0; e < 32; ++e) {
        lo = std::min(lo, (pc[(e + 1) % 32] - pc[e]).norm());
        hi = std::max(hi, (pc[(e + 1) % 32] - pc[e]).norm());
    }
    EXPECT_GT(mesh_ratio(pc), 1.0);
    EXPECT_DOUBLE_EQ(mesh_ratio(pc), hi / lo);
    // edges 2, 0.5, then unit edges
    const PolygonalCurve p({Vec2(0, 0), Vec2(2, 0), Vec2(2, 0.5), Vec2(2, 1.5), Vec2(1, 1.5), Vec2(0, 1.5),
                            Vec2(0, 0.5)});
    EXPECT_DOUBLE_EQ(mesh_ratio(p), 4.0);
}

TEST(Mesh, InnerH) {
    const auto c = perturbed_circle(40, 1.3, 0.5);
    const double L = [&] {
        double s = 0;
        for (std::size_t e = 0; e < c.size(); ++e) s += c.edge_length(e);
        return s;
    }();
    const auto one = constant_field(40, 1.0);
    EXPECT_NEAR(inner_h(c, one, arc_speed(c)), L, 1e-13);
    EXPECT_NEAR(inner_h(c, one, one), 1.0, 1e-14);

    // kappa^0 = 1/r on a regular polygon, so (kappa^0, |X_rho|)^h = perimeter / r
    const double r = 0.8;
    const auto poly = regular_circle(24, r);
    const auto st = init_state(Scheme::p(), make_metric(MetricFamily::euclidean), poly);
    const double perim = 24 * poly.edge_length(0);
    EXPECT_NEAR(inner_h(poly, from_nodal(st.kappa), arc_speed(poly)), perim / r, 1e-12);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> a(40), b(40), d(40);
    for (std::size_t i = 0; i < 40; ++i) a[i] = u(rng), b[i] = u(rng), d[i] = u(rng);
    const auto A = from_nodal(a), B = from_nodal(b), D = from_nodal(d);
    EXPECT_NEAR(inner_h(c, A, B), inner_h(c, B, A), 1e-15);
    ElementField comb(40);
    for (std::size_t e = 0; e < 40; ++e) comb[e] = {2 * A[e][0] + 3 * D[e][0], 2 * A[e][1] + 3 * D[e][1]};
    EXPECT_NEAR(inner_h(c, comb, B), 2 * inner_h(c, A, B) + 3 * inner_h(c, D, B), 1e-14);
    // vertex rule reproduces mass lumping
    EXPECT_NEAR(inner_quad(vertex_rule(), c, A, B), inner_h(c, A, B), 1e-14);
    EXPECT_THROW(inner_h(c, A, constant_field(3, 1.0)), ContractError);
}

TEST(Mesh, GaussRuleExactness) {
    const auto rule = gauss3_rule();
    double wsum = 0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-16);
    for (int deg = 0; deg <= 5; ++deg) {
        const double q = quad_integrate(rule, 1, [&](std::size_t, double a) { return std::pow(a, deg); });
        EXPECT_NEAR(q, 1.0 / (deg + 1), 1e-14) << deg;
    }
    const double q6 = quad_integrate(rule, 1, [](std::size_t, double a) { return std::pow(a, 6); });
    EXPECT_GT(std::abs(q6 - 1.0 / 7.0), 1e-8);
}

TEST(Mesh, MetricLengthOracle) {
    const auto m = make_metric(MetricFamily::alpha, -1.0);
    const double r = 1.5;
    // g^{1/2} = 2 / (1 + r^2) is constant along the circle
    const double exact = 2 * pi * r * 2 / (1 + r * r);
    const auto c = regular_circle(2048, r);
    EXPECT_NEAR(metric_length(gauss3_rule(), c, m), exact, 1e-5);
    EXPECT_NEAR(metric_length(vertex_rule(), c, m), exact, 1e-5);
    EXPECT_THROW(metric_length(gauss3_rule(), regular_circle(16, 1.0, Vec2(0, 0.5)),
                               make_metric(MetricFamily::mu, 1.0)),
                 DomainError);
}

TEST(Mesh, Reversal) {
    const auto c = perturbed_circle(30, 1.0, 2.0);
    const auto rc = c.reversed();
    const auto f = frame(c);
    const auto g = frame(rc);
    EXPECT_DOUBLE_EQ(mesh_ratio(c), mesh_ratio(rc));
    for (std::size_t j = 0; j < 30; ++j) {
        const std::size_t k = 29 - j;  // same vertex in the reversed curve
        EXPECT_TRUE(g.vertex_normals[k].isApprox(-f.vertex_normals[j], 1e-14));
        // kappa^0 = kappa_vec . n flips with n (kappa_vec is orientation free)
        const Vec2 kv = curvature_vector(f)[j];
        EXPECT_NEAR(curvature_vector(g)[k].dot(g.unit_vertex_normals[k]), -kv.dot(f.unit_vertex_normals[j]), 1e-12);
        // element normal of edge j (j -> j+1) is edge 28 - j in reverse order
        const std::size_t e = (29 - j + 29) % 30;
        EXPECT_TRUE(g.edge_normals[e].isApprox(-f.edge_normals[j], 1e-14));
        EXPECT_NEAR(g.edge_lengths[e], f.edge_lengths[j], 1e-15);
    }
    // flat energies are orientation free
    const auto e1 = energy(init_state(Scheme::p(), make_metric(MetricFamily::euclidean), c));
    const auto e2 = energy(init_state(Scheme::p(), make_metric(MetricFamily::euclidean), rc));
    EXPECT_NEAR(e1, e2, 1e-12);
    const auto q1 = energy(init_state(Scheme::qstar(), make_metric(MetricFamily::euclidean), c));
    const auto q2 = energy(init_state(Scheme::qstar(), make_metric(MetricFamily::euclidean), rc));
    EXPECT_NEAR(q1, q2, 1e-12);
}

TEST(Mesh, Assumptions) {
    for (auto fam : {MetricFamily::euclidean, MetricFamily::mu, MetricFamily::torus}) {
        const auto m = make_metric(fam, 1.0);
        for (std::size_t J : {3u, 4u, 50u}) {
            const auto rep = check_assumptions(regular_circle(J, 0.5, Vec2(0, 1)), m, gauss3_rule());
            EXPECT_TRUE(rep.ok_for_q()) << rep.message;
        }
    }
    const PolygonalCurve segment({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0), Vec2(2.5, 0), Vec2(1.5, 0),
                                  Vec2(0.5, 0)});
    const auto seg = check_assumptions(segment, make_metric(MetricFamily::euclidean), vertex_rule());
    EXPECT_TRUE(seg.distinct_vertices);
    EXPECT_FALSE(seg.normals_span);
    EXPECT_FALSE(seg.ok_for_p());

    const PolygonalCurve dup({Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(0, 1)});
    const auto d = check_assumptions(dup, make_metric(MetricFamily::euclidean), vertex_rule());
    EXPECT_FALSE(d.distinct_vertices);
    EXPECT_FALSE(d.ok_for_q());

    const auto below = check_assumptions(regular_circle(8, 1.0), make_metric(MetricFamily::mu, 1.0), vertex_rule());
    EXPECT_FALSE(below.in_domain);
}

TEST(Mesh, CurveCsvRoundTrip) {
    const auto c = perturbed_circle(13, 0.7, 1.9);
    const auto path = (std::filesystem::temp_directory_path() / "ef_mesh_roundtrip.csv").string();
    write_curve_csv(path, c);
    const auto back = read_curve_csv(path);
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(back[j], c[j]);
    std::filesystem::remove(path);
    EXPECT_THROW(read_curve_csv("/nonexistent/curve.csv"), Error);
}
