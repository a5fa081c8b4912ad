#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"

namespace elastic_flow {

/// Quadrature on the reference element [0, 1].
///
/// A node `alpha` denotes the point alpha * q_start + (1 - alpha) * q_end of an
/// element, so alpha = 1 is the start vertex and alpha = 0 the end vertex.
struct QuadratureRule {
    std::string name;
    std::vector<double> nodes;
    std::vector<double> weights;
    int exactness_degree = 1;

    std::size_t size() const noexcept { return nodes.size(); }
    bool is_vertex_rule() const noexcept { return name == "vertex"; }
};

/// Trapezoidal rule at the two element ends; reproduces mass lumping.
inline QuadratureRule vertex_rule() { return {"vertex", {1.0, 0.0}, {0.5, 0.5}, 1}; }

/// Three-point Gauss-Legendre rule, exact up to degree five.
inline QuadratureRule gauss3_rule() {
    return {"gauss3",
            {0.11270166537925831, 0.5, 0.88729833462074169},
            {0.27777777777777778, 0.44444444444444444, 0.27777777777777778},
            5};
}

/// Generic I(f) = sum_e (1/J) sum_k w_k f(e, alpha_k).
template <class F>
double quad_integrate(const QuadratureRule& rule, std::size_t elements, F&& f) {
    const double h = 1.0 / static_cast<double>(elements);
    double total = 0.0;
    for (std::size_t e = 0; e < elements; ++e) {
        double local = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) local += rule.weights[k] * f(e, rule.nodes[k]);
        total += h * local;
    }
    return total;
}

/// One-sided endpoint values of a piecewise field, per element:
/// `[e][0]` at the start of element e (q_e^+), `[e][1]` at its end (q_{e+1}^-).
using ElementField = std::vector<std::array<double, 2>>;

inline ElementField from_nodal(const std::vector<double>& nodal) {
    const std::size_t n = nodal.size();
    ElementField f(n);
    for (std::size_t e = 0; e < n; ++e) f[e] = {nodal[e], nodal[e + 1 == n ? 0 : e + 1]};
    return f;
}

inline ElementField from_element_constant(const std::vector<double>& values) {
    ElementField f(values.size());
    for (std::size_t e = 0; e < values.size(); ++e) f[e] = {values[e], values[e]};
    return f;
}

inline ElementField constant_field(std::size_t elements, double value) {
    return ElementField(elements, {value, value});
}

/// |X_rho| = h_e / (1/J) on element e.
inline ElementField arc_speed(const PolygonalCurve& c) {
    ElementField f(c.size());
    const double J = static_cast<double>(c.size());
    for (std::size_t e = 0; e < c.size(); ++e) {
        const double s = c.edge_length(e) * J;
        f[e] = {s, s};
    }
    return f;
}

inline ElementField multiply(const ElementField& a, const ElementField& b) {
    if (a.size() != b.size()) throw ContractError("field length mismatch");
    ElementField r(a.size());
    for (std::size_t e = 0; e < a.size(); ++e) r[e] = {a[e][0] * b[e][0], a[e][1] * b[e][1]};
    return r;
}

/// Mass-lumped inner product (u, v)^h = (h/2) sum_e [(uv)(q_{e+1}^-) + (uv)(q_e^+)].
inline double inner_h(const PolygonalCurve& curve, const ElementField& u, const ElementField& v) {
    if (u.size() != curve.size() || v.size() != curve.size()) throw ContractError("field length mismatch");
    const double h = curve.param_step();
    double total = 0.0;
    for (std::size_t e = 0; e < u.size(); ++e) total += u[e][0] * v[e][0] + u[e][1] * v[e][1];
    return 0.5 * h * total;
}

/// Quadrature inner product (u, v)^rule, with u and v linear inside each element.
inline double inner_quad(const QuadratureRule& rule, const PolygonalCurve& curve, const ElementField& u,
                         const ElementField& v) {
    if (u.size() != curve.size() || v.size() != curve.size()) throw ContractError("field length mismatch");
    return quad_integrate(rule, curve.size(), [&](std::size_t e, double a) {
        const double ue = a * u[e][0] + (1.0 - a) * u[e][1];
        const double ve = a * v[e][0] + (1.0 - a) * v[e][1];
        return ue * ve;
    });
}

/// Interpolated curve point at local node alpha of element e.
inline Vec2 element_point(const PolygonalCurve& c, std::size_t e, double alpha) {
    return alpha * c[e] + (1.0 - alpha) * c[c.next(e)];
}

/// (1, |X_rho|_g)^rule: length of the polygon in the metric g.
inline double metric_length(const QuadratureRule& rule, const PolygonalCurve& c, const ConformalMetric& m) {
    const double J = static_cast<double>(c.size());
    return quad_integrate(rule, c.size(), [&](std::size_t e, double a) {
        return std::sqrt(m.eval_g(element_point(c, e, a))) * c.edge_length(e) * J;
    });
}

}  // namespace elastic_flow
