#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "curve.hpp"
#include "metric.hpp"
#include "quadrature.hpp"

namespace elastic_flow {

/// Diagnostics for the three well-posedness conditions of a polygon:
///  - `distinct_vertices`: neighbours and next-nearest neighbours differ,
///  - `normals_span`: positive edge lengths, omega_i != 0 and span{omega_i} = R^2
///    (solvability of the kappa-based scheme),
///  - `weighted_normals_span`: the g-weighted normal moments
///    (g^{1/2} nu, chi_i |X_rho|_g)^rule span R^2 (kappa_g-based scheme).
struct AssumptionReport {
    bool distinct_vertices = false;
    bool normals_span = false;
    bool weighted_normals_span = false;
    bool in_domain = false;
    std::string message;

    bool ok_for_p() const { return distinct_vertices && normals_span && in_domain; }
    bool ok_for_q() const { return ok_for_p() && weighted_normals_span; }
};

namespace detail {

// rank 2 iff sigma_min > 1e-10 * sigma_max
inline bool spans_plane(const Eigen::Matrix<double, 2, Eigen::Dynamic>& vectors) {
    if (vectors.cols() < 2) return false;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 && s(1) > 1e-10 * s(0);
}

}  // namespace detail

inline AssumptionReport check_assumptions(const PolygonalCurve& curve, const ConformalMetric& metric,
                                          const QuadratureRule& rule) {
    AssumptionReport r;
    const std::size_t n = curve.size();

    r.in_domain = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!metric.in_domain(curve[i])) {
            r.in_domain = false;
            r.message = "vertex " + std::to_string(i) + " lies outside the metric domain";
            break;
        }
    }

    try {
        require_regular_mesh(curve);
        r.distinct_vertices = true;
    } catch (const DegenerateMeshError& e) {
        if (r.message.empty()) r.message = e.what();
        return r;
    }

    const DiscreteFrame f = frame(curve);
    bool ok = true;
    Eigen::Matrix<double, 2, Eigen::Dynamic> omegas(2, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(f.edge_lengths[i] > 0.0)) ok = false;
        if (f.vertex_normals[i].norm() == 0.0) ok = false;
        omegas.col(static_cast<Eigen::Index>(i)) = f.vertex_normals[i];
    }
    r.normals_span = ok && detail::spans_plane(omegas);
    if (!r.normals_span && r.message.empty()) r.message = "vertex normals do not span the plane";

    if (!r.in_domain) return r;

    Eigen::Matrix<double, 2, Eigen::Dynamic> moments = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n);
    const double J = static_cast<double>(n);
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t b = curve.next(e);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const double a = rule.nodes[k];
            const Vec2 z = element_point(curve, e, a);
            if (!metric.in_domain(z)) {
                r.in_domain = false;
                r.message = "quadrature point on element " + std::to_string(e) + " lies outside the metric domain";
                return r;
            }
            // (1/J) w_k g^{1/2} * g^{1/2} |X_rho| nu chi_i
            const double w = rule.weights[k] / J * metric.eval_g(z) * f.edge_lengths[e] * J;
            moments.col(static_cast<Eigen::Index>(e)) += w * a * f.edge_normals[e];
            moments.col(static_cast<Eigen::Index>(b)) += w * (1.0 - a) * f.edge_normals[e];
        }
    }
    r.weighted_normals_span = detail::spans_plane(moments);
    if (!r.weighted_normals_span && r.message.empty()) r.message = "weighted normal moments do not span the plane";
    return r;
}

}  // namespace elastic_flow
