#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "assumptions.hpp"
#include "curve.hpp"
#include "errors.hpp"
#include "metric.hpp"
#include "quadrature.hpp"

namespace elastic_flow {

/// P: curvature kappa as unknown, mass-lumped products throughout.
/// Q: geodesic curvature kappa_g as unknown, products under a quadrature rule.
enum class SchemeKind { P, Q };

struct Scheme {
    SchemeKind kind = SchemeKind::P;
    QuadratureRule rule = vertex_rule();

    static Scheme p() { return {SchemeKind::P, vertex_rule()}; }
    static Scheme qh() { return {SchemeKind::Q, vertex_rule()}; }
    static Scheme qstar() { return {SchemeKind::Q, gauss3_rule()}; }

    std::string label() const {
        if (kind == SchemeKind::P) return "P";
        if (rule.is_vertex_rule()) return "Qh";
        if (rule.name == "gauss3") return "Qstar";
        return "Q(" + rule.name + ")";
    }
};

/// Current time level of a run.
///
/// `kappa` and `aux` hold kappa^m and Y^m for scheme P, kappa_g^m and Y_g^m for
/// scheme Q. `field_geometry` is the polygon whose frame those fields were
/// computed against: X^{m-1} after a step, X^0 for the initial state. The
/// discrete energy pairs the fields with that geometry.
struct SchemeState {
    Scheme scheme;
    ConformalMetric metric;
    double lambda = 0.0;
    double t = 0.0;
    std::size_t step = 0;
    PolygonalCurve curve;
    std::vector<double> kappa;
    std::vector<Vec2> aux;
    PolygonalCurve field_geometry;
};

/// Frame plus metric data at every vertex of a polygon.
struct NodalGeometry {
    DiscreteFrame frame;
    std::vector<double> g;
    std::vector<double> sqrt_g;
    std::vector<Vec2> grad;
    std::vector<Mat2> hess;
};

inline NodalGeometry nodal_geometry(const PolygonalCurve& c, const ConformalMetric& m) {
    NodalGeometry geo;
    geo.frame = frame(c);
    const std::size_t n = c.size();
    geo.g.resize(n);
    geo.sqrt_g.resize(n);
    geo.grad.resize(n);
    geo.hess.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!m.in_domain(c[i])) throw DomainExitError("vertex " + std::to_string(i) + " left the metric domain");
        const MetricSample s = m.sample(c[i]);
        geo.g[i] = s.g;
        geo.sqrt_g[i] = std::sqrt(s.g);
        geo.grad[i] = s.grad_ln_g;
        geo.hess[i] = s.hess_ln_g;
    }
    return geo;
}

/// Block-cyclic sparse system, `block` unknowns per vertex.
///
/// P: [X_x, X_y, Y_x, Y_y] per vertex. Q: [X_x, X_y, kappa_g, Y_x, Y_y].
struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::size_t block = 0;
};

struct LinearSolution {
    Eigen::VectorXd x;
    double residual = 0.0;           // |A x - b|
    double relative_residual = 0.0;  // |A x - b| / (1 + |b|)
};

inline constexpr double kResidualTolerance = 1e-10;

/// Direct sparse LU with one round of iterative refinement if needed.
inline LinearSolution solve(const LinearSystem& sys) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw StepError("linear system is singular: " + lu.lastErrorMessage());
    LinearSolution sol;
    sol.x = lu.solve(sys.rhs);
    Eigen::VectorXd r = sys.rhs - sys.matrix * sol.x;
    const double scale = 1.0 + sys.rhs.norm();
    if (r.norm() > kResidualTolerance * scale) {
        sol.x += lu.solve(r);
        r = sys.rhs - sys.matrix * sol.x;
    }
    sol.residual = r.norm();
    sol.relative_residual = sol.residual / scale;
    if (!sol.x.allFinite()) throw StepError("linear solve produced non-finite values");
    return sol;
}

namespace detail {

class TripletSink {
public:
    explicit TripletSink(std::size_t expected) { entries_.reserve(expected); }

    void add(std::size_t row, std::size_t col, double v) {
        entries_.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
    }

    void add_block(std::size_t row, std::size_t col, const Mat2& b) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) add(row + r, col + c, b(r, c));
    }

    Eigen::SparseMatrix<double> build(std::size_t n) const {
        Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        m.setFromTriplets(entries_.begin(), entries_.end());
        m.makeCompressed();
        return m;
    }

private:
    std::vector<Eigen::Triplet<double>> entries_;
};

inline Vec2 vec_at(const Eigen::VectorXd& v, std::size_t i) { return Vec2(v(i), v(i + 1)); }

}  // namespace detail

/// Explicit geodesic curvature of scheme P:
/// kappa_g = g^{-1/2} (kappa - 1/2 (omega/|omega|) . grad ln g), nodewise.
inline std::vector<double> geodesic_curvature_p(const std::vector<double>& kappa, const NodalGeometry& geo) {
    std::vector<double> kg(kappa.size());
    for (std::size_t j = 0; j < kappa.size(); ++j) {
        const Vec2& nh = geo.frame.unit_vertex_normals[j];
        kg[j] = (kappa[j] - 0.5 * nh.dot(geo.grad[j])) / geo.sqrt_g[j];
    }
    return kg;
}

/// Linear system of scheme P for (X^{m+1}, Y^{m+1}) with all m-level geometry frozen.
inline LinearSystem assemble_p(const SchemeState& s, const NodalGeometry& geo, double dt) {
    const std::size_t n = s.curve.size();
    const auto& f = geo.frame;
    const double lambda = s.lambda;
    detail::TripletSink sink(n * 48);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * n));
    auto x_of = [](std::size_t j) { return 4 * j; };
    auto y_of = [](std::size_t j) { return 4 * j + 2; };
    auto rhs_a = [&](std::size_t j) { return rhs.segment<2>(static_cast<Eigen::Index>(x_of(j))); };
    auto rhs_b = [&](std::size_t j) { return rhs.segment<2>(static_cast<Eigen::Index>(y_of(j))); };

    const std::vector<double> kg = geodesic_curvature_p(s.kappa, geo);
    std::vector<double> tilt(n);  // kappa_g / |omega| * grad ln g . (omega/|omega|)^perp
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2& nh = f.unit_vertex_normals[j];
        tilt[j] = kg[j] / f.vertex_normals[j].norm() * geo.grad[j].dot(perp(nh));
    }

    for (std::size_t j = 0; j < n; ++j) {
        const double mass = 0.5 * f.vertex_length(j);
        const Vec2& w = f.vertex_normals[j];
        const Vec2& nh = f.unit_vertex_normals[j];
        const double g = geo.g[j];
        const double sg = geo.sqrt_g[j];
        const Vec2& grad = geo.grad[j];
        const Mat2 ww = w * w.transpose();

        const Mat2 velocity = mass * g * sg / dt * ww;
        sink.add_block(x_of(j), x_of(j), velocity);
        rhs_a(j) += velocity * s.curve[j];
        rhs_a(j) += mass * 0.25 * sg * (kg[j] * kg[j] - 2.0 * lambda) * grad;
        rhs_a(j) += mass * 0.5 * kg[j] * (geo.hess[j] * nh);

        sink.add_block(y_of(j), y_of(j), mass * sg * ww);
        rhs_b(j) -= mass * 0.5 * nh.dot(grad) * w;
    }

    const Mat2 id = Mat2::Identity();
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t a = e;
        const std::size_t b = s.curve.next(e);
        const double he = f.edge_lengths[e];
        const Vec2& tau = f.edge_tangents[e];
        const Mat2 k = id / he;

        // -(Y_s, chi_s |X_rho|) and (X_s, eta_s |X_rho|)
        sink.add_block(x_of(a), y_of(a), -k);
        sink.add_block(x_of(a), y_of(b), k);
        sink.add_block(x_of(b), y_of(a), k);
        sink.add_block(x_of(b), y_of(b), -k);
        sink.add_block(y_of(a), x_of(a), k);
        sink.add_block(y_of(a), x_of(b), -k);
        sink.add_block(y_of(b), x_of(a), -k);
        sink.add_block(y_of(b), x_of(b), k);

        // Load vector L_e with rows a/b receiving -L_e/+L_e, i.e. (L_e, chi_b - chi_a).
        Vec2 load = Vec2::Zero();
        const double dyt = (s.aux[b] - s.aux[a]).dot(tau) / he;
        load -= dyt * tau;
        const double fa = geo.sqrt_g[a] * (kg[a] * kg[a] + 2.0 * lambda);
        const double fb = geo.sqrt_g[b] * (kg[b] * kg[b] + 2.0 * lambda);
        load -= 0.25 * (fa + fb) * tau;
        load += 0.5 * (s.kappa[a] * perp(s.aux[a]) + s.kappa[b] * perp(s.aux[b]));
        load -= 0.25 * (tilt[a] * f.unit_vertex_normals[a] + tilt[b] * f.unit_vertex_normals[b]);
        rhs_a(a) -= load;
        rhs_a(b) += load;
    }

    return {sink.build(4 * n), std::move(rhs), 4};
}

inline LinearSystem assemble_p(const SchemeState& s, double dt) {
    return assemble_p(s, nodal_geometry(s.curve, s.metric), dt);
}

/// Full linear system of scheme Q for (X^{m+1}, kappa_g^{m+1}, Y_g^{m+1}).
///
/// Metric factors are evaluated at the interpolated quadrature points of X^m;
/// the vertex normal omega^m is interpolated linearly inside each element.
inline LinearSystem assemble_q(const SchemeState& s, const NodalGeometry& geo, double dt) {
    const std::size_t n = s.curve.size();
    const auto& f = geo.frame;
    const auto& rule = s.scheme.rule;
    const double lambda = s.lambda;
    detail::TripletSink sink(n * (60 + 24 * rule.size()));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(5 * n));
    auto x_of = [](std::size_t j) { return 5 * j; };
    auto k_of = [](std::size_t j) { return 5 * j + 2; };
    auto y_of = [](std::size_t j) { return 5 * j + 3; };
    auto rhs_a = [&](std::size_t j) { return rhs.segment<2>(static_cast<Eigen::Index>(x_of(j))); };
    auto rhs_c = [&](std::size_t j) { return rhs.segment<2>(static_cast<Eigen::Index>(y_of(j))); };

    const Mat2 id = Mat2::Identity();
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t idx[2] = {e, s.curve.next(e)};
        const double dphi[2] = {-1.0, 1.0};
        const double he = f.edge_lengths[e];
        const Vec2& tau = f.edge_tangents[e];
        const Vec2& nu = f.edge_normals[e];
        const Vec2& ya = s.aux[idx[0]];
        const Vec2& yb = s.aux[idx[1]];
        const double dyt = (yb - ya).dot(tau) / he;

        double gsum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double al = rule.nodes[q];
            const double phi[2] = {al, 1.0 - al};
            const Vec2 z = al * s.curve[idx[0]] + (1.0 - al) * s.curve[idx[1]];
            if (!s.metric.in_domain(z)) {
                throw DomainExitError("quadrature point on element " + std::to_string(e) +
                                      " left the metric domain");
            }
            const MetricSample ms = s.metric.sample(z);
            const double sg = std::sqrt(ms.g);
            const double wgt = he * rule.weights[q] * sg;
            gsum += rule.weights[q] * sg;

            const Vec2 om = al * f.vertex_normals[idx[0]] + (1.0 - al) * f.vertex_normals[idx[1]];
            const double kq = al * s.kappa[idx[0]] + (1.0 - al) * s.kappa[idx[1]];
            const Vec2 yq = al * ya + (1.0 - al) * yb;
            const Mat2 oo = om * om.transpose();
            const double slope = kq * kq + 2.0 * lambda - yq.dot(ms.grad_ln_g);

            for (int i = 0; i < 2; ++i) {
                const std::size_t r = idx[i];
                for (int l = 0; l < 2; ++l) {
                    const std::size_t c = idx[l];
                    const double pp = wgt * phi[i] * phi[l];
                    sink.add_block(x_of(r), x_of(c), pp * ms.g / dt * oo);
                    sink.add(k_of(r), k_of(c), pp);
                    sink.add(k_of(r), y_of(c), -pp * sg * nu.x());
                    sink.add(k_of(r), y_of(c) + 1, -pp * sg * nu.y());
                    sink.add(y_of(r), k_of(c), pp * sg * nu.x());
                    sink.add(y_of(r) + 1, k_of(c), pp * sg * nu.y());
                }
                rhs_a(r) += wgt * ms.g * phi[i] / dt * om.dot(z) * om;
                rhs_a(r) -= 0.5 * wgt * slope * (dphi[i] / he * tau + 0.5 * phi[i] * ms.grad_ln_g);
                rhs_a(r) += 0.5 * wgt * phi[i] * (ms.hess_ln_g * yq);
                rhs_a(r) += wgt * (sg * kq * yq.dot(nu) + 0.5 * dyt) * phi[i] * ms.grad_ln_g;
                rhs_a(r) += wgt * sg * kq * dphi[i] / he * perp(yq);
                rhs_c(r) -= 0.5 * wgt * phi[i] * ms.grad_ln_g;
            }
        }

        const Mat2 k = gsum / he * id;
        const std::size_t a = idx[0];
        const std::size_t b = idx[1];
        sink.add_block(x_of(a), y_of(a), -k);
        sink.add_block(x_of(a), y_of(b), k);
        sink.add_block(x_of(b), y_of(a), k);
        sink.add_block(x_of(b), y_of(b), -k);
        sink.add_block(y_of(a), x_of(a), k);
        sink.add_block(y_of(a), x_of(b), -k);
        sink.add_block(y_of(b), x_of(a), -k);
        sink.add_block(y_of(b), x_of(b), k);
        rhs_a(a) += gsum * dyt * tau;
        rhs_a(b) -= gsum * dyt * tau;
    }

    return {sink.build(5 * n), std::move(rhs), 5};
}

inline LinearSystem assemble_q(const SchemeState& s, double dt) {
    return assemble_q(s, nodal_geometry(s.curve, s.metric), dt);
}

/// Eliminates kappa_g = g^{1/2} Y_g . omega (vertex rule only) from the full
/// Q system, leaving [X_x, X_y, Y_x, Y_y] per vertex.
inline LinearSystem reduce_vertex_rule(const LinearSystem& full, const NodalGeometry& geo) {
    const std::size_t n = geo.frame.size();
    using Sp = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> st;
    std::vector<Eigen::Triplet<double>> rt;
    st.reserve(6 * n);
    rt.reserve(4 * n);
    for (std::size_t j = 0; j < n; ++j) {
        const int f5 = static_cast<int>(5 * j);
        const int r4 = static_cast<int>(4 * j);
        const Vec2 w = geo.sqrt_g[j] * geo.frame.vertex_normals[j];
        st.emplace_back(f5, r4, 1.0);
        st.emplace_back(f5 + 1, r4 + 1, 1.0);
        st.emplace_back(f5 + 2, r4 + 2, w.x());
        st.emplace_back(f5 + 2, r4 + 3, w.y());
        st.emplace_back(f5 + 3, r4 + 2, 1.0);
        st.emplace_back(f5 + 4, r4 + 3, 1.0);
        rt.emplace_back(r4, f5, 1.0);
        rt.emplace_back(r4 + 1, f5 + 1, 1.0);
        rt.emplace_back(r4 + 2, f5 + 3, 1.0);
        rt.emplace_back(r4 + 3, f5 + 4, 1.0);
    }
    const auto N5 = static_cast<Eigen::Index>(5 * n);
    const auto N4 = static_cast<Eigen::Index>(4 * n);
    Sp subst(N5, N4);
    subst.setFromTriplets(st.begin(), st.end());
    Sp select(N4, N5);
    select.setFromTriplets(rt.begin(), rt.end());
    LinearSystem red;
    red.matrix = select * full.matrix * subst;
    red.matrix.makeCompressed();
    red.rhs = select * full.rhs;
    red.block = 4;
    return red;
}

namespace detail {

inline void require_step_assumptions(const SchemeState& s) {
    const AssumptionReport rep = check_assumptions(s.curve, s.metric, s.scheme.rule);
    if (!rep.in_domain) throw DomainExitError(rep.message);
    const bool ok = s.scheme.kind == SchemeKind::P ? rep.ok_for_p() : rep.ok_for_q();
    if (!ok) throw StepError("assumption violated: " + rep.message);
}

inline PolygonalCurve extract_curve(const Eigen::VectorXd& x, std::size_t n, std::size_t block,
                                    const ConformalMetric& metric) {
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        pts[j] = vec_at(x, block * j);
        if (!metric.in_domain(pts[j])) {
            throw DomainExitError("vertex " + std::to_string(j) + " left the metric domain");
        }
    }
    return PolygonalCurve(std::move(pts));
}

}  // namespace detail

/// One step of scheme P: solve for (X^{m+1}, Y^{m+1}), then set
/// kappa^{m+1} = g^{1/2} Y^{m+1} . omega^m + 1/2 (omega^m/|omega^m|) . grad ln g.
inline SchemeState step_p(const SchemeState& s, double dt, LinearSolution* out = nullptr) {
    if (s.scheme.kind != SchemeKind::P) throw ContractError("step_p called on a Q state");
    if (!(dt > 0.0)) throw ContractError("time step must be positive");
    detail::require_step_assumptions(s);
    const NodalGeometry geo = nodal_geometry(s.curve, s.metric);
    const LinearSolution sol = solve(assemble_p(s, geo, dt));
    if (sol.relative_residual > kResidualTolerance) throw StepError("linear solve residual too large");

    const std::size_t n = s.curve.size();
    SchemeState next = s;
    next.curve = detail::extract_curve(sol.x, n, 4, s.metric);
    next.field_geometry = s.curve;
    for (std::size_t j = 0; j < n; ++j) {
        next.aux[j] = detail::vec_at(sol.x, 4 * j + 2);
        next.kappa[j] = geo.sqrt_g[j] * next.aux[j].dot(geo.frame.vertex_normals[j]) +
                        0.5 * geo.frame.unit_vertex_normals[j].dot(geo.grad[j]);
    }
    next.t = s.t + dt;
    next.step = s.step + 1;
    if (out) *out = sol;
    return next;
}

/// The linear system a step of `s` would solve, after the assumption checks.
inline LinearSystem step_system(const SchemeState& s, double dt) {
    if (!(dt > 0.0)) throw ContractError("time step must be positive");
    detail::require_step_assumptions(s);
    const NodalGeometry geo = nodal_geometry(s.curve, s.metric);
    if (s.scheme.kind == SchemeKind::P) return assemble_p(s, geo, dt);
    LinearSystem full = assemble_q(s, geo, dt);
    return s.scheme.rule.is_vertex_rule() ? reduce_vertex_rule(full, geo) : full;
}

/// One step of scheme Q. With the vertex rule kappa_g^{m+1} is eliminated
/// first and recovered as g^{1/2} Y_g^{m+1} . omega^m.
inline SchemeState step_q(const SchemeState& s, double dt, LinearSolution* out = nullptr) {
    if (s.scheme.kind != SchemeKind::Q) throw ContractError("step_q called on a P state");
    if (!(dt > 0.0)) throw ContractError("time step must be positive");
    detail::require_step_assumptions(s);
    const NodalGeometry geo = nodal_geometry(s.curve, s.metric);
    const LinearSystem full = assemble_q(s, geo, dt);

    const std::size_t n = s.curve.size();
    SchemeState next = s;
    LinearSolution sol;
    if (s.scheme.rule.is_vertex_rule()) {
        sol = solve(reduce_vertex_rule(full, geo));
        if (sol.relative_residual > kResidualTolerance) throw StepError("linear solve residual too large");
        next.curve = detail::extract_curve(sol.x, n, 4, s.metric);
        for (std::size_t j = 0; j < n; ++j) {
            next.aux[j] = detail::vec_at(sol.x, 4 * j + 2);
            next.kappa[j] = geo.sqrt_g[j] * next.aux[j].dot(geo.frame.vertex_normals[j]);
        }
    } else {
        sol = solve(full);
        if (sol.relative_residual > kResidualTolerance) throw StepError("linear solve residual too large");
        next.curve = detail::extract_curve(sol.x, n, 5, s.metric);
        for (std::size_t j = 0; j < n; ++j) {
            next.kappa[j] = sol.x(static_cast<Eigen::Index>(5 * j + 2));
            next.aux[j] = detail::vec_at(sol.x, 5 * j + 3);
        }
    }
    next.field_geometry = s.curve;
    next.t = s.t + dt;
    next.step = s.step + 1;
    if (out) *out = sol;
    return next;
}

inline SchemeState step(const SchemeState& s, double dt) {
    return s.scheme.kind == SchemeKind::P ? step_p(s, dt) : step_q(s, dt);
}

/// Discrete curvature vector of a polygon: 2 (tau_i - tau_{i-1}) / (h_{i-1} + h_i).
inline std::vector<Vec2> curvature_vector(const DiscreteFrame& f) {
    const std::size_t n = f.size();
    std::vector<Vec2> kv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = i == 0 ? n - 1 : i - 1;
        kv[i] = 2.0 * (f.edge_tangents[i] - f.edge_tangents[l]) / f.vertex_length(i);
    }
    return kv;
}

/// Initial curvature fields for either scheme.
inline SchemeState init_state(const Scheme& scheme, const ConformalMetric& metric, const PolygonalCurve& x0,
                              double lambda = 0.0) {
    const AssumptionReport rep = check_assumptions(x0, metric, scheme.rule);
    const bool ok = scheme.kind == SchemeKind::P ? rep.ok_for_p() : rep.ok_for_q();
    if (!ok) throw StepError("initial curve rejected: " + rep.message);

    const NodalGeometry geo = nodal_geometry(x0, metric);
    const std::size_t n = x0.size();
    const std::vector<Vec2> kv = curvature_vector(geo.frame);

    SchemeState s;
    s.scheme = scheme;
    s.metric = metric;
    s.lambda = lambda;
    s.curve = x0;
    s.field_geometry = x0;
    s.kappa.resize(n);
    s.aux.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2& w = geo.frame.vertex_normals[j];
        const Vec2& nh = geo.frame.unit_vertex_normals[j];
        const double k0 = kv[j].dot(nh);
        const double kg0 = (k0 - 0.5 * nh.dot(geo.grad[j])) / geo.sqrt_g[j];
        const Vec2 y0 = kg0 / w.squaredNorm() * w;
        if (scheme.kind == SchemeKind::P) {
            s.kappa[j] = k0;
            s.aux[j] = y0;
        } else {
            s.kappa[j] = kg0;
            s.aux[j] = y0 / geo.sqrt_g[j];
        }
    }
    return s;
}

/// Geodesic curvature kappa_g held by (or derived from) a state, per vertex.
inline std::vector<double> geodesic_curvature(const SchemeState& s) {
    if (s.scheme.kind == SchemeKind::Q) return s.kappa;
    return geodesic_curvature_p(s.kappa, nodal_geometry(s.curve, s.metric));
}

/// Discrete energy paired with the geometry that produced the fields:
///   P: 1/2 ((Y . omega)^2 + 2 lambda, g^{1/2} |X_rho|)^h
///   Q: 1/2 (kappa_g^2 + 2 lambda, |X_rho|_g)^rule
inline double energy(const SchemeState& s) {
    const PolygonalCurve& c = s.field_geometry;
    const std::size_t n = c.size();
    if (s.scheme.kind == SchemeKind::P) {
        const NodalGeometry geo = nodal_geometry(c, s.metric);
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double yw = s.aux[j].dot(geo.frame.vertex_normals[j]);
            total += 0.5 * geo.frame.vertex_length(j) * 0.5 * (yw * yw + 2.0 * s.lambda) * geo.sqrt_g[j];
        }
        return total;
    }
    const auto& rule = s.scheme.rule;
    double total = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t b = c.next(e);
        const double he = c.edge_length(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double al = rule.nodes[q];
            const double kq = al * s.kappa[e] + (1.0 - al) * s.kappa[b];
            const double sg = std::sqrt(s.metric.eval_g(element_point(c, e, al)));
            total += he * rule.weights[q] * sg * 0.5 * (kq * kq + 2.0 * s.lambda);
        }
    }
    return total;
}

}  // namespace elastic_flow
