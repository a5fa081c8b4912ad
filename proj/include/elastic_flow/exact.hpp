#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "curve.hpp"
#include "errors.hpp"

namespace elastic_flow {

/// Circle solution a(t) e_2 + r(t) (cos 2 pi rho, sin 2 pi rho) of elastic flow.
///
/// alpha family: d/dt r^4 = (1/8)(1 - alpha^2 r^4)(1 - 6 alpha r^2 + alpha^2 r^4), a = 0.
/// hyperbolic plane: sigma = a / r solves sigma' = sigma (1 - sigma^2 / 2)(sigma^2 - 1)
/// and a(t) = a0 exp(-t + 1/2 int_0^t sigma^2).
class ExactCircle {
public:
    enum class Kind { alpha_family, hyperbolic_plane };

    struct Point {
        double a;
        double r;
    };

    static ExactCircle alpha(double alpha, double r0) {
        if (!(r0 > 0.0)) throw ContractError("r0 must be positive");
        if (alpha > 0.0 && !(alpha * r0 * r0 < 1.0)) throw ContractError("circle must lie inside the disk");
        return ExactCircle(Kind::alpha_family, alpha, r0, 0.0);
    }

    static ExactCircle hyperbolic(double a0, double r0) {
        if (!(r0 > 0.0) || !(a0 > r0)) throw ContractError("need a0 > r0 > 0");
        return ExactCircle(Kind::hyperbolic_plane, 0.0, r0, a0);
    }

    Kind kind() const noexcept { return kind_; }
    double alpha_parameter() const noexcept { return alpha_; }
    double r0() const noexcept { return r0_; }
    double a0() const noexcept { return a0_; }

    /// (a, r) at each of the nondecreasing, nonnegative `times`.
    std::vector<Point> evaluate(const std::vector<double>& times, double tol = 1e-12) const {
        if (!std::is_sorted(times.begin(), times.end())) throw ContractError("times must be sorted");
        if (!times.empty() && times.front() < 0.0) throw ContractError("times must be nonnegative");
        std::vector<double> grid;
        grid.reserve(times.size() + 1);
        grid.push_back(0.0);
        grid.insert(grid.end(), times.begin(), times.end());
        std::vector<Point> out;
        out.reserve(times.size());
        const double dt0 = std::min(1e-3, grid.back() > 0.0 ? grid.back() / 16.0 : 1e-3);

        using namespace boost::numeric::odeint;
        using State = std::array<double, 2>;
        auto stepper = make_controlled(tol, tol, runge_kutta_fehlberg78<State>());

        try {
            if (kind_ == Kind::alpha_family) {
                const double al = alpha_;
                auto rhs = [al](const State& x, State& dx, double) {
                    const double u = x[0];
                    const double r2 = std::sqrt(std::max(u, 0.0));
                    dx[0] = 0.125 * (1.0 - al * al * u) * (1.0 - 6.0 * al * r2 + al * al * u);
                    dx[1] = 0.0;
                };
                State x{std::pow(r0_, 4), 0.0};
                bool first = true;
                integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, [&](const State& s, double) {
                    if (first) {
                        first = false;
                        return;
                    }
                    if (!(s[0] > 0.0)) throw NumericalError("radius collapsed to zero");
                    out.push_back({0.0, std::pow(s[0], 0.25)});
                });
            } else {
                auto rhs = [](const State& x, State& dx, double) {
                    const double s = x[0];
                    dx[0] = s * (1.0 - 0.5 * s * s) * (s * s - 1.0);
                    dx[1] = s * s;
                };
                State x{a0_ / r0_, 0.0};
                bool first = true;
                integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, [&](const State& s, double t) {
                    if (!(s[0] > 1.0)) throw DomainExitError("exact circle left the upper half plane");
                    if (first) {
                        first = false;
                        return;
                    }
                    const double a = a0_ * std::exp(-t + 0.5 * s[1]);
                    out.push_back({a, a / s[0]});
                });
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalError(std::string("ode integration failed: ") + e.what());
        }
        if (out.size() != times.size()) throw NumericalError("ode integration returned too few samples");
        for (const auto& p : out) {
            if (!std::isfinite(p.a) || !std::isfinite(p.r)) throw NumericalError("ode integration diverged");
        }
        return out;
    }

    Point at(double t, double tol = 1e-12) const { return evaluate({t}, tol).front(); }

private:
    ExactCircle(Kind k, double alpha, double r0, double a0) : kind_(k), alpha_(alpha), r0_(r0), a0_(a0) {}

    Kind kind_;
    double alpha_;
    double r0_;
    double a0_;
};

inline double exact_alpha(double alpha, double r0, double t) { return ExactCircle::alpha(alpha, r0).at(t).r; }

inline std::pair<double, double> exact_hyperbolic(double a0, double r0, double t) {
    const auto p = ExactCircle::hyperbolic(a0, r0).at(t);
    return {p.a, p.r};
}

/// a0 e_2 + r0 (cos phi_j, sin phi_j) with phi_j = 2 pi q_j + 0.1 sin(2 pi q_j).
inline PolygonalCurve perturbed_circle(std::size_t J, double r0, double a0) {
    if (J < 3) throw ContractError("need J >= 3");
    if (!(r0 > 0.0)) throw ContractError("r0 must be positive");
    std::vector<Vec2> pts(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(J);
        const double phi = th + 0.1 * std::sin(th);
        pts[j] = Vec2(r0 * std::cos(phi), a0 + r0 * std::sin(phi));
    }
    return PolygonalCurve(std::move(pts));
}

inline PolygonalCurve regular_circle(std::size_t J, double r, const Vec2& center = Vec2::Zero()) {
    if (J < 3) throw ContractError("need J >= 3");
    std::vector<Vec2> pts(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(J);
        pts[j] = center + r * Vec2(std::cos(th), std::sin(th));
    }
    return PolygonalCurve(std::move(pts));
}

/// max_j | |X_j - a e_2| - r |.
inline double circle_deviation(const PolygonalCurve& c, const ExactCircle::Point& p) {
    double worst = 0.0;
    const Vec2 centre(0.0, p.a);
    for (const auto& v : c.vertices()) worst = std::max(worst, std::abs((v - centre).norm() - p.r));
    return worst;
}

/// Running L-infinity trajectory error against precomputed exact samples at t_m = m dt.
class LinfAccumulator {
public:
    LinfAccumulator(const ExactCircle& exact, double dt, std::size_t steps) {
        std::vector<double> times(steps);
        for (std::size_t m = 0; m < steps; ++m) times[m] = static_cast<double>(m + 1) * dt;
        samples_ = exact.evaluate(times);
    }

    /// Folds in the polygon of step m >= 1.
    void observe(std::size_t m, const PolygonalCurve& c) {
        if (m == 0) return;
        if (m > samples_.size()) throw ContractError("step beyond the precomputed exact trajectory");
        error_ = std::max(error_, circle_deviation(c, samples_[m - 1]));
        ++count_;
    }

    double error() const noexcept { return error_; }
    std::size_t observed() const noexcept { return count_; }
    std::size_t expected() const noexcept { return samples_.size(); }

private:
    std::vector<ExactCircle::Point> samples_;
    double error_ = 0.0;
    std::size_t count_ = 0;
};

/// EOC_k = ln(e_{k-1} / e_k) / ln(h_{k-1} / h_k).
inline std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2) throw ContractError("need two or more matching levels");
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!(errors[k] > 0.0) || !(hs[k] > 0.0)) throw ContractError("errors and mesh sizes must be positive");
    }
    std::vector<double> out;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        out.push_back(std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]));
    }
    return out;
}

/// Number of steps of size dt to reach T; the 1e-9 slack absorbs round-off in T / dt.
inline std::size_t step_count(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw ContractError("T and dt must be positive");
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

/// dt = 0.1 h^2 with h the longest edge of the initial polygon.
inline double dt_rule(const PolygonalCurve& x0) {
    const double h = max_edge_length(x0);
    return 0.1 * h * h;
}

}  // namespace elastic_flow
