#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "errors.hpp"

namespace elastic_flow {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// Clockwise quarter turn, (a, b) -> (b, -a).
inline Vec2 perp(const Vec2& v) { return Vec2(v.y(), -v.x()); }

enum class MetricFamily { euclidean, mu, alpha, mercator, catenoid, torus };

inline std::string_view family_name(MetricFamily f) {
    switch (f) {
        case MetricFamily::euclidean: return "euclidean";
        case MetricFamily::mu: return "mu";
        case MetricFamily::alpha: return "alpha";
        case MetricFamily::mercator: return "mercator";
        case MetricFamily::catenoid: return "catenoid";
        case MetricFamily::torus: return "torus";
    }
    return "unknown";
}

inline std::optional<MetricFamily> parse_family(std::string_view name) {
    for (auto f : {MetricFamily::euclidean, MetricFamily::mu, MetricFamily::alpha,
                   MetricFamily::mercator, MetricFamily::catenoid, MetricFamily::torus}) {
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

/// Everything the schemes need from the metric at one point.
struct MetricSample {
    double g;
    Vec2 grad_ln_g;
    Mat2 hess_ln_g;
};

/// Conformally flat metric g(z) (v . w) on an open set H of the plane.
///
/// The weight g, its log-gradient and log-Hessian are closed-form per family.
/// Domain membership is strict: the mu family lives on the open upper half
/// plane, the alpha family with alpha > 0 on the open disk of radius
/// alpha^{-1/2}; everything else on all of R^2.
///
/// Immutable after construction.
class ConformalMetric {
public:
    ConformalMetric() = default;

    ConformalMetric(MetricFamily family, double parameter) : family_(family), param_(parameter) {
        if (family_ == MetricFamily::torus) {
            if (!(param_ > 0.0)) throw ParameterError("torus metric requires s > 0");
            torus_c_ = std::sqrt(param_ * param_ + 1.0);
        }
        if (!std::isfinite(param_)) throw ParameterError("metric parameter must be finite");
    }

    MetricFamily family() const noexcept { return family_; }
    double parameter() const noexcept { return param_; }
    std::string_view name() const { return family_name(family_); }

    bool in_domain(const Vec2& z) const {
        if (!z.allFinite()) return false;
        switch (family_) {
            case MetricFamily::mu: return z.y() > 0.0;
            case MetricFamily::alpha: return param_ <= 0.0 || param_ * z.squaredNorm() < 1.0;
            default: return true;
        }
    }

    double eval_g(const Vec2& z) const {
        require_domain(z);
        switch (family_) {
            case MetricFamily::euclidean: return 1.0;
            case MetricFamily::mu: return std::pow(z.y(), -2.0 * param_);
            case MetricFamily::alpha: {
                const double d = 1.0 - param_ * z.squaredNorm();
                return 4.0 / (d * d);
            }
            case MetricFamily::mercator: {
                const double c = std::cosh(z.x());
                return 1.0 / (c * c);
            }
            case MetricFamily::catenoid: {
                const double c = std::cosh(z.x());
                return c * c;
            }
            case MetricFamily::torus: {
                const double d = torus_c_ - std::cos(z.y());
                return param_ * param_ / (d * d);
            }
        }
        return 1.0;
    }

    Vec2 grad_ln_g(const Vec2& z) const {
        require_domain(z);
        switch (family_) {
            case MetricFamily::euclidean: return Vec2::Zero();
            case MetricFamily::mu: return Vec2(0.0, -2.0 * param_ / z.y());
            case MetricFamily::alpha: return 4.0 * param_ / (1.0 - param_ * z.squaredNorm()) * z;
            case MetricFamily::mercator: return Vec2(-2.0 * std::tanh(z.x()), 0.0);
            case MetricFamily::catenoid: return Vec2(2.0 * std::tanh(z.x()), 0.0);
            case MetricFamily::torus:
                return Vec2(0.0, -2.0 * std::sin(z.y()) / (torus_c_ - std::cos(z.y())));
        }
        return Vec2::Zero();
    }

    Mat2 hess_ln_g(const Vec2& z) const {
        require_domain(z);
        Mat2 h = Mat2::Zero();
        switch (family_) {
            case MetricFamily::euclidean: break;
            case MetricFamily::mu: h(1, 1) = 2.0 * param_ / (z.y() * z.y()); break;
            case MetricFamily::alpha: {
                const double d = 1.0 - param_ * z.squaredNorm();
                h = 4.0 * param_ / d * Mat2::Identity() + 8.0 * param_ * param_ / (d * d) * z * z.transpose();
                break;
            }
            case MetricFamily::mercator: {
                const double c = std::cosh(z.x());
                h(0, 0) = -2.0 / (c * c);
                break;
            }
            case MetricFamily::catenoid: {
                const double c = std::cosh(z.x());
                h(0, 0) = 2.0 / (c * c);
                break;
            }
            case MetricFamily::torus: {
                const double d = torus_c_ - std::cos(z.y());
                h(1, 1) = 2.0 * (1.0 - torus_c_ * std::cos(z.y())) / (d * d);
                break;
            }
        }
        return h;
    }

    MetricSample sample(const Vec2& z) const { return {eval_g(z), grad_ln_g(z), hess_ln_g(z)}; }

    /// Gauss curvature S0 = -(Laplacian ln g) / (2 g).
    double sectional_curvature(const Vec2& z) const { return -hess_ln_g(z).trace() / (2.0 * eval_g(z)); }

    bool has_embedding() const {
        switch (family_) {
            case MetricFamily::mercator:
            case MetricFamily::catenoid:
            case MetricFamily::torus: return true;
            case MetricFamily::alpha: return param_ == -1.0;
            default: return false;
        }
    }

    /// Conformal parameterization Phi : H -> R^3 with |d1 Phi|^2 = |d2 Phi|^2 = g.
    Vec3 embed(const Vec2& z) const {
        if (!has_embedding()) {
            throw UnsupportedEmbeddingError("metric '" + std::string(name()) + "' has no embedding into R^3");
        }
        require_domain(z);
        const double x = z.x();
        const double y = z.y();
        switch (family_) {
            case MetricFamily::mercator:
                return Vec3(std::cos(y), std::sin(y), std::sinh(x)) / std::cosh(x);
            case MetricFamily::catenoid:
                return Vec3(std::cosh(x) * std::cos(y), std::cosh(x) * std::sin(y), x);
            case MetricFamily::torus: {
                const double s = param_;
                return s / (torus_c_ - std::cos(y)) * Vec3(s * std::cos(x / s), s * std::sin(x / s), std::sin(y));
            }
            case MetricFamily::alpha: {
                // stereographic projection from the north pole
                const double n2 = z.squaredNorm();
                return Vec3(2.0 * x, 2.0 * y, n2 - 1.0) / (1.0 + n2);
            }
            default: break;
        }
        return Vec3::Zero();
    }

private:
    void require_domain(const Vec2& z) const {
        if (!in_domain(z)) {
            std::ostringstream os;
            os << "point (" << z.x() << ", " << z.y() << ") outside the domain of metric '" << name() << "'";
            throw DomainError(os.str());
        }
    }

    MetricFamily family_ = MetricFamily::euclidean;
    double param_ = 0.0;
    double torus_c_ = 0.0;
};

inline ConformalMetric make_metric(MetricFamily family, double parameter = 0.0) {
    return ConformalMetric(family, parameter);
}

}  // namespace elastic_flow
