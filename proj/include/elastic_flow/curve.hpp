#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "metric.hpp"

namespace elastic_flow {

/// Closed polygon on the equipartitioned parameter mesh q_i = i / J.
///
/// Vertex i sits at q_i for i = 0..J-1 with periodic wraparound (q_J == q_0).
/// Element e spans [q_e, q_{e+1}] and joins vertex e to vertex e + 1 (mod J).
class PolygonalCurve {
public:
    PolygonalCurve() = default;

    explicit PolygonalCurve(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 3) throw ContractError("a closed polygon needs at least 3 vertices");
    }

    std::size_t size() const noexcept { return vertices_.size(); }
    double param_step() const noexcept { return 1.0 / static_cast<double>(vertices_.size()); }

    const Vec2& operator[](std::size_t i) const { return vertices_[i]; }
    Vec2& operator[](std::size_t i) { return vertices_[i]; }

    /// Periodic access, any integer index.
    const Vec2& at_wrapped(std::ptrdiff_t i) const {
        const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
        return vertices_[static_cast<std::size_t>(((i % n) + n) % n)];
    }

    std::size_t next(std::size_t i) const noexcept { return i + 1 == vertices_.size() ? 0 : i + 1; }
    std::size_t prev(std::size_t i) const noexcept { return i == 0 ? vertices_.size() - 1 : i - 1; }

    const std::vector<Vec2>& vertices() const noexcept { return vertices_; }

    double edge_length(std::size_t e) const { return (vertices_[next(e)] - vertices_[e]).norm(); }

    PolygonalCurve reversed() const {
        std::vector<Vec2> v(vertices_.rbegin(), vertices_.rend());
        return PolygonalCurve(std::move(v));
    }

private:
    std::vector<Vec2> vertices_;
};

/// Edge and vertex geometry of a polygon.
///
/// `edge_lengths[e]`, `edge_tangents[e]`, `edge_normals[e]` belong to element e.
/// `vertex_normals[i]` is omega_i = -(X_{i+1} - X_{i-1})^perp / (h_{i-1} + h_i),
/// the mass-lumped projection of the element normals; its norm is <= 1.
struct DiscreteFrame {
    std::vector<double> edge_lengths;
    std::vector<Vec2> edge_tangents;
    std::vector<Vec2> edge_normals;
    std::vector<Vec2> vertex_normals;
    std::vector<Vec2> unit_vertex_normals;

    std::size_t size() const noexcept { return edge_lengths.size(); }

    /// h_{i-1} + h_i. Half of it is the lumped arclength mass of vertex i.
    double vertex_length(std::size_t i) const {
        const std::size_t n = edge_lengths.size();
        return edge_lengths[i == 0 ? n - 1 : i - 1] + edge_lengths[i];
    }

    double vertex_normal_norm(std::size_t i) const { return vertex_normals[i].norm(); }
};

/// Throws DegenerateMeshError unless consecutive and next-nearest vertices are distinct.
inline void require_regular_mesh(const PolygonalCurve& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == c[c.next(i)]) {
            throw DegenerateMeshError("vertices " + std::to_string(i) + " and " + std::to_string(c.next(i)) +
                                          " coincide",
                                      i);
        }
        if (c[c.prev(i)] == c[c.next(i)]) {
            throw DegenerateMeshError("neighbours of vertex " + std::to_string(i) + " coincide", i);
        }
    }
}

inline DiscreteFrame frame(const PolygonalCurve& c) {
    require_regular_mesh(c);
    const std::size_t n = c.size();
    DiscreteFrame f;
    f.edge_lengths.resize(n);
    f.edge_tangents.resize(n);
    f.edge_normals.resize(n);
    f.vertex_normals.resize(n);
    f.unit_vertex_normals.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2 d = c[c.next(e)] - c[e];
        f.edge_lengths[e] = d.norm();
        f.edge_tangents[e] = d / f.edge_lengths[e];
        f.edge_normals[e] = -perp(f.edge_tangents[e]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 chord = c[c.next(i)] - c[c.prev(i)];
        f.vertex_normals[i] = -perp(chord) / f.vertex_length(i);
        f.unit_vertex_normals[i] = -perp(chord) / chord.norm();
    }
    return f;
}

/// Longest over shortest edge.
inline double mesh_ratio(const PolygonalCurve& c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t e = 0; e < c.size(); ++e) {
        const double len = c.edge_length(e);
        if (!(len > 0.0)) throw DegenerateMeshError("zero-length edge " + std::to_string(e), e);
        lo = std::min(lo, len);
        hi = std::max(hi, len);
    }
    return hi / lo;
}

inline std::pair<double, double> edge_extremes(const PolygonalCurve& c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t e = 0; e < c.size(); ++e) {
        const double len = c.edge_length(e);
        lo = std::min(lo, len);
        hi = std::max(hi, len);
    }
    return {lo, hi};
}

inline double max_edge_length(const PolygonalCurve& c) { return edge_extremes(c).second; }

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// CSV with header "x,y", one vertex per row; the closing edge is implicit.
inline void write_curve_csv(const std::string& path, const PolygonalCurve& c) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "x,y\n";
    for (const auto& v : c.vertices()) out << format_double(v.x()) << ',' << format_double(v.y()) << '\n';
}

inline PolygonalCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ContractError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") throw ContractError("'" + path + "' must start with header \"x,y\"");
    std::vector<Vec2> pts;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ContractError("row " + std::to_string(row) + ": expected two columns");
        try {
            pts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ContractError("row " + std::to_string(row) + ": not a number");
        }
    }
    return PolygonalCurve(std::move(pts));
}

}  // namespace elastic_flow
