#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "scheme.hpp"

namespace elastic_flow {

struct DiagnosticsRow {
    std::size_t step;
    double t;
    double energy;
    double ratio;
    double min_edge;
    double max_edge;
};

struct Snapshot {
    std::size_t step;
    double t;
    PolygonalCurve curve;
};

struct RunStatus {
    bool completed = false;
    std::string reason;      // empty when completed
    std::size_t step = 0;    // failing step when aborted
};

/// Row 0 describes the initial state (energy from the initialized fields on X^0).
struct RunRecord {
    std::vector<DiagnosticsRow> rows;
    std::vector<Snapshot> snapshots;
    RunStatus status;
};

inline DiagnosticsRow diagnostics(const SchemeState& s) {
    const auto [lo, hi] = edge_extremes(s.curve);
    return {s.step, s.t, energy(s), hi / lo, lo, hi};
}

using StepObserver = std::function<void(const SchemeState&)>;

/// Steps until t reaches T. `state` is left at the last valid time level.
/// snapshot_every = 0 disables snapshots; otherwise step 0 and every
/// snapshot_every-th step are kept. The observer sees every state, initial included.
inline RunRecord evolve(SchemeState& state, double dt, double T, std::size_t snapshot_every,
                        const StepObserver& observer = {}) {
    if (!(dt > 0.0)) throw ContractError("dt must be positive");
    if (!(T > 0.0)) throw ContractError("T must be positive");
    const std::size_t steps = step_count(T, dt);
    RunRecord rec;
    rec.rows.reserve(steps + 1);
    const double t0 = state.t;
    rec.rows.push_back(diagnostics(state));
    if (snapshot_every > 0) rec.snapshots.push_back({state.step, state.t, state.curve});
    if (observer) observer(state);

    for (std::size_t m = 1; m <= steps; ++m) {
        try {
            SchemeState next = step(state, dt);
            next.t = t0 + static_cast<double>(m) * dt;
            state = std::move(next);
        } catch (const StepError& e) {
            rec.status = {false, e.what(), state.step + 1};
            return rec;
        }
        rec.rows.push_back(diagnostics(state));
        if (snapshot_every > 0 && state.step % snapshot_every == 0) {
            rec.snapshots.push_back({state.step, state.t, state.curve});
        }
        if (observer) observer(state);
    }
    rec.status = {true, "", state.step};
    return rec;
}

/// max over stored steps m >= 1 of the vertex deviation from the exact circle at t_m.
/// Requires a snapshot for every step.
inline double linf_error(const RunRecord& rec, const ExactCircle& exact) {
    std::vector<double> times;
    std::vector<const PolygonalCurve*> curves;
    std::size_t expect = 1;
    for (const auto& s : rec.snapshots) {
        if (s.step == 0) continue;
        if (s.step != expect) throw ContractError("linf_error needs a snapshot at every step");
        ++expect;
        times.push_back(s.t);
        curves.push_back(&s.curve);
    }
    if (rec.rows.size() > 1 && expect != rec.rows.size()) throw ContractError("linf_error needs a snapshot at every step");
    if (times.empty()) throw ContractError("record holds no post-initial snapshots");
    const auto pts = exact.evaluate(times);
    double worst = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) worst = std::max(worst, circle_deviation(*curves[k], pts[k]));
    return worst;
}

}  // namespace elastic_flow
