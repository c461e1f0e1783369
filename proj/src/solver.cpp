#include "contrastbnb/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cbnb {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

bool upper_less(const Branch& a, const Branch& b) { return a.upper < b.upper; }

bool bounds_agree(const Branch& b, double tol) {
    return b.upper - b.lower <= tol * std::max(1.0, std::abs(b.upper));
}

bool width_converged(const SearchSpace& s, const SolverConfig& cfg) {
    const bool w_ok = s.omega_width() <= cfg.width_eps_omega;
    const bool v_ok = s.v_width() <= cfg.width_eps_v;
    return cfg.termination_mode == TerminationMode::EitherWidth ? (w_ok || v_ok)
                                                                : (w_ok && v_ok);
}

std::vector<SearchSpace> split(const SearchSpace& s, SplitRule rule) {
    const double wm = 0.5 * (s.omega_min + s.omega_max);
    const double vm = 0.5 * (s.v_min + s.v_max);
    if (rule == SplitRule::Quad) {
        return {{s.omega_min, wm, s.v_min, vm},
                {wm, s.omega_max, s.v_min, vm},
                {s.omega_min, wm, vm, s.v_max},
                {wm, s.omega_max, vm, s.v_max}};
    }
    if (s.omega_width() >= s.v_width()) {
        return {{s.omega_min, wm, s.v_min, s.v_max}, {wm, s.omega_max, s.v_min, s.v_max}};
    }
    return {{s.omega_min, s.omega_max, s.v_min, vm}, {s.omega_min, s.omega_max, vm, s.v_max}};
}

}  // namespace

std::string termination_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::Converged: return "converged";
        case TerminationReason::Width: return "width";
        case TerminationReason::Limit: return "limit";
    }
    return "?";
}

std::size_t prune(std::vector<Branch>& queue, double incumbent, double tol) {
    return prune_below(queue, incumbent + tol * std::abs(incumbent));
}

std::size_t prune_below(std::vector<Branch>& queue, double threshold) {
    const auto it = std::remove_if(queue.begin(), queue.end(),
                                   [&](const Branch& b) { return b.upper <= threshold; });
    const std::size_t removed = static_cast<std::size_t>(queue.end() - it);
    queue.erase(it, queue.end());
    std::make_heap(queue.begin(), queue.end(), upper_less);
    return removed;
}

SolveReport solve(const EventWindow& window, const SearchSpace& theta0_space,
                  const LossSpec& loss, const SolverConfig& cfg, const RigGeometry& rig,
                  const CameraIntrinsics& K, const GridSpec& spec) {
    if (window.empty()) {
        throw std::invalid_argument("solve: empty event window");
    }
    const double w_abs =
        std::max(std::abs(theta0_space.omega_min), std::abs(theta0_space.omega_max));
    if (w_abs * window.duration >= kHalfPi) {
        throw IntervalTooWideError("interval too wide: |omega|_max * dT must stay below pi/2");
    }

    const auto t_start = std::chrono::steady_clock::now();
    SolveReport report;

    const auto [root_lo, root_hi] = rb(window, theta0_space, loss, rig, K, spec);
    Branch best{theta0_space, root_lo, root_hi};
    double incumbent = root_lo;

    // For lattice-valued losses any branch that could strictly beat the
    // incumbent (an attained value) must exceed it by a full quantum, so a
    // half-quantum slack in the dominance test discards only ties.
    const double slack =
        0.5 * loss_quantum(loss, static_cast<double>(spec.total_cells()));
    const auto dominance_threshold = [&](double inc) {
        return inc + std::max(cfg.bound_eq_tol * std::abs(inc), slack);
    };

    std::vector<Branch> queue;
    queue.push_back(best);

    // A branch meeting the width criterion is retired as a leaf instead of
    // split further; the main phase continues until every queued branch is
    // either pruned or retired, so the incumbent dominates the whole search
    // space at the width resolution. Leaves whose upper bound still exceeds
    // the incumbent are then refined further (second phase): splitting them
    // shrinks every event's pixel box until it falls inside a single
    // accumulator cell, at which point the bounds coincide and the region is
    // either certified or pruned. On completion no unexplored region can beat
    // the incumbent beyond the pruning tolerance.
    constexpr double kWidthFloor = 1e-9;
    bool saw_leaf = false;
    bool hit_limit = false;
    bool early_convergence = false;
    std::vector<Branch> leaves;
    int iter = 0;
    for (int phase = 0; phase < 2; ++phase) {
        if (phase == 1) {
            if (hit_limit || early_convergence) break;
            queue.swap(leaves);
            std::make_heap(queue.begin(), queue.end(), upper_less);
        }
        while (true) {
            if (phase == 0 && bounds_agree(best, cfg.bound_eq_tol)) {
                early_convergence = true;
                break;
            }
            if (queue.empty()) {
                break;
            }
            std::pop_heap(queue.begin(), queue.end(), upper_less);
            const Branch node = queue.back();
            queue.pop_back();

            if (node.upper <= dominance_threshold(incumbent)) {
                ++report.branches_pruned;
                continue;
            }
            if (phase == 0 && width_converged(node.space, cfg)) {
                saw_leaf = true;
                leaves.push_back(node);
                continue;
            }
            if (phase == 1 &&
                node.space.omega_width() <= kWidthFloor && node.space.v_width() <= kWidthFloor) {
                continue;
            }
            if (iter >= cfg.branching_limit) {
                hit_limit = true;
                break;
            }
            ++iter;

            for (const SearchSpace& sub : split(node.space, cfg.split_rule)) {
                const auto [lo, hi] = rb(window, sub, loss, rig, K, spec);
                ++report.branches_explored;
                Branch child{sub, lo, hi};
                if (lo > incumbent) {
                    incumbent = lo;
                    best = child;
                }
                queue.push_back(child);
                std::push_heap(queue.begin(), queue.end(), upper_less);
            }
            report.branches_pruned +=
                static_cast<std::int64_t>(prune_below(queue, dominance_threshold(incumbent)));
        }
    }
    if (hit_limit) {
        report.terminated_by = TerminationReason::Limit;
    } else if (saw_leaf && !early_convergence) {
        report.terminated_by = TerminationReason::Width;
    } else {
        report.terminated_by = TerminationReason::Converged;
    }

    report.theta_hat = best.space.center();
    report.best_lower = best.lower;
    report.best_upper = best.upper;
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

SolveReport solve(const EventWindow& window, const SearchSpace& theta0_space,
                  const LossSpec& loss, const SolverConfig& cfg, const RigGeometry& rig,
                  const CameraIntrinsics& K, int sensor_width, int sensor_height) {
    const GridSpec spec =
        padded_grid(sensor_width, sensor_height, theta0_space, window.duration, rig, K);
    return solve(window, theta0_space, loss, cfg, rig, K, spec);
}

}  // namespace cbnb
