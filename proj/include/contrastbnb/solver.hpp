#ifndef CONTRASTBNB_SOLVER_HPP
#define CONTRASTBNB_SOLVER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "contrastbnb/bounds.hpp"

namespace cbnb {

/// A search-space box with its computed bounds.
struct Branch {
    SearchSpace space;
    double lower = 0.0;
    double upper = 0.0;
};

enum class TerminationMode { EitherWidth, BothWidths };
enum class SplitRule { Quad, LongestDim };
enum class TerminationReason { Converged, Width, Limit };

struct SolverConfig {
    int branching_limit = 10000;         // N_b, max outer iterations
    double width_eps_omega = 0.00078;    // rad/s
    double width_eps_v = 0.00078;        // m/s
    TerminationMode termination_mode = TerminationMode::EitherWidth;
    SplitRule split_rule = SplitRule::Quad;
    double bound_eq_tol = 1e-9;          // relative bound-equality tolerance
};

struct SolveReport {
    MotionParams theta_hat;
    double best_lower = 0.0;
    double best_upper = 0.0;
    std::int64_t branches_explored = 0;
    std::int64_t branches_pruned = 0;
    double wall_time = 0.0;
    TerminationReason terminated_by = TerminationReason::Limit;
};

std::string termination_name(TerminationReason r);

/// Removes every branch whose upper bound cannot beat the incumbent lower
/// bound L* (within a sign-aware relative tolerance). Returns the number removed.
std::size_t prune(std::vector<Branch>& queue, double incumbent, double tol);

/// As above with an absolute dominance threshold: removes branches with
/// upper <= threshold.
std::size_t prune_below(std::vector<Branch>& queue, double threshold);

/// Best-first branch and bound over (omega, v). Returns the center of the best
/// branch found; its lower bound equals the batch loss there.
SolveReport solve(const EventWindow& window, const SearchSpace& theta0_space,
                  const LossSpec& loss, const SolverConfig& cfg, const RigGeometry& rig,
                  const CameraIntrinsics& K, const GridSpec& spec);

/// As above, computing the grid padding from the initial space and window duration.
SolveReport solve(const EventWindow& window, const SearchSpace& theta0_space,
                  const LossSpec& loss, const SolverConfig& cfg, const RigGeometry& rig,
                  const CameraIntrinsics& K, int sensor_width, int sensor_height);

}  // namespace cbnb

#endif
