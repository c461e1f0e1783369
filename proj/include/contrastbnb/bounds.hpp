#ifndef CONTRASTBNB_BOUNDS_HPP
#define CONTRASTBNB_BOUNDS_HPP

#include <utility>

#include "contrastbnb/contrast.hpp"
#include "contrastbnb/event.hpp"
#include "contrastbnb/motion.hpp"

namespace cbnb {

/// Per-event additions to the running lower/upper loss bounds.
struct BoundIncrement {
    double lower = 0.0;
    double upper = 0.0;
};

/// Initial value L_0 of both bounds for an empty IWE.
double initial_bound(const LossSpec& loss, double mu, double n_cells);

/// One row of the recursive bound table: Q bounds the number of earlier events
/// the current one can be co-located with anywhere in the branch, i_eta is the
/// center-IWE count at the rounded warp of the event at the branch center.
BoundIncrement bound_increments(const LossSpec& loss, int Q, int i_eta, double mu,
                                double n_cells);

/// Recursive bound bookkeeping for one branch.
struct BoundState {
    AccumulatorGrid center_iwe;   // I^N at the branch center
    AccumulatorGrid upper_iwe;    // coverage image: cells each event's box can round into
    double lower = 0.0;
    double upper = 0.0;
    std::int64_t n_processed = 0;

    explicit BoundState(const GridSpec& spec) : center_iwe(spec), upper_iwe(spec) {}
};

/// Recursive lower/upper bounds of the loss over a branch. The lower bound
/// equals the batch loss at the branch center exactly; the upper bound is
/// sound for every theta in the branch.
std::pair<double, double> rb(const EventWindow& window, const SearchSpace& space,
                             const LossSpec& loss, const RigGeometry& rig,
                             const CameraIntrinsics& K, const GridSpec& spec);

/// As rb, but exposes the final bookkeeping for inspection.
BoundState rb_state(const EventWindow& window, const SearchSpace& space, const LossSpec& loss,
                    const RigGeometry& rig, const CameraIntrinsics& K, const GridSpec& spec);

}  // namespace cbnb

#endif
