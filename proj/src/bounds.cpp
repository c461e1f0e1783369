#include "contrastbnb/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace cbnb {

double initial_bound(const LossSpec& loss, double mu, double n_cells) {
    switch (loss.kind) {
        case LossKind::SoS:
            return 0.0;
        case LossKind::Var:
            return mu * mu;
        case LossKind::SoE:
        case LossKind::SoSA:
        case LossKind::SoEaS:
        case LossKind::SoSAaS:
            return n_cells;
    }
    return 0.0;
}

BoundIncrement bound_increments(const LossSpec& loss, int Q, int i_eta, double mu,
                                double n_cells) {
    constexpr double kE = 2.718281828459045;
    const double ed = std::exp(-loss.delta);
    switch (loss.kind) {
        case LossKind::SoS:
            return {1.0 + 2.0 * i_eta, 1.0 + 2.0 * Q};
        case LossKind::Var:
            return {(1.0 - 2.0 * mu + 2.0 * i_eta) / n_cells,
                    (1.0 - 2.0 * mu + 2.0 * Q) / n_cells};
        case LossKind::SoE:
            return {(kE - 1.0) * std::exp(static_cast<double>(i_eta)),
                    (kE - 1.0) * std::exp(static_cast<double>(Q))};
        case LossKind::SoSA:
            return {(ed - 1.0) * std::exp(-loss.delta * i_eta),
                    (ed - 1.0) * std::exp(-loss.delta * Q)};
        case LossKind::SoEaS: {
            const auto sos = bound_increments({LossKind::SoS, loss.delta}, Q, i_eta, mu, n_cells);
            const auto soe = bound_increments({LossKind::SoE, loss.delta}, Q, i_eta, mu, n_cells);
            return {sos.lower + soe.lower, sos.upper + soe.upper};
        }
        case LossKind::SoSAaS: {
            const auto sos = bound_increments({LossKind::SoS, loss.delta}, Q, i_eta, mu, n_cells);
            const auto sosa =
                bound_increments({LossKind::SoSA, loss.delta}, Q, i_eta, mu, n_cells);
            return {sos.lower + sosa.lower, sos.upper + sosa.upper};
        }
    }
    return {};
}

BoundState rb_state(const EventWindow& window, const SearchSpace& space, const LossSpec& loss,
                    const RigGeometry& rig, const CameraIntrinsics& K, const GridSpec& spec) {
    BoundState state(spec);
    const double n_cells = static_cast<double>(spec.total_cells());
    const double mu = mean_intensity(static_cast<std::int64_t>(window.events.size()), spec);
    state.lower = state.upper = initial_bound(loss, mu, n_cells);

    const MotionParams theta0 = space.center();

    for (const Event& e : window.events) {
        const double t = e.t - window.t_ref;
        const Eigen::Vector2d x(e.x, e.y);
        const PixelBox box = bounding_box(x, t, space, rig, K);

        // Integer cells reachable by round(warp) inside the box, clipped to the grid.
        int ix_lo = static_cast<int>(std::floor(box.x_min + 0.5));
        int ix_hi = static_cast<int>(std::floor(box.x_max + 0.5));
        int iy_lo = static_cast<int>(std::floor(box.y_min + 0.5));
        int iy_hi = static_cast<int>(std::floor(box.y_max + 0.5));
        ix_lo = std::max(ix_lo, -spec.pad_left);
        iy_lo = std::max(iy_lo, -spec.pad_top);
        ix_hi = std::min(ix_hi, spec.width - 1 + spec.pad_right);
        iy_hi = std::min(iy_hi, spec.height - 1 + spec.pad_bottom);
        if (ix_lo > ix_hi || iy_lo > iy_hi) {
            throw std::logic_error("bounding box fell off the padded grid; padding too small");
        }

        // Q bounds the count of earlier events this one can share a cell with
        // under a common theta: every event marks all cells its warp can round
        // into, so coverage(p) >= I(p; theta) for every theta in the branch.
        // Each box cell is distinct, so reading before incrementing yields the
        // pre-update coverage in a single pass (column-major: iy innermost).
        int q = 0;
        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
            for (int iy = iy_lo; iy <= iy_hi; ++iy) {
                q = std::max(q, state.upper_iwe.fetch_increment(ix, iy));
            }
        }

        const Eigen::Vector2d warped = warp_event(x, t, theta0, rig, K);
        const auto eta = round_to_accumulator(warped, spec);
        if (!eta) {
            throw std::logic_error("center warp off the padded grid; padding too small");
        }
        const int i_eta = state.center_iwe.at(eta->x(), eta->y());

        const BoundIncrement inc = bound_increments(loss, q, i_eta, mu, n_cells);
        state.lower += inc.lower;
        state.upper += inc.upper;

        state.center_iwe.increment(eta->x(), eta->y());
        ++state.n_processed;
    }
    return state;
}

std::pair<double, double> rb(const EventWindow& window, const SearchSpace& space,
                             const LossSpec& loss, const RigGeometry& rig,
                             const CameraIntrinsics& K, const GridSpec& spec) {
    const BoundState state = rb_state(window, space, loss, rig, K, spec);
    return {state.lower, state.upper};
}

}  // namespace cbnb
