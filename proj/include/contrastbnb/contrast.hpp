#ifndef CONTRASTBNB_CONTRAST_HPP
#define CONTRASTBNB_CONTRAST_HPP

#include <optional>
#include <string>

#include "contrastbnb/event.hpp"
#include "contrastbnb/motion.hpp"

namespace cbnb {

enum class LossKind { SoS, Var, SoE, SoSA, SoEaS, SoSAaS };

/// Loss selection plus the SoSA-family shift factor delta.
struct LossSpec {
    LossKind kind = LossKind::SoS;
    double delta = 1.0;
};

std::optional<LossKind> parse_loss_kind(const std::string& name);
std::string loss_kind_name(LossKind kind);

/// Spacing of the value lattice the loss lives on, or 0 if values are not
/// lattice-quantised. SoS is a sum of squared integer counts, so attainable
/// values are integers; Var is an integer sum scaled by 1/N_p (up to the
/// constant mu^2 shift). The exponential-family losses mix incommensurate
/// terms and get no quantum.
double loss_quantum(const LossSpec& loss, double n_cells);

/// Batch focus loss over the full padded grid. n_events fixes mu_I for Var.
double evaluate(const AccumulatorGrid& grid, const LossSpec& loss, std::int64_t n_events);

/// Focus loss of a real-valued IWE built by splatting each warped event as a
/// truncated (+-3 sigma) unit-mass Gaussian; continuous in theta.
double evaluate_smoothed(const EventWindow& window, const MotionParams& theta,
                         const LossSpec& loss, double sigma, const GridSpec& spec,
                         const RigGeometry& rig, const CameraIntrinsics& K);

/// Fast batch-loss evaluation reusing a scratch grid and touching only warped
/// cells. Identical results to evaluate(build_iwe(...), loss, N).
class LossEvaluator {
public:
    explicit LossEvaluator(const GridSpec& spec);

    double loss_at(const EventWindow& window, const MotionParams& theta, const LossSpec& loss,
                   const RigGeometry& rig, const CameraIntrinsics& K);

    /// Same loss from per-event v-affine warps at a fixed omega; avoids
    /// re-deriving the trigonometric terms for every v on a sweep.
    double loss_at(const std::vector<VAffineWarp>& warps, double v, std::int64_t n_events,
                   const LossSpec& loss);

private:
    double tally_and_reset(std::int64_t n_events, const LossSpec& loss);

    GridSpec spec_;
    Eigen::MatrixXi scratch_;
    std::vector<std::pair<int, int>> touched_;
};

}  // namespace cbnb

#endif
