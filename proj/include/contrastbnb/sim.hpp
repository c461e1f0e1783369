#ifndef CONTRASTBNB_SIM_HPP
#define CONTRASTBNB_SIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "contrastbnb/contrast.hpp"
#include "contrastbnb/event.hpp"
#include "contrastbnb/motion.hpp"

namespace cbnb {

/// Axis-aligned 3-D line segments on the ground plane z = depth (reference
/// camera frame, z toward the ground).
struct PlanarScene {
    struct Segment {
        Eigen::Vector2d a;
        Eigen::Vector2d b;
    };
    std::vector<Segment> segments;
    double depth = 2.0;
};

struct NoiseSpec {
    double ne_ratio = 0.0;  // noise events per signal event
    std::uint64_t seed = 0;
};

struct GroundTruth {
    double omega = 0.0;  // rad/s
    double v = 0.0;      // m/s
};

struct SimConfig {
    CameraIntrinsics K;
    RigGeometry rig;            // rig.d doubles as the scene depth
    int width = 346;
    int height = 260;
    bool continuous_px = false;  // keep sub-pixel event coordinates
};

PlanarScene generate_scene(int n_segments, double extent, double depth, std::uint64_t seed);

/// Samples events by picking scene points and projecting them through the
/// camera pose along the ground-truth arc; result sorted by t.
EventWindow generate_events(const PlanarScene& scene, const GroundTruth& truth, int n_events,
                            double dt, const SimConfig& cfg, std::uint64_t seed);

/// Appends round(ne_ratio * N) salt-and-pepper events, re-sorted by t.
EventWindow add_noise(const EventWindow& window, const NoiseSpec& noise, const GridSpec& sensor);

/// Exhaustive lattice evaluation of the batch loss; ties broken by smallest
/// omega, then smallest v. The correctness reference for the solver.
std::pair<MotionParams, double> grid_search(const EventWindow& window, const SearchSpace& space,
                                            double step_omega, double step_v,
                                            const LossSpec& loss, const RigGeometry& rig,
                                            const CameraIntrinsics& K, const GridSpec& spec);

struct GradientAscentConfig {
    double sigma = 1.0;          // smoothing kernel [px]
    double fd_step = 1e-5;       // central-difference step
    double init_step = 0.05;     // initial line-search step length
    double min_step = 1e-6;
    int max_iters = 100;
    int max_halvings = 20;
};

/// Local baseline: gradient ascent on the Gaussian-smoothed loss.
std::pair<MotionParams, double> gradient_ascent(const EventWindow& window,
                                                const MotionParams& theta_init,
                                                const LossSpec& loss,
                                                const GradientAscentConfig& cfg,
                                                const RigGeometry& rig,
                                                const CameraIntrinsics& K,
                                                const GridSpec& spec);

/// RMS of per-window errors; omega reported in deg/s.
std::pair<double, double> rms_eval(const std::vector<MotionParams>& estimates,
                                   const std::vector<GroundTruth>& truths);

}  // namespace cbnb

#endif
