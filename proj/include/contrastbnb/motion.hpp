#ifndef CONTRASTBNB_MOTION_HPP
#define CONTRASTBNB_MOTION_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <utility>
#include <vector>

#include "contrastbnb/event.hpp"

namespace cbnb {

struct CameraIntrinsics {
    double f = 200.0;   // focal length [px]
    double u0 = 173.0;  // principal point x [px]
    double v0 = 130.0;  // principal point y [px]

    Eigen::Matrix3d matrix() const;
};

struct RigGeometry {
    double s = -0.45;  // signed camera offset along the forward (y) axis [m]
    double d = 0.23;   // camera height above the ground plane [m]
};

struct MotionParams {
    double omega = 0.0;  // angular velocity [rad/s]
    double v = 0.0;      // translational velocity [m/s]
};

/// Axis-aligned interval box in (omega, v).
struct SearchSpace {
    double omega_min = 0.0;
    double omega_max = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;

    MotionParams center() const {
        return {0.5 * (omega_min + omega_max), 0.5 * (v_min + v_max)};
    }
    double omega_width() const { return omega_max - omega_min; }
    double v_width() const { return v_max - v_min; }
    bool contains(const MotionParams& th) const {
        return th.omega >= omega_min && th.omega <= omega_max &&
               th.v >= v_min && th.v <= v_max;
    }
};

struct PixelBox {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool contains(const Eigen::Vector2d& p, double slack = 0.0) const {
        return p.x() >= x_min - slack && p.x() <= x_max + slack &&
               p.y() >= y_min - slack && p.y() <= y_max + slack;
    }
    PixelBox hull(const PixelBox& o) const {
        return {std::min(x_min, o.x_min), std::max(x_max, o.x_max),
                std::min(y_min, o.y_min), std::max(y_max, o.y_max)};
    }
};

/// Planar pose for trajectory integration; heading wrapped to (-pi, pi].
struct PlanarPose {
    double heading = 0.0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Thrown when |omega|_max * t >= pi/2, outside the bounding-box validity range.
class IntervalTooWideError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Circular-arc vehicle displacement over elapsed time t: rotation angle
/// omega*t and translation (v/omega)*[1-cos(omega*t), sin(omega*t)], with the
/// straight-line limit [0, v*t] as omega -> 0.
std::pair<double, Eigen::Vector2d> vehicle_motion(const MotionParams& theta, double t);

/// Relative camera transformation (camera at t_ref + t back to camera at t_ref),
/// chained through the camera-to-vehicle extrinsics [0, s, 0].
std::pair<Eigen::Matrix3d, Eigen::Vector3d> camera_motion(const MotionParams& theta, double t,
                                                          const RigGeometry& rig);

/// Planar homography H = K (R_c - t_c n^T / d) K^-1 with n = [0, 0, -1].
Eigen::Matrix3d homography(const MotionParams& theta, double t, const RigGeometry& rig,
                           const CameraIntrinsics& K);

/// Closed-form warp of an event pixel over elapsed time t = t_event - t_ref.
Eigen::Vector2d warp_event(const Eigen::Vector2d& x, double t, const MotionParams& theta,
                           const RigGeometry& rig, const CameraIntrinsics& K);

inline Eigen::Vector2d warp_event(const Eigen::Vector2d& x, double t_event, double t_ref,
                                  const MotionParams& theta, const RigGeometry& rig,
                                  const CameraIntrinsics& K) {
    return warp_event(x, t_event - t_ref, theta, rig, K);
}

/// At fixed (omega, t) the warp is affine in v: warp(v) = base + v * dir.
/// Precomputing this per event lets a v-sweep skip the trigonometry.
struct VAffineWarp {
    Eigen::Vector2d base;
    Eigen::Vector2d dir;

    Eigen::Vector2d at(double v) const { return base + v * dir; }
};

VAffineWarp warp_v_affine(const Eigen::Vector2d& x, double t, double omega,
                          const RigGeometry& rig, const CameraIntrinsics& K);

/// Pixel box containing warp_event(x, t, theta) for every theta in `space`.
/// Requires max(|omega_min|, |omega_max|) * t < pi/2; zero-spanning omega
/// intervals are split at 0 and the hull of the sub-boxes is returned.
PixelBox bounding_box(const Eigen::Vector2d& x, double t, const SearchSpace& space,
                      const RigGeometry& rig, const CameraIntrinsics& K);

/// Chains per-window planar displacements; pose 0 is the origin with heading 0.
std::vector<PlanarPose> integrate_trajectory(
    const std::vector<std::pair<MotionParams, double>>& estimates);

/// Grid padding such that every warp of a sensor pixel over `space` and
/// t in [0, duration] stays on the padded grid (corner-box hull plus margin).
GridSpec padded_grid(int width, int height, const SearchSpace& space, double duration,
                     const RigGeometry& rig, const CameraIntrinsics& K, int margin = 2);

}  // namespace cbnb

#endif
