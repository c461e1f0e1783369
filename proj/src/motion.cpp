#include "contrastbnb/motion.hpp"

#include <algorithm>
#include <cmath>

namespace cbnb {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// (1 - cos(w*t)) / w, odd and increasing in w for |w*t| < pi/2; limit 0 at w = 0.
double one_minus_cos_over_w(double w, double t) {
    const double u = w * t;
    if (std::abs(u) < 1e-4) {
        // series: w*t^2/2 - w^3*t^4/24 + w^5*t^6/720
        const double wt2 = w * t * t;
        return wt2 * (0.5 - u * u * (1.0 / 24.0) + u * u * u * u * (1.0 / 720.0));
    }
    return (1.0 - std::cos(u)) / w;
}

// sin(w*t) / w, even in w, decreasing in |w| for |w*t| < pi/2; limit t at w = 0.
double sin_over_w(double w, double t) {
    const double u = w * t;
    if (std::abs(u) < 1e-4) {
        return t * (1.0 - u * u / 6.0 + u * u * u * u / 120.0);
    }
    return std::sin(u) / w;
}

}  // namespace

Eigen::Matrix3d CameraIntrinsics::matrix() const {
    Eigen::Matrix3d K;
    K << f, 0.0, u0,
         0.0, f, v0,
         0.0, 0.0, 1.0;
    return K;
}

std::pair<double, Eigen::Vector2d> vehicle_motion(const MotionParams& theta, double t) {
    const double angle = theta.omega * t;
    const Eigen::Vector2d translation(theta.v * one_minus_cos_over_w(theta.omega, t),
                                      theta.v * sin_over_w(theta.omega, t));
    return {angle, translation};
}

std::pair<Eigen::Matrix3d, Eigen::Vector3d> camera_motion(const MotionParams& theta, double t,
                                                          const RigGeometry& rig) {
    const auto [angle, tv2] = vehicle_motion(theta, t);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix3d R_v;
    R_v << c, -s, 0.0,
           s, c, 0.0,
           0.0, 0.0, 1.0;
    const Eigen::Vector3d t_v(tv2.x(), tv2.y(), 0.0);
    const Eigen::Vector3d t_vc(0.0, rig.s, 0.0);
    // R_vc = I, so R_c = R_v and t_c = -t_vc + t_v + R_v * t_vc.
    const Eigen::Vector3d t_c = -t_vc + t_v + R_v * t_vc;
    return {R_v, t_c};
}

Eigen::Matrix3d homography(const MotionParams& theta, double t, const RigGeometry& rig,
                           const CameraIntrinsics& K) {
    const auto [R_c, t_c] = camera_motion(theta, t, rig);
    const Eigen::Vector3d n(0.0, 0.0, -1.0);
    const Eigen::Matrix3d Km = K.matrix();
    Eigen::Matrix3d Kinv;
    Kinv << 1.0 / K.f, 0.0, -K.u0 / K.f,
            0.0, 1.0 / K.f, -K.v0 / K.f,
            0.0, 0.0, 1.0;
    return Km * (R_c - t_c * n.transpose() / rig.d) * Kinv;
}

Eigen::Vector2d warp_event(const Eigen::Vector2d& x, double t, const MotionParams& theta,
                           const RigGeometry& rig, const CameraIntrinsics& K) {
    const double g = K.f / rig.d;
    const double A = x.y() - K.v0 + rig.s * g;
    const double B = x.x() - K.u0;
    const double u = theta.omega * t;
    const double sn = std::sin(u);
    const double cs = std::cos(u);
    const double tx = theta.v * one_minus_cos_over_w(theta.omega, t);
    const double ty = theta.v * sin_over_w(theta.omega, t);
    return {-A * sn + B * cs + g * tx + K.u0,
            B * sn + A * cs + g * ty - rig.s * g + K.v0};
}

VAffineWarp warp_v_affine(const Eigen::Vector2d& x, double t, double omega,
                          const RigGeometry& rig, const CameraIntrinsics& K) {
    const double g = K.f / rig.d;
    const double A = x.y() - K.v0 + rig.s * g;
    const double B = x.x() - K.u0;
    const double u = omega * t;
    const double sn = std::sin(u);
    const double cs = std::cos(u);
    return {{-A * sn + B * cs + K.u0, B * sn + A * cs - rig.s * g + K.v0},
            {g * one_minus_cos_over_w(omega, t), g * sin_over_w(omega, t)}};
}

namespace {

struct Interval {
    double lo, hi;
    void absorb(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

// Box over a sign-definite omega interval (endpoints may be 0). Every term is
// monotone per variable here, so corner evaluation gives the exact envelope.
PixelBox box_sign_definite(const Eigen::Vector2d& x, double t, double wl, double wh,
                           double vl, double vh, const RigGeometry& rig,
                           const CameraIntrinsics& K) {
    const double g = K.f / rig.d;
    const double A = x.y() - K.v0 + rig.s * g;
    const double B = x.x() - K.u0;

    const double sn_l = std::sin(wl * t), sn_h = std::sin(wh * t);
    const double cs_l = std::cos(wl * t), cs_h = std::cos(wh * t);
    const double h_l = one_minus_cos_over_w(wl, t), h_h = one_minus_cos_over_w(wh, t);
    const double q_l = sin_over_w(wl, t), q_h = sin_over_w(wh, t);

    Interval ax{-A * sn_l, -A * sn_l};
    ax.absorb(-A * sn_h);
    Interval bx{B * cs_l, B * cs_l};
    bx.absorb(B * cs_h);
    Interval ay{B * sn_l, B * sn_l};
    ay.absorb(B * sn_h);
    Interval cy{A * cs_l, A * cs_l};
    cy.absorb(A * cs_h);

    Interval cx{g * vl * h_l, g * vl * h_l};
    Interval by{g * vl * q_l, g * vl * q_l};
    for (double vv : {vl, vh}) {
        cx.absorb(g * vv * h_l);
        cx.absorb(g * vv * h_h);
        by.absorb(g * vv * q_l);
        by.absorb(g * vv * q_h);
    }

    PixelBox box;
    box.x_min = ax.lo + bx.lo + cx.lo + K.u0;
    box.x_max = ax.hi + bx.hi + cx.hi + K.u0;
    box.y_min = ay.lo + by.lo + cy.lo - rig.s * g + K.v0;
    box.y_max = ay.hi + by.hi + cy.hi - rig.s * g + K.v0;
    return box;
}

}  // namespace

PixelBox bounding_box(const Eigen::Vector2d& x, double t, const SearchSpace& space,
                      const RigGeometry& rig, const CameraIntrinsics& K) {
    const double w_abs = std::max(std::abs(space.omega_min), std::abs(space.omega_max));
    if (w_abs * t >= kHalfPi) {
        throw IntervalTooWideError("interval too wide: |omega|*t must stay below pi/2");
    }
    if (space.omega_min < 0.0 && space.omega_max > 0.0) {
        const PixelBox neg = box_sign_definite(x, t, space.omega_min, 0.0, space.v_min,
                                               space.v_max, rig, K);
        const PixelBox pos = box_sign_definite(x, t, 0.0, space.omega_max, space.v_min,
                                               space.v_max, rig, K);
        return neg.hull(pos);
    }
    return box_sign_definite(x, t, space.omega_min, space.omega_max, space.v_min,
                             space.v_max, rig, K);
}

std::vector<PlanarPose> integrate_trajectory(
    const std::vector<std::pair<MotionParams, double>>& estimates) {
    std::vector<PlanarPose> poses;
    poses.push_back(PlanarPose{});
    for (const auto& [theta, dt] : estimates) {
        const auto [angle, local] = vehicle_motion(theta, dt);
        const PlanarPose& prev = poses.back();
        const double c = std::cos(prev.heading);
        const double s = std::sin(prev.heading);
        PlanarPose next;
        next.position = prev.position +
                        Eigen::Vector2d(c * local.x() - s * local.y(),
                                        s * local.x() + c * local.y());
        double h = prev.heading + angle;
        h = std::remainder(h, 2.0 * kHalfPi * 2.0);
        if (h <= -2.0 * kHalfPi) h += 4.0 * kHalfPi;
        next.heading = h;
        poses.push_back(next);
    }
    return poses;
}

GridSpec padded_grid(int width, int height, const SearchSpace& space, double duration,
                     const RigGeometry& rig, const CameraIntrinsics& K, int margin) {
    PixelBox hull{0.0, static_cast<double>(width - 1), 0.0, static_cast<double>(height - 1)};
    const Eigen::Vector2d corners[4] = {{0.0, 0.0},
                                        {static_cast<double>(width - 1), 0.0},
                                        {0.0, static_cast<double>(height - 1)},
                                        {static_cast<double>(width - 1),
                                         static_cast<double>(height - 1)}};
    const int n_samples = 32;
    for (int i = 1; i <= n_samples; ++i) {
        const double t = duration * static_cast<double>(i) / n_samples;
        for (const auto& c : corners) {
            hull = hull.hull(bounding_box(c, t, space, rig, K));
        }
    }
    GridSpec spec;
    spec.width = width;
    spec.height = height;
    spec.pad_left = std::max(0, static_cast<int>(std::ceil(-hull.x_min)) + margin);
    spec.pad_right = std::max(0, static_cast<int>(std::ceil(hull.x_max - (width - 1))) + margin);
    spec.pad_top = std::max(0, static_cast<int>(std::ceil(-hull.y_min)) + margin);
    spec.pad_bottom = std::max(0, static_cast<int>(std::ceil(hull.y_max - (height - 1))) + margin);
    return spec;
}

}  // namespace cbnb
