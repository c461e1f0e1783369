#include "contrastbnb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cbnb {

PlanarScene generate_scene(int n_segments, double extent, double depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-0.5 * extent, 0.5 * extent);
    std::bernoulli_distribution horizontal(0.5);

    PlanarScene scene;
    scene.depth = depth;
    scene.segments.reserve(static_cast<std::size_t>(n_segments));
    for (int i = 0; i < n_segments; ++i) {
        PlanarScene::Segment seg;
        seg.a = Eigen::Vector2d(coord(rng), coord(rng));
        if (horizontal(rng)) {
            seg.b = Eigen::Vector2d(coord(rng), seg.a.y());
        } else {
            seg.b = Eigen::Vector2d(seg.a.x(), coord(rng));
        }
        scene.segments.push_back(seg);
    }
    return scene;
}

EventWindow generate_events(const PlanarScene& scene, const GroundTruth& truth, int n_events,
                            double dt, const SimConfig& cfg, std::uint64_t seed) {
    if (scene.segments.empty()) {
        throw std::invalid_argument("generate_events: empty scene");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> lengths;
    lengths.reserve(scene.segments.size());
    for (const auto& seg : scene.segments) lengths.push_back((seg.b - seg.a).norm());
    std::discrete_distribution<std::size_t> pick_segment(lengths.begin(), lengths.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    const MotionParams theta{truth.omega, truth.v};
    EventWindow window;
    window.t_ref = 0.0;
    window.duration = dt;
    window.events.reserve(static_cast<std::size_t>(n_events));

    const std::int64_t max_attempts = static_cast<std::int64_t>(n_events) * 1000 + 1000;
    std::int64_t attempts = 0;
    while (static_cast<int>(window.events.size()) < n_events) {
        if (++attempts > max_attempts) {
            throw std::runtime_error("generate_events: scene not visible from camera");
        }
        const auto& seg = scene.segments[pick_segment(rng)];
        const Eigen::Vector2d p2 = seg.a + unit(rng) * (seg.b - seg.a);
        const double t = unit(rng) * dt;

        // Point in the camera frame at time t: invert the (R_c, t_c) chain.
        const auto [R_c, t_c] = camera_motion(theta, t, cfg.rig);
        const Eigen::Vector3d p_ref(p2.x(), p2.y(), scene.depth);
        const Eigen::Vector3d p_t = R_c.transpose() * (p_ref - t_c);
        if (p_t.z() <= 0.0) continue;

        double u = cfg.K.f * p_t.x() / p_t.z() + cfg.K.u0;
        double v = cfg.K.f * p_t.y() / p_t.z() + cfg.K.v0;
        if (!cfg.continuous_px) {
            u = std::floor(u + 0.5);
            v = std::floor(v + 0.5);
        }
        if (u < 0.0 || u > cfg.width - 1 || v < 0.0 || v > cfg.height - 1) continue;

        Event e;
        e.x = u;
        e.y = v;
        e.t = t;
        e.polarity = coin(rng) ? 1 : -1;
        window.events.push_back(e);
    }
    std::stable_sort(window.events.begin(), window.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return window;
}

EventWindow add_noise(const EventWindow& window, const NoiseSpec& noise,
                      const GridSpec& sensor) {
    const auto n_noise =
        static_cast<std::int64_t>(std::llround(noise.ne_ratio * window.events.size()));
    if (n_noise <= 0) return window;

    std::mt19937_64 rng(noise.seed);
    std::uniform_int_distribution<int> px(0, sensor.width - 1);
    std::uniform_int_distribution<int> py(0, sensor.height - 1);
    std::uniform_real_distribution<double> time(window.t_ref, window.t_ref + window.duration);
    std::bernoulli_distribution coin(0.5);

    EventWindow out = window;
    out.events.reserve(window.events.size() + static_cast<std::size_t>(n_noise));
    for (std::int64_t i = 0; i < n_noise; ++i) {
        Event e;
        e.x = px(rng);
        e.y = py(rng);
        e.t = time(rng);
        e.polarity = coin(rng) ? 1 : -1;
        out.events.push_back(e);
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return out;
}

std::pair<MotionParams, double> grid_search(const EventWindow& window, const SearchSpace& space,
                                            double step_omega, double step_v,
                                            const LossSpec& loss, const RigGeometry& rig,
                                            const CameraIntrinsics& K, const GridSpec& spec) {
    if (step_omega <= 0.0 || step_v <= 0.0) {
        throw std::invalid_argument("grid_search: steps must be positive");
    }
    const int n_omega =
        static_cast<int>(std::floor(space.omega_width() / step_omega + 1e-9)) + 1;
    const int n_v = static_cast<int>(std::floor(space.v_width() / step_v + 1e-9)) + 1;

    LossEvaluator evaluator(spec);
    const auto n_events = static_cast<std::int64_t>(window.events.size());
    MotionParams best{space.omega_min, space.v_min};
    double best_loss = -std::numeric_limits<double>::infinity();
    std::vector<VAffineWarp> warps(window.events.size());
    for (int i = 0; i < n_omega; ++i) {
        const double omega = space.omega_min + i * step_omega;
        for (std::size_t e = 0; e < window.events.size(); ++e) {
            const Event& ev = window.events[e];
            warps[e] = warp_v_affine(Eigen::Vector2d(ev.x, ev.y), ev.t - window.t_ref, omega,
                                     rig, K);
        }
        for (int j = 0; j < n_v; ++j) {
            const double v = space.v_min + j * step_v;
            const double value = evaluator.loss_at(warps, v, n_events, loss);
            if (value > best_loss) {
                best_loss = value;
                best = {omega, v};
            }
        }
    }
    return {best, best_loss};
}

std::pair<MotionParams, double> gradient_ascent(const EventWindow& window,
                                                const MotionParams& theta_init,
                                                const LossSpec& loss,
                                                const GradientAscentConfig& cfg,
                                                const RigGeometry& rig,
                                                const CameraIntrinsics& K,
                                                const GridSpec& spec) {
    const auto value_at = [&](const MotionParams& th) {
        return evaluate_smoothed(window, th, loss, cfg.sigma, spec, rig, K);
    };

    MotionParams theta = theta_init;
    double value = value_at(theta);
    double step = cfg.init_step;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const double h = cfg.fd_step;
        const double g_omega = (value_at({theta.omega + h, theta.v}) -
                                value_at({theta.omega - h, theta.v})) /
                               (2.0 * h);
        const double g_v =
            (value_at({theta.omega, theta.v + h}) - value_at({theta.omega, theta.v - h})) /
            (2.0 * h);
        const double norm = std::hypot(g_omega, g_v);
        if (norm == 0.0) break;

        bool improved = false;
        double alpha = step;
        for (int k = 0; k < cfg.max_halvings; ++k) {
            const MotionParams trial{theta.omega + alpha * g_omega / norm,
                                     theta.v + alpha * g_v / norm};
            const double trial_value = value_at(trial);
            if (trial_value > value) {
                theta = trial;
                value = trial_value;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
        step = std::min(2.0 * alpha, cfg.init_step);
        if (alpha < cfg.min_step) break;
    }
    return {theta, value};
}

std::pair<double, double> rms_eval(const std::vector<MotionParams>& estimates,
                                   const std::vector<GroundTruth>& truths) {
    if (estimates.size() != truths.size()) {
        throw std::invalid_argument("rms_eval: length mismatch");
    }
    if (estimates.empty()) return {0.0, 0.0};
    double sum_w = 0.0, sum_v = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double dw = estimates[i].omega - truths[i].omega;
        const double dv = estimates[i].v - truths[i].v;
        sum_w += dw * dw;
        sum_v += dv * dv;
    }
    const double n = static_cast<double>(estimates.size());
    constexpr double kRadToDeg = 57.29577951308232;
    return {std::sqrt(sum_w / n) * kRadToDeg, std::sqrt(sum_v / n)};
}

}  // namespace cbnb
