#include "contrastbnb/contrast.hpp"

#include <cmath>
#include <functional>

namespace cbnb {

namespace {

// Pairwise summation keeps SoE-style sums accurate on large grids.
template <typename F>
double pairwise_sum(std::int64_t begin, std::int64_t end, F&& term) {
    const std::int64_t n = end - begin;
    if (n <= 64) {
        double acc = 0.0;
        for (std::int64_t i = begin; i < end; ++i) acc += term(i);
        return acc;
    }
    const std::int64_t mid = begin + n / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

double cell_loss(double I, const LossSpec& loss, double mu) {
    switch (loss.kind) {
        case LossKind::SoS:
            return I * I;
        case LossKind::Var:
            return (I - mu) * (I - mu);
        case LossKind::SoE:
            return std::exp(I);
        case LossKind::SoSA:
            return std::exp(-I * loss.delta);
        case LossKind::SoEaS:
            return I * I + std::exp(I);
        case LossKind::SoSAaS:
            return I * I + std::exp(-I * loss.delta);
    }
    return 0.0;
}

double finalize(double sum, const LossSpec& loss, double n_cells) {
    return loss.kind == LossKind::Var ? sum / n_cells : sum;
}

}  // namespace

std::optional<LossKind> parse_loss_kind(const std::string& name) {
    if (name == "sos") return LossKind::SoS;
    if (name == "var") return LossKind::Var;
    if (name == "soe") return LossKind::SoE;
    if (name == "sosa") return LossKind::SoSA;
    if (name == "soeas") return LossKind::SoEaS;
    if (name == "sosaas") return LossKind::SoSAaS;
    return std::nullopt;
}

std::string loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::SoS: return "sos";
        case LossKind::Var: return "var";
        case LossKind::SoE: return "soe";
        case LossKind::SoSA: return "sosa";
        case LossKind::SoEaS: return "soeas";
        case LossKind::SoSAaS: return "sosaas";
    }
    return "?";
}

double loss_quantum(const LossSpec& loss, double n_cells) {
    switch (loss.kind) {
        case LossKind::SoS: return 1.0;
        case LossKind::Var: return 1.0 / n_cells;
        default: return 0.0;
    }
}

double evaluate(const AccumulatorGrid& grid, const LossSpec& loss, std::int64_t n_events) {
    const double mu = mean_intensity(n_events, grid.spec());
    const int* data = grid.counts().data();
    const std::int64_t n_cells = grid.spec().total_cells();
    const double sum = pairwise_sum(0, n_cells, [&](std::int64_t i) {
        return cell_loss(static_cast<double>(data[i]), loss, mu);
    });
    return finalize(sum, loss, static_cast<double>(n_cells));
}

double evaluate_smoothed(const EventWindow& window, const MotionParams& theta,
                         const LossSpec& loss, double sigma, const GridSpec& spec,
                         const RigGeometry& rig, const CameraIntrinsics& K) {
    const int rows = spec.padded_height();
    const int cols = spec.padded_width();
    Eigen::MatrixXd image = Eigen::MatrixXd::Zero(rows, cols);
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

    for (const Event& e : window.events) {
        const Eigen::Vector2d xp =
            warp_event(Eigen::Vector2d(e.x, e.y), e.t - window.t_ref, theta, rig, K);
        const int cx = static_cast<int>(std::floor(xp.x() + 0.5)) + spec.pad_left;
        const int cy = static_cast<int>(std::floor(xp.y() + 0.5)) + spec.pad_top;
        const double fx = xp.x() + spec.pad_left;
        const double fy = xp.y() + spec.pad_top;

        double mass = 0.0;
        for (int iy = cy - radius; iy <= cy + radius; ++iy) {
            for (int ix = cx - radius; ix <= cx + radius; ++ix) {
                const double dx = ix - fx;
                const double dy = iy - fy;
                mass += std::exp(-(dx * dx + dy * dy) * inv2s2);
            }
        }
        if (mass <= 0.0) continue;
        for (int iy = cy - radius; iy <= cy + radius; ++iy) {
            if (iy < 0 || iy >= rows) continue;
            for (int ix = cx - radius; ix <= cx + radius; ++ix) {
                if (ix < 0 || ix >= cols) continue;
                const double dx = ix - fx;
                const double dy = iy - fy;
                image(iy, ix) += std::exp(-(dx * dx + dy * dy) * inv2s2) / mass;
            }
        }
    }

    const double mu = mean_intensity(static_cast<std::int64_t>(window.events.size()), spec);
    const double* data = image.data();
    const std::int64_t n_cells = spec.total_cells();
    const double sum = pairwise_sum(0, n_cells,
                                    [&](std::int64_t i) { return cell_loss(data[i], loss, mu); });
    return finalize(sum, loss, static_cast<double>(n_cells));
}

LossEvaluator::LossEvaluator(const GridSpec& spec)
    : spec_(spec), scratch_(Eigen::MatrixXi::Zero(spec.padded_height(), spec.padded_width())) {
    touched_.reserve(4096);
}

double LossEvaluator::loss_at(const EventWindow& window, const MotionParams& theta,
                              const LossSpec& loss, const RigGeometry& rig,
                              const CameraIntrinsics& K) {
    touched_.clear();
    for (const Event& e : window.events) {
        const Eigen::Vector2d xp =
            warp_event(Eigen::Vector2d(e.x, e.y), e.t - window.t_ref, theta, rig, K);
        if (auto p = round_to_accumulator(xp, spec_)) {
            const int row = p->y() + spec_.pad_top;
            const int col = p->x() + spec_.pad_left;
            if (scratch_(row, col)++ == 0) touched_.emplace_back(row, col);
        }
    }
    return tally_and_reset(static_cast<std::int64_t>(window.events.size()), loss);
}

double LossEvaluator::loss_at(const std::vector<VAffineWarp>& warps, double v,
                              std::int64_t n_events, const LossSpec& loss) {
    touched_.clear();
    for (const VAffineWarp& w : warps) {
        if (auto p = round_to_accumulator(w.at(v), spec_)) {
            const int row = p->y() + spec_.pad_top;
            const int col = p->x() + spec_.pad_left;
            if (scratch_(row, col)++ == 0) touched_.emplace_back(row, col);
        }
    }
    return tally_and_reset(n_events, loss);
}

double LossEvaluator::tally_and_reset(std::int64_t n_events, const LossSpec& loss) {
    const double n_cells = static_cast<double>(spec_.total_cells());
    const double mu = mean_intensity(n_events, spec_);
    const double untouched = n_cells - static_cast<double>(touched_.size());

    double sum = 0.0;
    for (const auto& [row, col] : touched_) {
        sum += cell_loss(static_cast<double>(scratch_(row, col)), loss, mu);
    }
    switch (loss.kind) {
        case LossKind::SoS:
            break;
        case LossKind::Var:
            sum += untouched * mu * mu;
            break;
        case LossKind::SoE:
        case LossKind::SoSA:
        case LossKind::SoEaS:
        case LossKind::SoSAaS:
            sum += untouched;  // empty cells contribute e^0 = 1 (and 0 to squares)
            break;
    }

    for (const auto& [row, col] : touched_) scratch_(row, col) = 0;
    return finalize(sum, loss, n_cells);
}

}  // namespace cbnb
