#ifndef CONTRASTBNB_EVENT_HPP
#define CONTRASTBNB_EVENT_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace cbnb {

/// A single sensor event. Timestamps are seconds relative to stream start.
/// Polarity is carried for file round-tripping but never used by estimation.
struct Event {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    int polarity = 1;  // -1 or +1
};

/// A temporally sorted slice [t_ref, t_ref + duration] of an event stream.
struct EventWindow {
    std::vector<Event> events;
    double t_ref = 0.0;
    double duration = 0.0;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
};

/// Sensor size plus the padding that keeps every warped event on the grid.
/// Accumulator coordinates are sensor pixel coordinates; padding extends the
/// valid range to [-pad_left, width-1+pad_right] x [-pad_top, height-1+pad_bottom].
struct GridSpec {
    int width = 346;
    int height = 260;
    int pad_left = 0;
    int pad_right = 0;
    int pad_top = 0;
    int pad_bottom = 0;

    int padded_width() const { return width + pad_left + pad_right; }
    int padded_height() const { return height + pad_top + pad_bottom; }
    std::int64_t total_cells() const {
        return static_cast<std::int64_t>(padded_width()) * padded_height();
    }
    bool contains(int ix, int iy) const {
        return ix >= -pad_left && ix < width + pad_right &&
               iy >= -pad_top && iy < height + pad_bottom;
    }
};

/// Integer accumulator image (the IWE). counts(row, col) with row = iy + pad_top,
/// col = ix + pad_left.
class AccumulatorGrid {
public:
    explicit AccumulatorGrid(const GridSpec& spec)
        : spec_(spec),
          counts_(Eigen::MatrixXi::Zero(spec.padded_height(), spec.padded_width())) {}

    const GridSpec& spec() const { return spec_; }
    const Eigen::MatrixXi& counts() const { return counts_; }

    int at(int ix, int iy) const {
        return counts_(iy + spec_.pad_top, ix + spec_.pad_left);
    }
    void increment(int ix, int iy) {
        ++counts_(iy + spec_.pad_top, ix + spec_.pad_left);
        ++total_;
    }
    /// Increments the cell and returns its previous count.
    int fetch_increment(int ix, int iy) {
        ++total_;
        return counts_(iy + spec_.pad_top, ix + spec_.pad_left)++;
    }
    std::int64_t total() const { return total_; }

private:
    GridSpec spec_;
    Eigen::MatrixXi counts_;
    std::int64_t total_ = 0;
};

/// Nearest accumulator for a continuous warped position; ties round toward +inf
/// in each coordinate. Returns nullopt when the rounded index leaves the padded grid.
inline std::optional<Eigen::Vector2i> round_to_accumulator(const Eigen::Vector2d& x_prime,
                                                           const GridSpec& spec) {
    const int ix = static_cast<int>(std::floor(x_prime.x() + 0.5));
    const int iy = static_cast<int>(std::floor(x_prime.y() + 0.5));
    if (!spec.contains(ix, iy)) return std::nullopt;
    return Eigen::Vector2i(ix, iy);
}

/// Accumulates warped events into an IWE. `warp` maps (pixel, t_event) to the
/// reference-view position. Events rounding off the padded grid are dropped
/// (padding is sized so this does not happen during a solve).
template <typename WarpFn>
AccumulatorGrid build_iwe(const EventWindow& window, WarpFn&& warp, const GridSpec& spec) {
    AccumulatorGrid grid(spec);
    for (const Event& e : window.events) {
        const Eigen::Vector2d xp = warp(Eigen::Vector2d(e.x, e.y), e.t);
        if (auto p = round_to_accumulator(xp, spec)) {
            grid.increment(p->x(), p->y());
        }
    }
    return grid;
}

/// Mean accumulator value mu_I = N / N_p.
inline double mean_intensity(std::int64_t n_events, const GridSpec& spec) {
    return static_cast<double>(n_events) / static_cast<double>(spec.total_cells());
}

/// Slices a sorted stream into consecutive half-open windows [k*dt, (k+1)*dt).
std::vector<EventWindow> slice_windows(const std::vector<Event>& stream, double dt);

}  // namespace cbnb

#endif
