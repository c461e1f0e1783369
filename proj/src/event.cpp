#include "contrastbnb/event.hpp"

#include <cmath>

namespace cbnb {

std::vector<EventWindow> slice_windows(const std::vector<Event>& stream, double dt) {
    std::vector<EventWindow> windows;
    if (stream.empty()) return windows;
    for (const Event& e : stream) {
        const auto k = static_cast<std::size_t>(std::floor(e.t / dt));
        while (windows.size() <= k) {
            EventWindow w;
            w.t_ref = static_cast<double>(windows.size()) * dt;
            w.duration = dt;
            windows.push_back(std::move(w));
        }
        windows[k].events.push_back(e);
    }
    return windows;
}

}  // namespace cbnb
