#ifndef CONTRASTBNB_IO_HPP
#define CONTRASTBNB_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contrastbnb/event.hpp"
#include "contrastbnb/motion.hpp"
#include "contrastbnb/sim.hpp"

namespace cbnb {

/// One event per line: `t_us x y p` with integer microseconds and p in {0,1}.
/// Lines starting with `#` are comments; a `# gt omega=<rad/s> v=<m/s>` header
/// carries ground truth.
struct EventFile {
    std::vector<Event> events;
    std::optional<GroundTruth> ground_truth;
};

EventFile read_events(const std::string& path);
void write_events(const std::string& path, const std::vector<Event>& events,
                  const std::optional<GroundTruth>& ground_truth);

/// Key-value rig/intrinsics config: keys f, u0, v0, s, d, width, height.
struct RigConfig {
    CameraIntrinsics K;
    RigGeometry rig;
    int width = 346;
    int height = 260;
};

RigConfig read_rig_config(const std::string& path);

/// Ordered key-value record; the run-reproduction sidecar written by every command.
using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace cbnb

#endif
