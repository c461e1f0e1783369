#include "contrastbnb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbnb {

namespace {

bool parse_gt_header(const std::string& line, GroundTruth& gt) {
    // "# gt omega=<rad/s> v=<m/s>"
    std::istringstream iss(line);
    std::string hash, tag, w_tok, v_tok;
    if (!(iss >> hash >> tag >> w_tok >> v_tok)) return false;
    if (hash != "#" || tag != "gt") return false;
    if (w_tok.rfind("omega=", 0) != 0 || v_tok.rfind("v=", 0) != 0) return false;
    gt.omega = std::stod(w_tok.substr(6));
    gt.v = std::stod(v_tok.substr(2));
    return true;
}

}  // namespace

EventFile read_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event file: " + path);

    EventFile file;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            GroundTruth gt;
            if (parse_gt_header(line, gt)) file.ground_truth = gt;
            continue;
        }
        std::istringstream iss(line);
        long long t_us = 0;
        double x = 0.0, y = 0.0;
        int p = 0;
        if (!(iss >> t_us >> x >> y >> p)) {
            throw std::runtime_error("malformed event line: " + line);
        }
        Event e;
        e.t = static_cast<double>(t_us) * 1e-6;
        e.x = x;
        e.y = y;
        e.polarity = p == 0 ? -1 : 1;
        file.events.push_back(e);
    }
    return file;
}

void write_events(const std::string& path, const std::vector<Event>& events,
                  const std::optional<GroundTruth>& ground_truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write event file: " + path);
    if (ground_truth) {
        char header[128];
        std::snprintf(header, sizeof(header), "# gt omega=%.9g v=%.9g", ground_truth->omega,
                      ground_truth->v);
        out << header << '\n';
    }
    char buf[160];
    for (const Event& e : events) {
        const long long t_us = std::llround(e.t * 1e6);
        const int p = e.polarity > 0 ? 1 : 0;
        if (e.x == std::floor(e.x) && e.y == std::floor(e.y)) {
            std::snprintf(buf, sizeof(buf), "%lld %d %d %d", t_us, static_cast<int>(e.x),
                          static_cast<int>(e.y), p);
        } else {
            std::snprintf(buf, sizeof(buf), "%lld %.6f %.6f %d", t_us, e.x, e.y, p);
        }
        out << buf << '\n';
    }
}

RigConfig read_rig_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    RigConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& c : line) {
            if (c == '=' || c == ':') c = ' ';
        }
        std::istringstream iss(line);
        std::string key;
        double value = 0.0;
        if (!(iss >> key >> value)) continue;
        if (key == "f") cfg.K.f = value;
        else if (key == "u0") cfg.K.u0 = value;
        else if (key == "v0") cfg.K.v0 = value;
        else if (key == "s") cfg.rig.s = value;
        else if (key == "d") cfg.rig.d = value;
        else if (key == "width") cfg.width = static_cast<int>(value);
        else if (key == "height") cfg.height = static_cast<int>(value);
        else throw std::runtime_error("unknown config key: " + key);
    }
    return cfg;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    for (const auto& [key, value] : manifest) {
        out << key << ": " << value << '\n';
    }
}

}  // namespace cbnb
