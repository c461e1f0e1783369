// contrastbnb: simulate planar event streams and recover (omega, v) by
// globally-optimal contrast maximisation. Subcommands: simulate, solve,
// grid, local, eval, bench.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "contrastbnb/io.hpp"
#include "contrastbnb/sim.hpp"
#include "contrastbnb/solver.hpp"

using namespace cbnb;

namespace {

constexpr double kRadToDeg = 57.29577951308232;

std::string fmt(double x) {
    std::ostringstream out;
    out << std::setprecision(12) << x;
    return out.str();
}

void parse_range(const std::string& text, double& lo, double& hi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("range", "expected a:b, got '" + text + "'");
    }
    try {
        lo = std::stod(text.substr(0, colon));
        hi = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("range", "expected a:b, got '" + text + "'");
    }
    if (hi < lo) throw CLI::ValidationError("range", "empty range '" + text + "'");
}

EventWindow load_window(const std::string& path, GroundTruth* gt_out) {
    EventFile file = read_events(path);
    if (gt_out != nullptr && file.ground_truth) *gt_out = *file.ground_truth;
    EventWindow window;
    window.events = std::move(file.events);
    std::stable_sort(window.events.begin(), window.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    window.t_ref = 0.0;
    window.duration = window.events.empty() ? 0.0 : window.events.back().t;
    return window;
}

std::string join_args(int argc, char** argv) {
    std::string line;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) line += ' ';
        line += argv[i];
    }
    return line;
}

int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("CONTRASTBNB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

struct CommonFlags {
    std::string config_path;
    std::string manifest_path;

    void attach(CLI::App* cmd, const std::string& default_manifest) {
        manifest_path = default_manifest;
        cmd->add_option("--config", config_path, "rig/intrinsics config file");
        cmd->add_option("--manifest", manifest_path, "manifest sidecar path");
    }

    RigConfig rig_config() const {
        if (config_path.empty()) return RigConfig{};
        return read_rig_config(config_path);
    }
};

struct SolveFlags {
    std::string in_path;
    std::string loss_name;
    double delta = 1.0;
    std::string omega_range = "0.4:0.6";
    std::string v_range = "0.4:0.6";
    double eps_omega = 0.00078;
    double eps_v = 0.00078;
    int nb = 10000;
    std::string mode = "either";

    void attach(CLI::App* cmd) {
        cmd->add_option("--in", in_path, "input event file")->required();
        cmd->add_option("--loss", loss_name, "sos|var|soe|sosa|soeas|sosaas")->required();
        cmd->add_option("--delta", delta, "suppressed-accumulation scale");
        cmd->add_option("--omega-range", omega_range, "omega interval a:b [rad/s]");
        cmd->add_option("--v-range", v_range, "v interval a:b [m/s]");
        cmd->add_option("--eps-omega", eps_omega, "width tolerance in omega");
        cmd->add_option("--eps-v", eps_v, "width tolerance in v");
        cmd->add_option("--nb", nb, "branching limit");
        cmd->add_option("--mode", mode, "width termination: either|both")
            ->check(CLI::IsMember({"either", "both"}));
    }

    LossSpec loss() const {
        const auto kind = parse_loss_kind(loss_name);
        if (!kind) throw CLI::ValidationError("--loss", "unknown loss '" + loss_name + "'");
        return {*kind, delta};
    }

    SearchSpace space() const {
        SearchSpace s{};
        parse_range(omega_range, s.omega_min, s.omega_max);
        parse_range(v_range, s.v_min, s.v_max);
        return s;
    }

    SolverConfig solver() const {
        SolverConfig cfg;
        cfg.branching_limit = nb;
        cfg.width_eps_omega = eps_omega;
        cfg.width_eps_v = eps_v;
        cfg.termination_mode =
            mode == "both" ? TerminationMode::BothWidths : TerminationMode::EitherWidth;
        return cfg;
    }
};

int cmd_simulate(const CommonFlags& common, int segments, int events, double dt, double omega,
                 double v, double ne_ratio, std::uint64_t seed, double extent, double depth,
                 bool continuous_px, const std::string& out_path, const std::string& cmdline) {
    const RigConfig rc = common.rig_config();
    SimConfig cfg;
    cfg.K = rc.K;
    cfg.rig = rc.rig;
    cfg.rig.d = depth;  // events live on the ground plane
    cfg.width = rc.width;
    cfg.height = rc.height;
    cfg.continuous_px = continuous_px;

    const PlanarScene scene = generate_scene(segments, extent, depth, seed);
    EventWindow window = generate_events(scene, {omega, v}, events, dt, cfg, seed + 1);
    if (ne_ratio > 0.0) {
        GridSpec sensor;
        sensor.width = cfg.width;
        sensor.height = cfg.height;
        window = add_noise(window, {ne_ratio, seed + 2}, sensor);
    }
    write_events(out_path, window.events, GroundTruth{omega, v});

    Manifest manifest{{"command", cmdline},
                      {"segments", std::to_string(segments)},
                      {"events", std::to_string(events)},
                      {"dt", fmt(dt)},
                      {"omega", fmt(omega)},
                      {"v", fmt(v)},
                      {"ne_ratio", fmt(ne_ratio)},
                      {"seed", std::to_string(seed)},
                      {"extent", fmt(extent)},
                      {"depth", fmt(depth)},
                      {"continuous_px", continuous_px ? "1" : "0"},
                      {"f", fmt(cfg.K.f)},
                      {"s", fmt(cfg.rig.s)},
                      {"out", out_path},
                      {"lines", std::to_string(window.events.size())}};
    write_manifest(common.manifest_path.empty() ? out_path + ".manifest" : common.manifest_path,
                   manifest);
    return 0;
}

int cmd_solve(const CommonFlags& common, const SolveFlags& flags, const std::string& cmdline) {
    const RigConfig rc = common.rig_config();
    const EventWindow window = load_window(flags.in_path, nullptr);
    const SearchSpace space = flags.space();
    const LossSpec loss = flags.loss();
    const SolveReport report = solve(window, space, loss, flags.solver(), rc.rig, rc.K,
                                     rc.width, rc.height);

    Manifest record{{"omega_hat", fmt(report.theta_hat.omega)},
                    {"v_hat", fmt(report.theta_hat.v)},
                    {"loss", fmt(report.best_lower)},
                    {"lower", fmt(report.best_lower)},
                    {"upper", fmt(report.best_upper)},
                    {"branches", std::to_string(report.branches_explored)},
                    {"pruned", std::to_string(report.branches_pruned)},
                    {"terminated_by", termination_name(report.terminated_by)},
                    {"wall_s", fmt(report.wall_time)}};
    for (const auto& [key, value] : record) std::cout << key << ": " << value << "\n";

    Manifest manifest{{"command", cmdline}};
    manifest.insert(manifest.end(), record.begin(), record.end());
    write_manifest(common.manifest_path, manifest);
    return 0;
}

int cmd_grid(const CommonFlags& common, const SolveFlags& flags, double step_omega,
             double step_v, const std::string& cmdline) {
    const RigConfig rc = common.rig_config();
    const EventWindow window = load_window(flags.in_path, nullptr);
    const SearchSpace space = flags.space();
    const GridSpec spec =
        padded_grid(rc.width, rc.height, space, window.duration, rc.rig, rc.K);

    const auto start = std::chrono::steady_clock::now();
    const auto [theta, value] =
        grid_search(window, space, step_omega, step_v, flags.loss(), rc.rig, rc.K, spec);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Manifest record{{"omega_hat", fmt(theta.omega)},
                    {"v_hat", fmt(theta.v)},
                    {"loss", fmt(value)},
                    {"wall_s", fmt(wall)}};
    for (const auto& [key, val] : record) std::cout << key << ": " << val << "\n";

    Manifest manifest{{"command", cmdline}};
    manifest.insert(manifest.end(), record.begin(), record.end());
    write_manifest(common.manifest_path, manifest);
    return 0;
}

int cmd_local(const CommonFlags& common, const SolveFlags& flags, double omega0, double v0,
              double sigma, const std::string& cmdline) {
    const RigConfig rc = common.rig_config();
    const EventWindow window = load_window(flags.in_path, nullptr);
    const SearchSpace space = flags.space();
    const GridSpec spec =
        padded_grid(rc.width, rc.height, space, window.duration, rc.rig, rc.K);

    GradientAscentConfig ga;
    ga.sigma = sigma;
    const auto start = std::chrono::steady_clock::now();
    const auto [theta, value] =
        gradient_ascent(window, {omega0, v0}, flags.loss(), ga, rc.rig, rc.K, spec);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Manifest record{{"omega_hat", fmt(theta.omega)},
                    {"v_hat", fmt(theta.v)},
                    {"loss", fmt(value)},
                    {"wall_s", fmt(wall)}};
    for (const auto& [key, val] : record) std::cout << key << ": " << val << "\n";

    Manifest manifest{{"command", cmdline}};
    manifest.insert(manifest.end(), record.begin(), record.end());
    write_manifest(common.manifest_path, manifest);
    return 0;
}

std::vector<MotionParams> read_theta_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<MotionParams> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        MotionParams theta{};
        if (row >> theta.omega >> theta.v) out.push_back(theta);
    }
    return out;
}

int cmd_eval(const CommonFlags& common, const std::string& estimates_path,
             const std::string& truth_path, const std::string& cmdline) {
    const std::vector<MotionParams> estimates = read_theta_file(estimates_path);
    const std::vector<MotionParams> truth_params = read_theta_file(truth_path);
    std::vector<GroundTruth> truths;
    truths.reserve(truth_params.size());
    for (const MotionParams& t : truth_params) truths.push_back({t.omega, t.v});

    const auto [rms_omega, rms_v] = rms_eval(estimates, truths);
    Manifest record{{"rms_omega_degps", fmt(rms_omega)}, {"rms_v_mps", fmt(rms_v)}};
    for (const auto& [key, val] : record) std::cout << key << ": " << val << "\n";

    Manifest manifest{{"command", cmdline}};
    manifest.insert(manifest.end(), record.begin(), record.end());
    write_manifest(common.manifest_path, manifest);
    return 0;
}

struct BenchRow {
    std::uint64_t seed = 0;
    double ne_ratio = 0.0;
    double omega_err_degps = 0.0;
    double v_err_mps = 0.0;
    double loss = 0.0;
    std::int64_t branches = 0;
    double wall_s = 0.0;
};

int cmd_bench(const CommonFlags& common, const SolveFlags& flags, int trials,
              const std::string& ne_ratios_text, double omega, double v, double dt, int events,
              int segments, double extent, double depth, std::uint64_t seed_base,
              const std::string& out_path, const std::string& cmdline) {
    std::vector<double> ratios;
    {
        std::string item;
        std::istringstream list(ne_ratios_text);
        while (std::getline(list, item, ',')) {
            if (!item.empty()) ratios.push_back(std::stod(item));
        }
    }
    if (ratios.empty()) ratios.push_back(0.0);

    const RigConfig rc = common.rig_config();
    SimConfig sim_cfg;
    sim_cfg.K = rc.K;
    sim_cfg.rig = rc.rig;
    sim_cfg.rig.d = depth;
    sim_cfg.width = rc.width;
    sim_cfg.height = rc.height;
    const LossSpec loss = flags.loss();
    const SearchSpace space = flags.space();
    const SolverConfig solver_cfg = flags.solver();

    std::vector<BenchRow> rows(static_cast<std::size_t>(trials) * ratios.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            const int trial = static_cast<int>(i) / static_cast<int>(ratios.size());
            const double ratio = ratios[i % ratios.size()];
            const std::uint64_t seed = seed_base + 10 * static_cast<std::uint64_t>(trial);

            const PlanarScene scene = generate_scene(segments, extent, depth, seed);
            EventWindow window =
                generate_events(scene, {omega, v}, events, dt, sim_cfg, seed + 1);
            if (ratio > 0.0) {
                GridSpec sensor;
                sensor.width = sim_cfg.width;
                sensor.height = sim_cfg.height;
                window = add_noise(window, {ratio, seed + 2}, sensor);
            }
            const SolveReport report = solve(window, space, loss, solver_cfg, sim_cfg.rig,
                                             sim_cfg.K, sim_cfg.width, sim_cfg.height);
            BenchRow& row = rows[i];
            row.seed = seed;
            row.ne_ratio = ratio;
            row.omega_err_degps = (report.theta_hat.omega - omega) * kRadToDeg;
            row.v_err_mps = report.theta_hat.v - v;
            row.loss = report.best_lower;
            row.branches = report.branches_explored;
            row.wall_s = report.wall_time;
        }
    };

    const int n_threads = std::min<int>(thread_budget(), static_cast<int>(rows.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::ofstream csv(out_path);
    if (!csv) throw std::runtime_error("cannot open " + out_path);
    csv << "seed,ne_ratio,omega_err_degps,v_err_mps,loss,branches,wall_s\n";
    for (const BenchRow& row : rows) {
        csv << row.seed << ',' << fmt(row.ne_ratio) << ',' << fmt(row.omega_err_degps) << ','
            << fmt(row.v_err_mps) << ',' << fmt(row.loss) << ',' << row.branches << ','
            << fmt(row.wall_s) << "\n";
    }

    Manifest manifest{{"command", cmdline},
                      {"trials", std::to_string(trials)},
                      {"ne_ratios", ne_ratios_text},
                      {"omega", fmt(omega)},
                      {"v", fmt(v)},
                      {"seed", std::to_string(seed_base)},
                      {"rows", std::to_string(rows.size())},
                      {"out", out_path}};
    write_manifest(common.manifest_path.empty() ? out_path + ".manifest" : common.manifest_path,
                   manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"globally-optimal contrast maximisation for planar event-camera motion"};
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic event stream");
    CommonFlags sim_common;
    int segments = 100, n_events = 1000;
    double dt = 0.1, gt_omega = 0.5, gt_v = 0.5, ne_ratio = 0.0, extent = 4.0, depth = 2.0;
    std::uint64_t seed = 0;
    bool continuous_px = false;
    std::string out_path = "events.txt";
    sim->add_option("--segments", segments, "line segments in the scene");
    sim->add_option("--events", n_events, "signal events to generate");
    sim->add_option("--dt", dt, "window length [s]");
    sim->add_option("--omega", gt_omega, "ground-truth yaw rate [rad/s]");
    sim->add_option("--v", gt_v, "ground-truth speed [m/s]");
    sim->add_option("--ne-ratio", ne_ratio, "noise events per signal event");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--extent", extent, "scene side length [m]");
    sim->add_option("--depth", depth, "ground-plane depth [m]");
    sim->add_flag("--continuous-px", continuous_px, "keep sub-pixel coordinates");
    sim->add_option("--out", out_path, "output event file");
    sim_common.attach(sim, "");

    // solve
    auto* slv = app.add_subcommand("solve", "branch-and-bound global optimum");
    CommonFlags solve_common;
    SolveFlags solve_flags;
    solve_flags.attach(slv);
    solve_common.attach(slv, "solve.manifest");

    // grid
    auto* grd = app.add_subcommand("grid", "exhaustive lattice search");
    CommonFlags grid_common;
    SolveFlags grid_flags;
    double step_omega = 0.001, step_v = 0.001;
    grid_flags.attach(grd);
    grd->add_option("--step-omega", step_omega, "lattice step in omega");
    grd->add_option("--step-v", step_v, "lattice step in v");
    grid_common.attach(grd, "grid.manifest");

    // local
    auto* loc = app.add_subcommand("local", "gradient ascent on the smoothed loss");
    CommonFlags local_common;
    SolveFlags local_flags;
    double omega0 = 0.5, v0 = 0.5, sigma = 1.0;
    local_flags.attach(loc);
    loc->add_option("--omega0", omega0, "initial omega [rad/s]");
    loc->add_option("--v0", v0, "initial v [m/s]");
    loc->add_option("--sigma", sigma, "smoothing kernel width [px]");
    local_common.attach(loc, "local.manifest");

    // eval
    auto* evl = app.add_subcommand("eval", "RMS errors of estimates vs ground truth");
    CommonFlags eval_common;
    std::string estimates_path, truth_path;
    evl->add_option("--estimates", estimates_path, "file of `omega v` lines")->required();
    evl->add_option("--truth", truth_path, "file of `omega v` lines")->required();
    eval_common.attach(evl, "eval.manifest");

    // bench
    auto* bch = app.add_subcommand("bench", "seeded trial battery, CSV output");
    CommonFlags bench_common;
    SolveFlags bench_flags;
    int trials = 10;
    std::string ne_ratios_text = "0";
    double b_omega = 0.5, b_v = 0.5, b_dt = 0.1;
    int b_events = 1000, b_segments = 100;
    double b_extent = 4.0, b_depth = 2.0;
    std::uint64_t b_seed = 0;
    std::string bench_out = "bench.csv";
    bch->add_option("--loss", bench_flags.loss_name, "sos|var|soe|sosa|soeas|sosaas")
        ->required();
    bch->add_option("--delta", bench_flags.delta, "suppressed-accumulation scale");
    bch->add_option("--omega-range", bench_flags.omega_range, "omega interval a:b");
    bch->add_option("--v-range", bench_flags.v_range, "v interval a:b");
    bch->add_option("--eps-omega", bench_flags.eps_omega, "width tolerance in omega");
    bch->add_option("--eps-v", bench_flags.eps_v, "width tolerance in v");
    bch->add_option("--nb", bench_flags.nb, "branching limit");
    bch->add_option("--mode", bench_flags.mode, "either|both")
        ->check(CLI::IsMember({"either", "both"}));
    bch->add_option("--trials", trials, "seeded trials per ratio");
    bch->add_option("--ne-ratios", ne_ratios_text, "comma list of noise ratios");
    bch->add_option("--omega", b_omega, "ground-truth yaw rate [rad/s]");
    bch->add_option("--v", b_v, "ground-truth speed [m/s]");
    bch->add_option("--dt", b_dt, "window length [s]");
    bch->add_option("--events", b_events, "signal events per trial");
    bch->add_option("--segments", b_segments, "line segments in the scene");
    bch->add_option("--extent", b_extent, "scene side length [m]");
    bch->add_option("--depth", b_depth, "ground-plane depth [m]");
    bch->add_option("--seed", b_seed, "base RNG seed");
    bch->add_option("--out", bench_out, "output CSV path");
    bench_common.attach(bch, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_common, segments, n_events, dt, gt_omega, gt_v, ne_ratio,
                                seed, extent, depth, continuous_px, out_path, cmdline);
        }
        if (slv->parsed()) return cmd_solve(solve_common, solve_flags, cmdline);
        if (grd->parsed()) return cmd_grid(grid_common, grid_flags, step_omega, step_v, cmdline);
        if (loc->parsed()) return cmd_local(local_common, local_flags, omega0, v0, sigma, cmdline);
        if (evl->parsed()) return cmd_eval(eval_common, estimates_path, truth_path, cmdline);
        if (bch->parsed()) {
            return cmd_bench(bench_common, bench_flags, trials, ne_ratios_text, b_omega, b_v,
                             b_dt, b_events, b_segments, b_extent, b_depth, b_seed, bench_out,
                             cmdline);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntervalTooWideError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
