// Copyright 2026 The HESIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hesim/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hesim/aps_calib.hpp"
#include "hesim/errors.hpp"
#include "hesim/evs_calib.hpp"
#include "hesim/fixture.hpp"
#include "hesim/frame_stack.hpp"
#include "hesim/io/calibration_file.hpp"
#include "hesim/io/digest.hpp"
#include "hesim/io/hevt.hpp"
#include "hesim/io/hraw.hpp"
#include "hesim/io/image_io.hpp"
#include "hesim/isp.hpp"
#include "hesim/parallel.hpp"
#include "hesim/simulator.hpp"
#include "hesim/validation.hpp"

namespace hesim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json(const fs::path& path) {
    if (!fs::exists(path)) throw MissingFileError(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

bool is_hraw(const fs::path& p) { return p.extension() == ".hraw"; }

/// Frame files of each stack below `dir`: every subdirectory with HRAW
/// files is one stack; HRAW files directly inside `dir` form one stack per
/// exposure.
std::vector<std::vector<fs::path>> find_stacks(const fs::path& dir) {
    if (!fs::exists(dir)) throw MissingFileError(dir);
    if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    std::vector<fs::path> subdirs;
    std::vector<fs::path> loose;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) subdirs.push_back(entry.path());
        if (entry.is_regular_file() && is_hraw(entry.path())) loose.push_back(entry.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    std::sort(loose.begin(), loose.end());
    std::vector<std::vector<fs::path>> stacks;
    for (const auto& sub : subdirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(sub)) {
            if (entry.is_regular_file() && is_hraw(entry.path())) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (!files.empty()) stacks.push_back(std::move(files));
    }
    std::map<std::uint64_t, std::vector<fs::path>> by_exposure;
    for (const auto& f : loose) by_exposure[io::read_hraw(f).exposure_us].push_back(f);
    for (auto& [dt, files] : by_exposure) stacks.push_back(std::move(files));
    if (stacks.empty()) throw InsufficientDataError("no HRAW frames found under " + dir.string());
    return stacks;
}

struct LoadedStack {
    FrameStack stack;
    std::uint16_t bit_depth = 0;
};

LoadedStack load_stack(const std::vector<fs::path>& files, bool dark) {
    LoadedStack out;
    out.stack.is_dark = dark;
    std::optional<std::uint64_t> exposure;
    for (const auto& f : files) {
        RawFrame raw = io::read_hraw(f);
        if (exposure && raw.exposure_us != *exposure) {
            throw FormatError(f.string() + ": exposure differs from the rest of its stack");
        }
        if (out.bit_depth != 0 && raw.bit_depth != out.bit_depth) {
            throw FormatError(f.string() + ": bit depth differs from the rest of its stack");
        }
        exposure = raw.exposure_us;
        out.bit_depth = raw.bit_depth;
        out.stack.exposure_ms = raw.exposure_ms();
        out.stack.frames.push_back(to_plane(raw));
    }
    try {
        out.stack.validate();
    } catch (const Error& e) {
        throw InsufficientDataError(files.front().parent_path().string() + ": " + e.what());
    }
    return out;
}

std::string format_beta(const VarianceCoefficients& b) {
    std::ostringstream s;
    s.precision(6);
    for (std::size_t i = 0; i < b.size(); ++i) s << (i ? " " : "") << b[i];
    return s.str();
}

// ---------------------------------------------------------------- commands

struct CalibrateApsArgs {
    std::string dark;
    std::string illum;
    std::string out;
    std::string cfa = "gen2";
    std::string isp;
};

void calibrate_aps(const CalibrateApsArgs& a, std::size_t threads, std::ostream& out) {
    const CfaLayout cfa = CfaLayout::preset(a.cfa);
    std::uint16_t bit_depth = 0;
    auto check_depth = [&](std::uint16_t bd) {
        if (bit_depth != 0 && bd != bit_depth) throw FormatError("calibration frames mix bit depths");
        bit_depth = bd;
    };

    std::vector<double> exposures;
    std::vector<ImagePlane> means;
    for (const auto& files : find_stacks(a.dark)) {
        LoadedStack s = load_stack(files, true);
        check_depth(s.bit_depth);
        exposures.push_back(s.stack.exposure_ms);
        means.push_back(stack_mean_var(s.stack).mean);
    }
    const aps::DarkCalibration dark = aps::calibrate_dark_from_means(exposures, means);
    out << "dark: " << means.size() << " stacks, " << dark.n_fp.width() << "x" << dark.n_fp.height() << "\n";

    // Illuminated stacks are summarized one at a time to bound memory.
    const auto illum_stacks = find_stacks(a.illum);
    std::vector<aps::StackStatistics> stats(illum_stacks.size());
    std::vector<std::uint16_t> depths(illum_stacks.size());
    parallel_for(illum_stacks.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            LoadedStack s = load_stack(illum_stacks[i], false);
            depths[i] = s.bit_depth;
            stats[i] = aps::summarize_stack(s.stack);
        }
    });
    for (auto d : depths) check_depth(d);
    const auto beta = aps::calibrate_variance(stats, dark, cfa);

    io::Calibration cal{dark.n_fp.width(), dark.n_fp.height(), cfa, {}, std::nullopt, std::nullopt, {}};
    if (!a.isp.empty()) {
        cal.isp = io::isp_from_json(read_json(a.isp));
    } else {
        cal.isp.white_level = static_cast<double>((1u << bit_depth) - 1u);
    }
    cal.aps = aps::make_params(dark, beta, bit_depth);
    io::save_calibration(a.out, cal);
    out << "illuminated: " << stats.size() << " stacks; " << beta.size() << " variance polynomials\n";
    for (std::size_t p = 0; p < beta.size(); ++p) out << "  position " << p << ": " << format_beta(beta[p]) << "\n";
    out << "wrote " << a.out << "\n";
}

struct CalibrateEvsArgs {
    std::string events;
    std::string intensity;
    std::uint64_t trials = 0;
    std::string cal;
    std::string out;
    std::string dark_events;
    std::uint64_t dark_trials = 0;
    double theta_hw = 0.75;
    double mask_k = 5.0;
};

void calibrate_evs(const CalibrateEvsArgs& a, std::ostream& out) {
    io::Calibration cal = io::load_calibration(a.cal);
    if (!cal.cfa.has_evs()) throw LayoutError("layout '" + cal.cfa.name() + "' has no EVS pixels");
    const std::size_t ew = cal.cfa.evs_width(cal.width);
    const std::size_t eh = cal.cfa.evs_height(cal.height);
    auto check_grid = [&](std::size_t w, std::size_t h, const std::string& what) {
        if (w != ew || h != eh) {
            throw LayoutError(what + " is " + std::to_string(w) + "x" + std::to_string(h) + ", EVS grid is " +
                              std::to_string(ew) + "x" + std::to_string(eh));
        }
    };
    const io::EventStream stream = io::read_hevt(a.events);
    check_grid(stream.width, stream.height, a.events);
    const ImagePlane intensity = io::read_hraw_plane(a.intensity);
    check_grid(intensity.width(), intensity.height(), a.intensity);

    const auto obs = evs::count_events(stream.events, intensity, a.trials);
    evs::EvsFitOptions options;
    options.theta_hw = a.theta_hw;
    const auto fit = evs::fit_evs_params(obs, options);

    EvsNoiseParams params = EvsNoiseParams::with_zero_maps(ew, eh, fit.beta, a.theta_hw);
    std::size_t low_confidence = 0;
    if (!a.dark_events.empty()) {
        const io::EventStream dark = io::read_hevt(a.dark_events);
        check_grid(dark.width, dark.height, a.dark_events);
        const auto dark_obs = evs::count_events(dark.events, ImagePlane(ew, eh), a.dark_trials ? a.dark_trials : a.trials);
        auto mu = evs::estimate_mu_offsets(dark_obs, ew, eh, params.theta());
        params.mu_n = std::move(mu.mu_n);
        low_confidence = mu.low_confidence.count();
    }
    params.bad_pixel_mask = evs::build_bad_pixel_mask(obs, fit.beta, a.theta_hw, params.mu_n, a.mask_k);

    json levels = json::array();
    for (const auto& l : fit.diagnostics.levels) {
        levels.push_back({{"i_c", l.i_c},
                          {"n_trials", l.n_trials},
                          {"y_observed", l.y_observed},
                          {"y_model", l.y_model},
                          {"residual", l.residual},
                          {"residual_on", l.residual_plus},
                          {"residual_off", l.residual_minus}});
    }
    const json diagnostics = {{"converged", fit.diagnostics.converged},
                              {"iterations", fit.diagnostics.iterations},
                              {"rmse", fit.diagnostics.rmse},
                              {"low_confidence_offsets", low_confidence},
                              {"levels", levels}};
    cal.evs = std::move(params);
    cal.evs_diagnostics_json = diagnostics.dump();
    const std::string target = a.out.empty() ? a.cal : a.out;
    io::save_calibration(target, cal);

    out << "levels: " << fit.diagnostics.levels.size() << ", converged: " << (fit.diagnostics.converged ? "yes" : "no")
        << ", iterations: " << fit.diagnostics.iterations << ", probit rmse: " << fit.diagnostics.rmse << "\n";
    out << "beta_e:";
    for (double b : cal.evs->beta_e) out << " " << b;
    out << "\nbad pixels: " << cal.evs->bad_pixel_mask.count() << ", low-confidence offsets: " << low_confidence
        << "\nwrote " << target << "\n";
}

struct SimulateArgs {
    std::string input;
    std::string cal;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    bool csv = false;
};

json sim_config_json(const sim::SimConfig& c) {
    return {{"input_fps", c.input_fps},
            {"aps_exposure_ms", c.aps_exposure_ms},
            {"aps_frame_period_ms", c.aps_frame_period_ms},
            {"evs_rate_divisor", c.evs_rate_divisor},
            {"baseline", c.baseline == evs::Baseline::per_step ? "per-step" : "on-event"}};
}

sim::SimConfig sim_config_from_json(const json& j) {
    sim::SimConfig c;
    try {
        c.input_fps = j.value("input_fps", c.input_fps);
        c.aps_exposure_ms = j.value("aps_exposure_ms", c.aps_exposure_ms);
        c.aps_frame_period_ms = j.value("aps_frame_period_ms", c.aps_frame_period_ms);
        c.evs_rate_divisor = j.value("evs_rate_divisor", c.evs_rate_divisor);
        const std::string baseline = j.value("baseline", std::string("per-step"));
        if (baseline == "on-event") {
            c.baseline = evs::Baseline::on_event;
        } else if (baseline != "per-step") {
            throw FormatError("simulation config: unknown baseline '" + baseline + "'");
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("simulation config: ") + e.what());
    }
    return c;
}

void simulate(const SimulateArgs& a, std::size_t threads, std::ostream& out) {
    const io::Calibration cal = io::load_calibration(a.cal);
    if (!cal.aps) throw FormatError(a.cal + ": calibration has no APS section");
    const EvsNoiseParams evs_params =
        cal.evs ? *cal.evs
                : EvsNoiseParams::with_zero_maps(cal.cfa.evs_width(cal.width), cal.cfa.evs_height(cal.height),
                                                 {1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 0.75);
    if (cal.cfa.has_evs() && !cal.evs) throw FormatError(a.cal + ": calibration has no EVS section");

    sim::SimConfig config = a.config.empty() ? sim::SimConfig{} : sim_config_from_json(read_json(a.config));
    config.seed = a.seed;
    config.threads = threads;
    config.validate();

    auto source = sim::open_frame_source(a.input);
    const fs::path out_dir(a.out);
    fs::create_directories(out_dir / "raw");

    json raw_entries = json::array();
    const auto result = sim::simulate(
        *source, config, cal.cfa, *cal.aps, evs_params, cal.isp,
        [&](const sim::ApsFrameInfo& info, const RawFrame& raw) {
            char name[32];
            std::snprintf(name, sizeof name, "%06zu.hraw", info.index);
            const auto bytes = io::encode_hraw(raw);
            io::write_file(out_dir / "raw" / name, bytes);
            raw_entries.push_back({{"file", std::string("raw/") + name},
                                   {"index", info.index},
                                   {"start_us", info.start_us},
                                   {"exposure_us", raw.exposure_us},
                                   {"source_frames", info.source_frames},
                                   {"sha256", io::sha256_hex(bytes)}});
        });

    const io::EventStream stream{result.evs_width, result.evs_height, result.events};
    const auto event_bytes = io::encode_hevt(stream);
    io::write_file(out_dir / "events.hevt", event_bytes);
    if (a.csv) io::write_events_csv(out_dir / "events.csv", result.events);
    if (result.evs_width > 0) io::write_hraw_plane(out_dir / "evs_brightness.hraw", result.evs_mean_intensity);

    // Digests of every parameter file the run depended on.
    json params = json::object();
    const fs::path cal_path(a.cal);
    params[cal_path.filename().string()] = io::sha256_file(cal_path);
    for (const auto& entry : fs::directory_iterator(cal_path.parent_path().empty() ? fs::path(".") : cal_path.parent_path())) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(cal_path.stem().string() + ".", 0) == 0 && is_hraw(entry.path())) {
            params[name] = io::sha256_file(entry.path());
        }
    }
    json inputs = json::array();
    std::map<fs::path, std::string> digest_cache;
    for (const auto& f : source->files()) {
        auto it = digest_cache.find(f);
        if (it == digest_cache.end()) it = digest_cache.emplace(f, io::sha256_file(f)).first;
        inputs.push_back({{"file", f.string()}, {"sha256", it->second}});
    }
    const json manifest = {{"tool", "hesim"},
                           {"seed", config.seed},
                           {"config", sim_config_json(config)},
                           {"cfa", cal.cfa.name()},
                           {"calibration", a.cal},
                           {"parameter_digests", params},
                           {"input_frames", inputs},
                           {"raw_frames", raw_entries},
                           {"events",
                            {{"file", "events.hevt"},
                             {"count", result.events.size()},
                             {"sha256", io::sha256_hex(event_bytes)}}},
                           {"evs_steps", result.evs_steps},
                           {"evs_width", result.evs_width},
                           {"evs_height", result.evs_height}};
    write_json(out_dir / "manifest.json", manifest);
    out << "input frames: " << source->size() << ", APS frames: " << result.aps_frames.size()
        << ", EVS steps: " << result.evs_steps << ", events: " << result.events.size() << "\nwrote " << a.out << "\n";
}

struct IspArgs {
    bool forward = false;
    bool inverse = false;
    std::string cal;
    std::string in;
    std::string out;
    int bit_depth = 8;
};

void run_isp(const IspArgs& a, std::ostream& out) {
    const io::Calibration cal = io::load_calibration(a.cal);
    if (a.forward) {
        const RawFrame raw = io::read_hraw(a.in);
        const ApsNoiseParams aps =
            cal.aps ? *cal.aps : ApsNoiseParams::zero(raw.width, raw.height, cal.cfa.position_count(), raw.bit_depth);
        io::write_image(a.out, isp::forward_pipeline(raw, aps, cal.isp, cal.cfa), a.bit_depth);
    } else {
        const RgbImage img = io::read_image(a.in);
        io::write_hraw_plane(a.out, isp::inverse_pipeline(img, cal.isp, cal.cfa));
    }
    out << "wrote " << a.out << "\n";
}

struct ValidateArgs {
    std::string events;
    std::string intensity;
    std::string cal;
    std::string report;
    std::uint64_t trials = 0;
    std::size_t bins = 8;
};

void validate(const ValidateArgs& a, std::ostream& out) {
    const io::Calibration cal = io::load_calibration(a.cal);
    if (!cal.evs) throw FormatError(a.cal + ": calibration has no EVS section");
    std::uint64_t trials = a.trials;
    if (trials == 0) {
        const fs::path manifest = fs::path(a.events).parent_path() / "manifest.json";
        if (!fs::exists(manifest)) {
            throw InsufficientDataError("--trials not given and no manifest.json next to " + a.events);
        }
        trials = read_json(manifest).value("evs_steps", std::uint64_t{0});
        if (trials == 0) throw InsufficientDataError(manifest.string() + " records no EVS steps");
    }
    const io::EventStream stream = io::read_hevt(a.events);
    const ImagePlane brightness = io::read_hraw_plane(a.intensity);
    if (stream.width != brightness.width() || stream.height != brightness.height()) {
        throw LayoutError("event grid and brightness map differ in size");
    }
    const auto report = sim::validate_statistics(stream.events, brightness, *cal.evs, trials, a.bins);
    write_json(a.report, sim::report_to_json(report));
    out << "pixels: " << report.pixels_used << ", trials: " << trials << ", ON: " << report.on_events
        << ", OFF: " << report.off_events << "\n";
    if (report.log_fit.valid) {
        out << "log-histogram fit: slope " << report.log_fit.slope << ", R^2 " << report.log_fit.r_squared << " over "
            << report.log_fit.bins << " bins\n";
    } else {
        out << "log-histogram fit: not enough populated bins\n";
    }
    out << "wrote " << a.report << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid APS/EVS sensor noise calibration and simulation", "hesim"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "Worker threads (never changes outputs)")->check(CLI::PositiveNumber);

    CalibrateApsArgs aps_args;
    auto* aps_cmd = app.add_subcommand("calibrate-aps", "Estimate APS noise parameters from dark and flat stacks");
    aps_cmd->add_option("--dark", aps_args.dark, "Directory of dark stacks")->required();
    aps_cmd->add_option("--illum", aps_args.illum, "Directory of illuminated stacks")->required();
    aps_cmd->add_option("--out", aps_args.out, "Calibration file to write")->required();
    aps_cmd->add_option("--cfa", aps_args.cfa, "CFA preset")
        ->check(CLI::IsMember(CfaLayout::preset_names()))
        ->capture_default_str();
    aps_cmd->add_option("--isp", aps_args.isp, "ISP configuration (JSON)");

    CalibrateEvsArgs evs_args;
    auto* evs_cmd = app.add_subcommand("calibrate-evs", "Fit EVS trigger parameters from static-scene event counts");
    evs_cmd->add_option("--events", evs_args.events, "HEVT stream of the graded static scene")->required();
    evs_cmd->add_option("--intensity", evs_args.intensity, "Clean EVS-grid intensity map (HRAW)")->required();
    evs_cmd->add_option("--trials", evs_args.trials, "Sampling intervals in the stream")
        ->required()
        ->check(CLI::PositiveNumber);
    evs_cmd->add_option("--cal", evs_args.cal, "Calibration file to extend")->required();
    evs_cmd->add_option("--out", evs_args.out, "Output calibration file (default: update --cal)");
    evs_cmd->add_option("--dark-events", evs_args.dark_events, "HEVT stream recorded in darkness");
    evs_cmd->add_option("--dark-trials", evs_args.dark_trials, "Sampling intervals in the dark stream");
    evs_cmd->add_option("--theta-hw", evs_args.theta_hw, "Hardware threshold")->capture_default_str();
    evs_cmd->add_option("--mask-k", evs_args.mask_k, "Bad-pixel MAD multiplier")->capture_default_str();

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate RAW frames and events from a frame sequence");
    sim_cmd->add_option("--input", sim_args.input, "Frame directory or frame-list file")->required();
    sim_cmd->add_option("--cal", sim_args.cal, "Calibration file")->required();
    sim_cmd->add_option("--config", sim_args.config, "Simulation configuration (JSON)");
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_args.out, "Output directory")->required();
    sim_cmd->add_flag("--csv", sim_args.csv, "Also export events as CSV");

    IspArgs isp_args;
    auto* isp_cmd = app.add_subcommand("isp", "Run the forward (RAW to sRGB) or inverse ISP");
    auto* fwd = isp_cmd->add_flag("--forward", isp_args.forward, "HRAW input to PNG/PPM output");
    auto* inv = isp_cmd->add_flag("--inverse", isp_args.inverse, "PNG/PPM input to clean mosaic (HRAW)");
    fwd->excludes(inv);
    inv->excludes(fwd);
    isp_cmd->add_option("--cal", isp_args.cal, "Calibration file")->required();
    isp_cmd->add_option("--bit-depth", isp_args.bit_depth, "Output image bit depth")
        ->check(CLI::IsMember({8, 16}))
        ->capture_default_str();
    isp_cmd->add_option("input", isp_args.in, "Input file")->required();
    isp_cmd->add_option("output", isp_args.out, "Output file")->required();

    ValidateArgs val_args;
    auto* val_cmd = app.add_subcommand("validate", "Summarize event statistics of a static-scene simulation");
    val_cmd->add_option("--events", val_args.events, "HEVT stream")->required();
    val_cmd->add_option("--intensity", val_args.intensity, "EVS-grid brightness map (HRAW)")->required();
    val_cmd->add_option("--cal", val_args.cal, "Calibration file with the expected parameters")->required();
    val_cmd->add_option("--report", val_args.report, "Report file (JSON)")->required();
    val_cmd->add_option("--trials", val_args.trials, "Sampling intervals (default: from manifest.json)");
    val_cmd->add_option("--bins", val_args.bins, "Brightness bins")->capture_default_str();

    fixture::FixtureSpec fx;
    std::string fx_out;
    auto* fx_cmd = app.add_subcommand("synth-fixture", "Write a synthetic data set with known parameters");
    fx_cmd->add_option("--out", fx_out, "Output directory")->required();
    fx_cmd->add_option("--preset", fx.preset, "CFA preset")
        ->check(CLI::IsMember(CfaLayout::preset_names()))
        ->capture_default_str();
    fx_cmd->add_option("--width", fx.width, "Sensor width")->capture_default_str();
    fx_cmd->add_option("--height", fx.height, "Sensor height")->capture_default_str();
    fx_cmd->add_option("--bit-depth", fx.bit_depth, "RAW bit depth")->check(CLI::Range(8, 16))->capture_default_str();
    fx_cmd->add_option("--frames-per-stack", fx.frames_per_stack, "Frames per APS stack")->capture_default_str();
    fx_cmd->add_option("--evs-trials", fx.evs_trials, "EVS sampling intervals per scene")->capture_default_str();
    fx_cmd->add_option("--video-frames", fx.video_frames, "Frames in the simulator input sequences")
        ->capture_default_str();
    fx_cmd->add_option("--seed", fx.seed, "Random seed")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*aps_cmd) {
            calibrate_aps(aps_args, threads, out);
        } else if (*evs_cmd) {
            calibrate_evs(evs_args, out);
        } else if (*sim_cmd) {
            simulate(sim_args, threads, out);
        } else if (*isp_cmd) {
            if (!isp_args.forward && !isp_args.inverse) {
                err << "isp: one of --forward or --inverse is required\n" << isp_cmd->help();
                return kExitUsage;
            }
            run_isp(isp_args, out);
        } else if (*val_cmd) {
            validate(val_args, out);
        } else if (*fx_cmd) {
            fx.threads = threads;
            fixture::write_fixture(fx_out, fx);
            out << "wrote fixture to " << fx_out << "\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace hesim
