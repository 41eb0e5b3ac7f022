#include "vibro/band.hpp"
#include "vibro/frame_io.hpp"
#include "vibro/harris.hpp"
#include "vibro/multipoint.hpp"
#include "vibro/phase.hpp"
#include "vibro/reports.hpp"
#include "vibro/spectral.hpp"
#include "vibro/types.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace vibro;

namespace {

int to_int(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": bad integer '" + s + "'");
    }
}

Roi parse_roi(const std::string& s) {
    Roi r;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &r.x0, &r.y0, &r.width,
                    &r.height) != 4)
        throw ConfigError("roi must be x0,y0,width,height (got '" + s + "')");
    return r;
}

WeightKernel parse_kernel(const std::string& s) {
    if (s.rfind("file:", 0) == 0)
        return WeightKernel::from_file(s.substr(5));
    if (s.rfind("uniform-", 0) == 0)
        return WeightKernel::uniform(to_int(s.substr(8), "kernel size"));
    int a = 0, b = 0;
    if (std::sscanf(s.c_str(), "%dx%d", &a, &b) == 2 && a == b)
        return WeightKernel::binomial(a);
    throw ConfigError("kernel must be NxN, uniform-N, or file:PATH (got '" +
                      s + "')");
}

Pattern parse_pattern(const std::string& s) {
    if (s == "grating") return Pattern::Grating;
    if (s == "checkerboard") return Pattern::Checkerboard;
    if (s == "blob") return Pattern::Blob;
    throw ConfigError("pattern must be grating, checkerboard, or blob");
}

Window parse_window(const std::string& s) {
    if (s == "rect") return Window::Rect;
    if (s == "hann") return Window::Hann;
    throw ConfigError("window must be rect or hann");
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// CLI11 only reads config files attached to the root app, so each subcommand
// handles its own: every key fills the matching option unless the command
// line already set it.
void apply_config(CLI::App* cmd) {
    CLI::Option* copt = cmd->get_option_no_throw("--config");
    if (copt == nullptr || copt->empty()) return;
    const std::string path = copt->as<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trimmed(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = trimmed(line.substr(0, eq));
        std::string value = trimmed(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key == "config") continue;
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw ConfigError(path + ": unknown option '" + key + "' for " +
                              cmd->get_name());
        if (op->count() > 0) continue;  // flags override the file
        op->add_result(value);
        op->run_callback();
    }
}

double peak_mag(const Spectrum& s, double f_min) {
    double best = 0;
    for (std::size_t k = 0; k < s.mag.size(); ++k)
        if (s.freqs_hz[k] >= f_min && s.freqs_hz[k] < s.fps / 2)
            best = std::max(best, s.mag[k]);
    return best;
}

// Spectrum of whichever displacement axis carries the stronger peak.
Spectrum dominant_spectrum(const DisplacementSignal& s, double f_min,
                           Window w = Window::Rect) {
    Spectrum sx = fft_spectrum(s.dx, s.fps, w);
    Spectrum sy = fft_spectrum(s.dy, s.fps, w);
    return peak_mag(sy, f_min) > peak_mag(sx, f_min) ? sy : sx;
}

// Options shared by every command that runs the measurement pipeline.
struct PipelineOpts {
    std::string input;
    std::string kernel = "5x5";
    double sigma = 2.0;
    double f_min = 0.3;
    double slope_floor = 0.02;
    int threads = 1;
    HarrisParams harris;
};

void add_pipeline_opts(CLI::App* c, PipelineOpts& o) {
    c->add_option("--input", o.input, "sequence manifest")->required();
    c->add_option("--kernel", o.kernel, "patch kernel: NxN, uniform-N, file:PATH");
    c->add_option("--sigma", o.sigma, "quadrature filter scale in px");
    c->add_option("--f-min", o.f_min, "lowest analyzed frequency in Hz");
    c->add_option("--slope-floor", o.slope_floor,
                  "min spatial phase slope in rad/px");
    c->add_option("--threads", o.threads, "worker threads");
    c->add_option("--harris-k", o.harris.k, "corner response k");
    c->add_option("--harris-window", o.harris.window_sigma,
                  "structure tensor window sigma");
    c->add_option("--harris-threshold", o.harris.threshold_rel,
                  "corner threshold relative to max response");
    c->add_option("--nms-radius", o.harris.nms_radius,
                  "non-max suppression radius");
    c->add_option("--config", "key=value config file; flags override")->type_name("TEXT");
}

MeasureParams to_params(const PipelineOpts& o) {
    MeasureParams p;
    p.sigma_px = o.sigma;
    p.slope_floor = o.slope_floor;
    p.harris = o.harris;
    p.threads = o.threads;
    return p;
}

Roi roi_or_whole(const std::string& roi_str, const FrameSequence& seq) {
    return roi_str.empty() ? Roi::whole(seq.width(), seq.height())
                           : parse_roi(roi_str);
}

void warn_if_short(const FrameSequence& seq) {
    if (seq.duration_s() < 2.0)
        std::cerr << "warning: sequence is shorter than 2 s; spectra will be "
                     "coarse\n";
}

// ---- synth ----

struct SynthOpts {
    std::string out, pattern = "grating", dir = "1,0";
    SyntheticMotionSpec spec;
    int width = 256, height = 256, depth = 8;
    double fps = 60, scale = 0;
};

void cmd_synth(const SynthOpts& o) {
    SyntheticMotionSpec spec = o.spec;
    spec.pattern = parse_pattern(o.pattern);
    if (std::sscanf(o.dir.c_str(), "%lf,%lf", &spec.direction.x(),
                    &spec.direction.y()) != 2)
        throw ConfigError("direction must be dx,dy (got '" + o.dir + "')");
    FrameSequence seq = synthesize(spec, o.width, o.height, o.fps);
    if (o.scale > 0) seq.scale_mm_per_px = o.scale;
    fs::create_directories(o.out);
    const fs::path manifest = save_sequence(seq, o.out, o.depth);
    std::cout << manifest.string() << "\n";
}

// ---- features ----

void cmd_features(const std::string& input, const std::string& out,
                  const std::string& roi_str, const std::string& overlay,
                  const HarrisParams& harris) {
    const FrameSequence seq = load_sequence(input);
    const Roi roi = roi_or_whole(roi_str, seq);
    const FeatureSet f =
        harris_corners(seq.frames[0].cast<double>(), roi, harris);
    write_features_csv(out, f);
    if (!overlay.empty())
        save_pgm(overlay, render_feature_overlay(seq.frames[0], f));
    std::cout << f.points.size() << " features\n";
}

// ---- measure ----

void cmd_measure(const PipelineOpts& o, const std::string& out_dir,
                 const std::string& roi_str, int export_signals, int max_modes,
                 double min_sep, bool mm) {
    const FrameSequence seq = load_sequence(o.input);
    warn_if_short(seq);
    const Roi roi = roi_or_whole(roi_str, seq);
    const MeasureResult res =
        measure_points(seq, roi, parse_kernel(o.kernel), to_params(o));

    fs::create_directories(fs::path(out_dir) / "signals");
    write_features_csv(fs::path(out_dir) / "features.csv", res.features);

    auto convert = [&](const DisplacementSignal& s) {
        if (!mm) return s;
        if (!seq.scale_mm_per_px)
            throw ConfigError("--mm requires scale_mm_per_px in the manifest");
        return to_units(s, *seq.scale_mm_per_px);
    };

    const DisplacementSignal mean = convert(mean_signal(res));
    write_displacement_csv(fs::path(out_dir) / "signal_mean.csv", mean);

    const int n_export =
        std::min<int>(export_signals, int(res.points.size()));
    for (int i = 0; i < n_export; ++i) {
        const auto& p = res.points[i];
        char name[64];
        std::snprintf(name, sizeof name, "point_%04d_x%d_y%d.csv", i, p.pt.x,
                      p.pt.y);
        write_displacement_csv(fs::path(out_dir) / "signals" / name,
                               convert(p.patch));
    }

    const Spectrum dom = dominant_spectrum(mean, o.f_min);
    write_spectrum_csv(fs::path(out_dir) / "spectrum_mean.csv", dom);
    write_modes_json(fs::path(out_dir) / "modes.json",
                     pick_modes(dom, max_modes, o.f_min, min_sep));

    const FrequencyMap map = dominant_frequency_map(res, o.f_min);
    write_frequency_map_csv(fs::path(out_dir) / "freqmap.csv", map);
    const RgbImage img =
        render_frequency_map(map, seq.frames[0].cast<double>());
    save_ppm(fs::path(out_dir) / "freqmap.ppm", img.r, img.g, img.b);
    std::cout << res.points.size() << " points measured\n";
}

// ---- spectrum ----

void cmd_spectrum(const std::string& input, const std::string& out,
                  const std::string& modes_out, const std::string& axis,
                  const std::string& window, double f_min, int max_modes,
                  double min_sep) {
    const DisplacementSignal s = load_displacement_csv(input);
    const Window w = parse_window(window);
    Spectrum spec;
    if (axis == "x")
        spec = fft_spectrum(s.dx, s.fps, w);
    else if (axis == "y")
        spec = fft_spectrum(s.dy, s.fps, w);
    else if (axis == "auto")
        spec = dominant_spectrum(s, f_min, w);
    else
        throw ConfigError("axis must be x, y, or auto");
    write_spectrum_csv(out, spec);
    if (!modes_out.empty())
        write_modes_json(modes_out, pick_modes(spec, max_modes, f_min, min_sep));
}

// ---- map ----

void cmd_map(const PipelineOpts& o, const std::string& roi_str,
             const std::string& out_ppm, const std::string& out_csv) {
    const FrameSequence seq = load_sequence(o.input);
    warn_if_short(seq);
    const Roi roi = roi_or_whole(roi_str, seq);
    const MeasureResult res =
        measure_points(seq, roi, parse_kernel(o.kernel), to_params(o));
    const FrequencyMap map = dominant_frequency_map(res, o.f_min);
    if (!out_csv.empty()) write_frequency_map_csv(out_csv, map);
    const RgbImage img =
        render_frequency_map(map, seq.frames[0].cast<double>());
    save_ppm(out_ppm, img.r, img.g, img.b);
}

// ---- bands ----

void cmd_bands(const PipelineOpts& o, const std::vector<std::string>& roi_specs,
               const std::string& out_json, double epsilon, int max_modes,
               double min_sep) {
    const FrameSequence seq = load_sequence(o.input);
    warn_if_short(seq);

    std::vector<std::pair<std::string, Roi>> rois;
    if (roi_specs.empty()) {
        rois.emplace_back("whole", Roi::whole(seq.width(), seq.height()));
    } else {
        int unnamed = 0;
        for (const std::string& s : roi_specs) {
            const auto colon = s.find(':');
            if (colon == std::string::npos)
                rois.emplace_back("roi" + std::to_string(++unnamed),
                                  parse_roi(s));
            else
                rois.emplace_back(s.substr(0, colon),
                                  parse_roi(s.substr(colon + 1)));
        }
    }

    const WeightKernel kern = parse_kernel(o.kernel);
    std::vector<RoiBands> report;
    for (const auto& [name, roi] : rois) {
        const MeasureResult res = measure_points(seq, roi, kern, to_params(o));
        std::map<int, std::vector<double>> freqs_by_rank;
        for (const PointSignal& p : res.points) {
            const Spectrum dom = dominant_spectrum(p.patch, o.f_min);
            for (const ModeEstimate& m :
                 pick_modes(dom, max_modes, o.f_min, min_sep))
                freqs_by_rank[m.rank].push_back(m.freq_hz);
        }
        RoiBands rb;
        rb.name = name;
        for (const auto& [rank, freqs] : freqs_by_rank) {
            if (freqs.size() < 2) continue;  // band needs a population
            rb.bands.emplace_back(
                rank, clamp_band(select_band(freqs, epsilon), o.f_min, seq.fps,
                                 seq.count()));
        }
        report.push_back(std::move(rb));
    }
    write_bands_json(out_json, report);
}

// ---- magnify ----

void cmd_magnify(const PipelineOpts& o, const std::string& roi_str,
                 const std::string& out_dir, const std::string& band_str,
                 bool auto_band, double epsilon, double alpha) {
    const FrameSequence seq = load_sequence(o.input);
    const Roi roi = roi_or_whole(roi_str, seq);
    const WeightKernel kern = parse_kernel(o.kernel);

    FrequencyBand band;
    if (auto_band) {
        warn_if_short(seq);
        const MeasureResult res = measure_points(seq, roi, kern, to_params(o));
        const FrequencyMap map = dominant_frequency_map(res, o.f_min);
        std::vector<double> freqs;
        for (const auto& e : map.entries) freqs.push_back(e.freq_hz);
        band = clamp_band(select_band(freqs, epsilon), o.f_min, seq.fps,
                          seq.count());
    } else {
        double lo = 0, hi = 0;
        if (std::sscanf(band_str.c_str(), "%lf,%lf", &lo, &hi) != 2)
            throw ConfigError("band must be lo,hi in Hz (got '" + band_str +
                              "')");
        band.lo_hz = lo;
        band.hi_hz = hi;
        band.mu_hz = 0.5 * (lo + hi);
    }

    MagnifyParams mp;
    mp.sigma_px = o.sigma;
    mp.threads = o.threads;
    const FrameSequence out = magnify(seq, roi, band, alpha, mp);
    fs::create_directories(out_dir);
    save_sequence(out, out_dir);
    write_band_json(fs::path(out_dir) / "band.json", band, alpha);

    // Deflection profile of the magnified motion at its own feature points.
    try {
        const MeasureResult res = measure_points(out, roi, kern, to_params(o));
        std::vector<DisplacementSignal> line;
        for (const PointSignal& p : res.points) line.push_back(p.patch);
        write_ods_csv(fs::path(out_dir) / "ods.csv", extract_ods(line, band));
    } catch (const DataError& e) {
        std::cerr << "warning: deflection profile skipped: " << e.what()
                  << "\n";
    }
    std::cout << out_dir << "\n";
}

// ---- compare ----

void cmd_compare(const std::string& ref_path, const std::string& test_path,
                 const std::string& out_json, double f_min, int max_modes,
                 double min_sep) {
    const DisplacementSignal ref = load_displacement_csv(ref_path);
    const DisplacementSignal test = load_displacement_csv(test_path);
    if (ref.units != test.units)
        throw ConfigError("signals have different units");

    auto range = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    const bool use_y = range(ref.dy) > range(ref.dx);
    std::vector<double> a = use_y ? ref.dy : ref.dx;
    std::vector<double> b = use_y ? test.dy : test.dx;
    if (std::abs(ref.fps - test.fps) > 1e-9 * ref.fps)
        b = resample(b, test.fps, ref.fps);
    const std::size_t n = std::min(a.size(), b.size());
    a.resize(n);
    b.resize(n);

    const double err = nrmse_percent(b, a);
    const auto modes_ref =
        pick_modes(fft_spectrum(a, ref.fps), max_modes, f_min, min_sep);
    const auto modes_test =
        pick_modes(fft_spectrum(b, ref.fps), max_modes, f_min, min_sep);
    if (!out_json.empty())
        write_compare_json(out_json, err, modes_ref, modes_test);

    std::printf("nrmse_percent=%.6g\n", err);
    const std::size_t np = std::min(modes_ref.size(), modes_test.size());
    for (std::size_t i = 0; i < np; ++i)
        std::printf("mode %d: ref=%.6g Hz test=%.6g Hz diff=%.6g Hz\n",
                    modes_ref[i].rank, modes_ref[i].freq_hz,
                    modes_test[i].freq_hz,
                    modes_ref[i].freq_hz - modes_test[i].freq_hz);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibration measurement from video"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "vibro 1.0.0");

    // synth
    SynthOpts so;
    auto* synth = app.add_subcommand("synth", "render a synthetic sequence");
    synth->add_option("--out", so.out, "output directory")->required();
    synth->add_option("--pattern", so.pattern, "grating|checkerboard|blob");
    synth->add_option("--amp", so.spec.amplitude_px, "motion amplitude in px");
    synth->add_option("--freq", so.spec.freq_hz, "motion frequency in Hz");
    synth->add_option("--phase0", so.spec.phase0, "initial phase in rad");
    synth->add_option("--dir", so.dir, "motion direction dx,dy");
    synth->add_option("--fps", so.fps, "frame rate");
    synth->add_option("--dur", so.spec.duration_s, "duration in seconds");
    synth->add_option("--width", so.width, "frame width");
    synth->add_option("--height", so.height, "frame height");
    synth->add_option("--noise", so.spec.noise_sigma, "luminance noise sigma");
    synth->add_option("--seed", so.spec.noise_seed, "noise seed");
    synth->add_option("--period", so.spec.period_px, "pattern period in px");
    synth->add_option("--contrast", so.spec.contrast, "pattern contrast");
    synth->add_option("--sharpness", so.spec.sharpness,
                      "checkerboard edge sharpness");
    synth->add_option("--blob-sigma", so.spec.blob_sigma_px, "blob sigma in px");
    synth->add_option("--scale-mm-per-px", so.scale, "physical pixel pitch");
    synth->add_option("--depth", so.depth, "pgm bit depth, 8 or 16");
    synth->add_option("--config", "key=value config file; flags override")->type_name("TEXT");
    synth->callback([&] {
        apply_config(synth);
        cmd_synth(so);
    });

    // features
    std::string fe_input, fe_out, fe_roi, fe_overlay;
    HarrisParams fe_harris;
    auto* features = app.add_subcommand("features", "detect corner points");
    features->add_option("--input", fe_input, "sequence manifest")->required();
    features->add_option("--out", fe_out, "features csv")->required();
    features->add_option("--roi", fe_roi, "x0,y0,w,h (default whole frame)");
    features->add_option("--overlay", fe_overlay, "overlay pgm path");
    features->add_option("--harris-k", fe_harris.k, "corner response k");
    features->add_option("--harris-window", fe_harris.window_sigma,
                         "structure tensor window sigma");
    features->add_option("--harris-threshold", fe_harris.threshold_rel,
                         "threshold relative to max response");
    features->add_option("--nms-radius", fe_harris.nms_radius,
                         "non-max suppression radius");
    features->add_option("--config", "key=value config file; flags override")->type_name("TEXT");
    features->callback([&] {
        apply_config(features);
        cmd_features(fe_input, fe_out, fe_roi, fe_overlay, fe_harris);
    });

    // measure
    PipelineOpts me;
    std::string me_out, me_roi;
    int me_export = 8, me_max_modes = 4;
    double me_min_sep = 0.2;
    bool me_mm = false;
    auto* measure =
        app.add_subcommand("measure", "multi-point displacement pipeline");
    add_pipeline_opts(measure, me);
    measure->add_option("--out", me_out, "output directory")->required();
    measure->add_option("--roi", me_roi, "x0,y0,w,h (default whole frame)");
    measure->add_option("--export-signals", me_export,
                        "how many per-point csv files to write");
    measure->add_option("--max-modes", me_max_modes, "modes to report");
    measure->add_option("--min-sep", me_min_sep, "min mode separation in Hz");
    measure->add_flag("--mm", me_mm, "convert output to millimetres");
    measure->callback([&] {
        apply_config(measure);
        cmd_measure(me, me_out, me_roi, me_export, me_max_modes, me_min_sep,
                    me_mm);
    });

    // spectrum
    std::string sp_input, sp_out, sp_modes, sp_axis = "auto",
                sp_window = "rect";
    double sp_fmin = 0.3, sp_min_sep = 0.2;
    int sp_max_modes = 4;
    auto* spectrum =
        app.add_subcommand("spectrum", "spectrum of a displacement csv");
    spectrum->add_option("--input", sp_input, "displacement csv")->required();
    spectrum->add_option("--out", sp_out, "spectrum csv")->required();
    spectrum->add_option("--modes", sp_modes, "mode report json path");
    spectrum->add_option("--axis", sp_axis, "x|y|auto");
    spectrum->add_option("--window", sp_window, "rect|hann");
    spectrum->add_option("--f-min", sp_fmin, "lowest analyzed frequency in Hz");
    spectrum->add_option("--max-modes", sp_max_modes, "modes to report");
    spectrum->add_option("--min-sep", sp_min_sep, "min mode separation in Hz");
    spectrum->add_option("--config", "key=value config file; flags override")->type_name("TEXT");
    spectrum->callback([&] {
        apply_config(spectrum);
        cmd_spectrum(sp_input, sp_out, sp_modes, sp_axis, sp_window, sp_fmin,
                     sp_max_modes, sp_min_sep);
    });

    // map
    PipelineOpts mp;
    std::string mp_roi, mp_out, mp_csv;
    auto* map_cmd =
        app.add_subcommand("map", "dominant frequency map image");
    add_pipeline_opts(map_cmd, mp);
    map_cmd->add_option("--out", mp_out, "color map ppm")->required();
    map_cmd->add_option("--csv", mp_csv, "also write x,y,freq_hz csv");
    map_cmd->add_option("--roi", mp_roi, "x0,y0,w,h (default whole frame)");
    map_cmd->callback([&] {
        apply_config(map_cmd);
        cmd_map(mp, mp_roi, mp_out, mp_csv);
    });

    // bands
    PipelineOpts ba;
    std::vector<std::string> ba_rois;
    std::string ba_out;
    double ba_eps = 2.0, ba_min_sep = 0.2;
    int ba_max_modes = 4;
    auto* bands =
        app.add_subcommand("bands", "per-roi frequency band report");
    add_pipeline_opts(bands, ba);
    bands->add_option("--out", ba_out, "band report json")->required();
    bands->add_option("--roi", ba_rois,
                      "name:x0,y0,w,h (repeatable; default whole frame)");
    bands->add_option("--epsilon", ba_eps, "band half-width in sigmas");
    bands->add_option("--max-modes", ba_max_modes, "modes per point");
    bands->add_option("--min-sep", ba_min_sep, "min mode separation in Hz");
    bands->callback([&] {
        apply_config(bands);
        cmd_bands(ba, ba_rois, ba_out, ba_eps, ba_max_modes, ba_min_sep);
    });

    // magnify
    PipelineOpts ma;
    std::string ma_roi, ma_out, ma_band;
    bool ma_auto = false;
    double ma_eps = 2.0, ma_alpha = 0.0;
    auto* magnify_cmd =
        app.add_subcommand("magnify", "phase-based motion magnification");
    add_pipeline_opts(magnify_cmd, ma);
    magnify_cmd->add_option("--out", ma_out, "output directory")->required();
    magnify_cmd->add_option("--roi", ma_roi, "x0,y0,w,h (default whole frame)");
    magnify_cmd->add_option("--alpha", ma_alpha, "magnification factor")
        ->required();
    auto* band_opt =
        magnify_cmd->add_option("--band", ma_band, "fixed band lo,hi in Hz");
    auto* auto_opt = magnify_cmd->add_flag("--auto", ma_auto,
                                           "derive the band from the scene");
    band_opt->excludes(auto_opt);
    magnify_cmd->add_option("--epsilon", ma_eps, "band half-width in sigmas");
    magnify_cmd->callback([&] {
        apply_config(magnify_cmd);
        if (ma_band.empty() && !ma_auto)
            throw ConfigError("magnify needs --band lo,hi or --auto");
        cmd_magnify(ma, ma_roi, ma_out, ma_band, ma_auto, ma_eps, ma_alpha);
    });

    // compare
    std::string co_ref, co_test, co_out;
    double co_fmin = 0.3, co_min_sep = 0.2;
    int co_max_modes = 4;
    auto* compare =
        app.add_subcommand("compare", "nrmse and mode differences");
    compare->add_option("--ref", co_ref, "reference displacement csv")
        ->required();
    compare->add_option("--test", co_test, "displacement csv under test")
        ->required();
    compare->add_option("--out", co_out, "comparison json path");
    compare->add_option("--f-min", co_fmin, "lowest analyzed frequency in Hz");
    compare->add_option("--max-modes", co_max_modes, "modes to report");
    compare->add_option("--min-sep", co_min_sep, "min mode separation in Hz");
    compare->add_option("--config", "key=value config file; flags override")->type_name("TEXT");
    compare->callback([&] {
        apply_config(compare);
        cmd_compare(co_ref, co_test, co_out, co_fmin, co_max_modes, co_min_sep);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
