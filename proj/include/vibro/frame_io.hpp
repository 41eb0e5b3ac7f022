#pragma once

#include "vibro/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace vibro {

// Ordered grayscale frames with a frame rate and an optional physical scale.
struct FrameSequence {
    std::vector<ImageF> frames;
    double fps = 0.0;
    std::optional<double> scale_mm_per_px;

    int width() const { return frames.empty() ? 0 : int(frames[0].cols()); }
    int height() const { return frames.empty() ? 0 : int(frames[0].rows()); }
    int count() const { return int(frames.size()); }
    double duration_s() const { return fps > 0 ? count() / fps : 0.0; }

    void validate() const;
};

enum class Pattern { Checkerboard, Grating, Blob };

// Harmonic sub-pixel motion of an analytic pattern. Patterns are evaluated as
// continuous functions at shifted coordinates, so the rendered motion is exact.
struct SyntheticMotionSpec {
    Pattern pattern = Pattern::Grating;
    double amplitude_px = 0.0;
    double freq_hz = 0.0;
    double phase0 = 0.0;
    Eigen::Vector2d direction{1.0, 0.0};
    double duration_s = 1.0;
    double noise_sigma = 0.0;

    // Pattern geometry.
    double period_px = 9.0;    // checkerboard/grating spatial period
    double contrast = 0.2;     // per-axis grating contrast / edge height
    double sharpness = 1.0;    // checkerboard edge steepness
    double blob_sigma_px = 8.0;
    std::uint64_t noise_seed = 12345;
};

// Manifest + frame_%06d.pgm files (binary graymaps, 8 or 16 bit).
FrameSequence load_sequence(const std::filesystem::path& manifest_path);
std::filesystem::path save_sequence(const FrameSequence& seq,
                                    const std::filesystem::path& dir,
                                    int bit_depth = 8);

FrameSequence synthesize(const SyntheticMotionSpec& spec, int width, int height,
                         double fps);

// Same as synthesize but the motion amplitude is scaled per position by
// amp_scale(x, y); used to render spatially varying deflection patterns.
FrameSequence synthesize_modulated(
    const SyntheticMotionSpec& spec, int width, int height, double fps,
    const std::function<double(double, double)>& amp_scale);

// Rigid in-plane displacement of the pattern at frame t, relative to t = 0.
Eigen::Vector2d synthetic_displacement(const SyntheticMotionSpec& spec,
                                       double fps, int t);

// Continuous pattern value at (x, y); exposed for analytic test oracles.
double pattern_value(const SyntheticMotionSpec& spec, int width, int height,
                     double x, double y);

// Single-image helpers (8-bit and 16-bit binary PGM).
ImageF load_pgm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const ImageF& img,
              int bit_depth = 8);
void save_ppm(const std::filesystem::path& path, const ImageD& r,
              const ImageD& g, const ImageD& b);

// Luminosity weights for callers converting color sources to grayscale.
inline double luminance_from_rgb(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

}  // namespace vibro
