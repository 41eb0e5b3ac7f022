#pragma once

#include "vibro/types.hpp"

#include <filesystem>
#include <vector>

namespace vibro {

enum class Window { Rect, Hann };

// One-sided magnitude spectrum; bin spacing fps / n_samples.
struct Spectrum {
    std::vector<double> freqs_hz;
    std::vector<double> mag;
    double fps = 0;
    int n_samples = 0;
    Window window = Window::Rect;

    double bin_hz() const { return fps / n_samples; }
};

// SNR-ranked spectral peak.
struct ModeEstimate {
    double freq_hz = 0;
    double magnitude = 0;
    double snr = 0;  // peak magnitude / median spectrum magnitude
    int rank = 0;    // 1 = strongest
};

// Mean-detrends, applies the window, and returns the one-sided magnitude
// spectrum. Requires at least 64 samples.
Spectrum fft_spectrum(const std::vector<double>& sig, double fps,
                      Window window = Window::Rect);

// Local maxima above f_min, separated by at least min_sep_hz, ranked by SNR
// (ties toward lower frequency), truncated to max_modes.
std::vector<ModeEstimate> pick_modes(const Spectrum& spec, int max_modes = 4,
                                     double f_min = 0.3,
                                     double min_sep_hz = 0.2);

// 100 * RMS(test - ref) / (max(ref) - min(ref)).
double nrmse_percent(const std::vector<double>& test,
                     const std::vector<double>& ref);

// Linear interpolation onto the rate_to grid over the common time span.
std::vector<double> resample(const std::vector<double>& sig, double rate_from,
                             double rate_to);

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);

}  // namespace vibro
