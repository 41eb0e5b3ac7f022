#pragma once

#include "vibro/frame_io.hpp"
#include "vibro/phase.hpp"
#include "vibro/types.hpp"

#include <filesystem>
#include <vector>

namespace vibro {

// Frequency band centered on the mean of per-point mode frequencies.
struct FrequencyBand {
    double lo_hz = 0;
    double hi_hz = 0;
    double mu_hz = 0;
    double sigma_hz = 0;  // population deviation
    double epsilon = 0;
};

// Raw [mu - eps*sigma, mu + eps*sigma] over the supplied mode frequencies.
// No clamping here, so the symmetry and width laws hold exactly.
FrequencyBand select_band(const std::vector<double>& freqs_hz, double epsilon);

// Clamps a band into (f_min, fps/2) and widens it symmetrically to at least
// two FFT bins (bin width fps / n_samples).
FrequencyBand clamp_band(FrequencyBand band, double f_min, double fps,
                         int n_samples);

// Cumulative 2*pi correction of jumps larger than pi between samples.
std::vector<double> unwrap_phase(const std::vector<double>& wrapped);

// Ideal zero-phase bandpass: forward FFT, zero every bin (incl. DC) whose
// frequency lies outside [lo, hi], inverse FFT. Output is zero-mean.
std::vector<double> temporal_bandpass(const std::vector<double>& series,
                                      const FrequencyBand& band, double fps);

struct MagnifyParams {
    double sigma_px = 2.0;
    double amplitude_floor_rel = 1e-4;
    int threads = 1;
};

// Phase-based motion magnification inside the ROI: per orientation the
// quadrature response picks up e^(i*alpha*dphi_band), and the amplified real
// parts are folded back into the frame with a gain calibrated from the
// filter transfer, so an in-band translation a is re-measured as (1+alpha)a.
// Pixels outside the ROI, and all pixels at alpha = 0, pass through
// bit-identical.
FrameSequence magnify(const FrameSequence& seq, const Roi& roi,
                      const FrequencyBand& band, double alpha,
                      const MagnifyParams& params = {});

// Operating deflection shape along an ordered line of measured points.
struct OdsProfile {
    struct Point {
        int index = 0;       // order along the structure
        double x = 0, y = 0;
        double value = 0;    // normalized deflection in [-1, 1]
    };
    std::vector<Point> points;
    int ref_index = 0;       // point with |value| = 1
    double freq_hz = 0;      // band center used for the projection
};

// Projects each signal onto the band-center frequency; deflections are
// signed by phase relative to the largest-amplitude point and scaled so the
// reference value is exactly +1. Points are ordered along whichever axis
// spreads them farther apart.
OdsProfile extract_ods(const std::vector<DisplacementSignal>& line_signals,
                       const FrequencyBand& band);

void write_ods_csv(const std::filesystem::path& path, const OdsProfile& ods);

}  // namespace vibro
