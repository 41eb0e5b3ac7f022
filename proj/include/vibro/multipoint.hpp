#pragma once

#include "vibro/frame_io.hpp"
#include "vibro/harris.hpp"
#include "vibro/phase.hpp"
#include "vibro/types.hpp"

#include <filesystem>
#include <map>
#include <utility>
#include <vector>

namespace vibro {

// Patch weighting kernel: odd square, non-negative, point-symmetric about
// the center, and non-increasing along every ray outward. Construction
// rejects anything else.
class WeightKernel {
public:
    explicit WeightKernel(ImageD k);

    static WeightKernel binomial(int size);  // Pascal rows, e.g. [1 2 1]
    static WeightKernel uniform(int size);
    static WeightKernel from_file(const std::filesystem::path& path);

    const ImageD& values() const { return k_; }
    int size() const { return int(k_.rows()); }
    int radius() const { return int(k_.rows()) / 2; }

    // Sum of squared weights when every patch cell is a feature point; the
    // variance attenuation factor for i.i.d. unit-variance inputs.
    double full_patch_sum_sq() const;

private:
    ImageD k_;
};

using SignalMap = std::map<std::pair<int, int>, DisplacementSignal>;

// Weighted average of the displacement signals at feature pixels inside the
// N x N patch around (cx, cy). Kernel weights are zeroed at non-feature
// cells and renormalized over the rest, so the contributing weights sum to
// exactly 1. Returns an empty signal when the patch holds no weight.
DisplacementSignal patch_signal(int cx, int cy, const SignalMap& signals,
                                const WeightKernel& kernel);

struct MeasureParams {
    double sigma_px = 2.0;     // quadrature filter scale
    double slope_floor = 0.02; // rad/px, below it velocity is a gap
    // Phase is only read where the response clears this fraction of the
    // scene range. Patterns that are antisymmetric across the filter window
    // (a checkerboard corner seen along one axis) cancel to a residue whose
    // phase is noise; 1e-2 sits an order of magnitude above that residue and
    // an order below a genuinely textured response.
    double amplitude_floor_rel = 1e-2;
    HarrisParams harris;
    int threads = 1;
};

struct PointSignal {
    Feature pt;
    DisplacementSignal raw;    // this pixel alone
    DisplacementSignal patch;  // patch-weighted aggregate
};

struct MeasureResult {
    FeatureSet features;
    std::vector<PointSignal> points;  // same order as features.points
    double fps = 0;
};

// Full measurement pass: detect corners on the first frame, run the
// quadrature filters over the sequence, read each feature pixel's
// displacement off its phase excursion from the first frame, then
// patch-average. Frames where a pixel is unusable hold the last value and
// count as gaps. Frames stream through; only the reference response and the
// current one are held at a time.
MeasureResult measure_points(const FrameSequence& seq, const Roi& roi,
                             const WeightKernel& kernel,
                             const MeasureParams& params);

struct FrequencyMap {
    struct Entry {
        int x = 0, y = 0;
        double freq_hz = 0;
    };
    std::vector<Entry> entries;
    Roi roi;
    double fps = 0;
    double f_min = 0;
};

// Dominant frequency per feature point: the strongest bin in [f_min, fps/2)
// of whichever axis carries the cleaner line, judged by the peak's ratio to
// the median magnitude. Points where neither axis clears the ratio have no
// trustworthy frequency and are left out of the map.
FrequencyMap dominant_frequency_map(const MeasureResult& result,
                                    double f_min = 0.3);

struct RgbImage {
    ImageD r, g, b;
    int width() const { return int(r.cols()); }
    int height() const { return int(r.rows()); }
};

// Feature pixels colored by frequency over [f_min, fps/2), everything else
// the grayscale background, plus a hue legend strip along the bottom.
RgbImage render_frequency_map(const FrequencyMap& map, const ImageD& background);

// Equal-weight mean of the patch signals; the ROI-level vibration signal.
DisplacementSignal mean_signal(const MeasureResult& result);

void write_frequency_map_csv(const std::filesystem::path& path,
                             const FrequencyMap& map);

}  // namespace vibro
