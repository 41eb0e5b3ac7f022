#pragma once

#include "vibro/types.hpp"

#include <filesystem>
#include <vector>

namespace vibro {

struct HarrisParams {
    double k = 0.04;
    double window_sigma = 1.5;
    double threshold_rel = 0.01;
    int nms_radius = 3;
};

struct Feature {
    int x = 0;
    int y = 0;
    double score = 0;
};

// Corner points inside an ROI, non-max suppressed, sorted by (y, x).
struct FeatureSet {
    std::vector<Feature> points;
    Roi roi;
};

// Corner response det(M) - k*trace(M)^2 on the Gaussian-windowed structure
// tensor of central-difference gradients. Keeps local maxima above
// threshold_rel * max(R); an all-flat ROI yields an empty set.
FeatureSet harris_corners(const ImageD& frame, const Roi& roi,
                          const HarrisParams& params = {});

void write_features_csv(const std::filesystem::path& path,
                        const FeatureSet& features);

// Background frame with feature pixels painted white.
ImageF render_feature_overlay(const ImageF& frame, const FeatureSet& features);

}  // namespace vibro
