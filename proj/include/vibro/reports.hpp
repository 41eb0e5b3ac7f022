#pragma once

#include "vibro/band.hpp"
#include "vibro/spectral.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vibro {

// Rounds to 6 significant digits. Every number in a JSON report passes
// through this so reruns produce identical bytes.
double round6(double v);

void write_modes_json(const std::filesystem::path& path,
                      const std::vector<ModeEstimate>& modes);

// Bands grouped by the mode rank they were built from, one set per ROI.
struct RoiBands {
    std::string name;
    std::vector<std::pair<int, FrequencyBand>> bands;  // (mode_rank, band)
};

void write_bands_json(const std::filesystem::path& path,
                      const std::vector<RoiBands>& rois);

void write_band_json(const std::filesystem::path& path,
                     const FrequencyBand& band, double alpha);

void write_compare_json(const std::filesystem::path& path,
                        double nrmse_percent,
                        const std::vector<ModeEstimate>& modes_a,
                        const std::vector<ModeEstimate>& modes_b);

}  // namespace vibro
