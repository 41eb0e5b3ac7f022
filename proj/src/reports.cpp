#include "vibro/reports.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace vibro {

using ordered_json = nlohmann::ordered_json;

double round6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

namespace {

void dump_to(const std::filesystem::path& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

ordered_json mode_json(const ModeEstimate& m) {
    return {{"rank", m.rank},
            {"freq_hz", round6(m.freq_hz)},
            {"snr", round6(m.snr)},
            {"magnitude", round6(m.magnitude)}};
}

ordered_json band_json(const FrequencyBand& b) {
    return {{"mu_hz", round6(b.mu_hz)},
            {"sigma_hz", round6(b.sigma_hz)},
            {"lo_hz", round6(b.lo_hz)},
            {"hi_hz", round6(b.hi_hz)}};
}

}  // namespace

void write_modes_json(const std::filesystem::path& path,
                      const std::vector<ModeEstimate>& modes) {
    ordered_json arr = ordered_json::array();
    for (const auto& m : modes) arr.push_back(mode_json(m));
    dump_to(path, arr);
}

void write_bands_json(const std::filesystem::path& path,
                      const std::vector<RoiBands>& rois) {
    ordered_json root = ordered_json::object();
    for (const auto& roi : rois) {
        ordered_json arr = ordered_json::array();
        for (const auto& [rank, band] : roi.bands) {
            ordered_json rec = {{"mode_rank", rank}};
            rec.update(band_json(band));
            arr.push_back(rec);
        }
        root[roi.name] = arr;
    }
    dump_to(path, root);
}

void write_band_json(const std::filesystem::path& path,
                     const FrequencyBand& band, double alpha) {
    ordered_json j = band_json(band);
    j["epsilon"] = round6(band.epsilon);
    j["alpha"] = round6(alpha);
    dump_to(path, j);
}

void write_compare_json(const std::filesystem::path& path,
                        double nrmse_percent,
                        const std::vector<ModeEstimate>& modes_a,
                        const std::vector<ModeEstimate>& modes_b) {
    ordered_json pairs = ordered_json::array();
    const std::size_t n = std::min(modes_a.size(), modes_b.size());
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back({{"rank", modes_a[i].rank},
                         {"freq_a_hz", round6(modes_a[i].freq_hz)},
                         {"freq_b_hz", round6(modes_b[i].freq_hz)},
                         {"diff_hz", round6(modes_a[i].freq_hz -
                                            modes_b[i].freq_hz)}});
    }
    ordered_json j = {{"nrmse_percent", round6(nrmse_percent)},
                      {"mode_pairs", pairs}};
    dump_to(path, j);
}

}  // namespace vibro
