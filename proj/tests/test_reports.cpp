#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vibro/reports.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vibro;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("round6 keeps six significant digits") {
    CHECK(round6(2.6999999999) == 2.7);
    CHECK(round6(1.2345678) == 1.23457);
    CHECK(round6(-1.2345678) == -1.23457);
    CHECK(round6(0.0) == 0.0);
    CHECK(round6(123456.7) == 123457.0);
    CHECK(round6(1e-9) == 1e-9);
}

TEST_CASE("modes json carries rank, frequency, snr, magnitude") {
    const fs::path dir = fs::temp_directory_path() / "vibro_reports_test";
    fs::create_directories(dir);
    std::vector<ModeEstimate> modes;
    modes.push_back({2.6999999, 0.30000004, 12.345678, 1});
    modes.push_back({3.69, 0.15, 6.5, 2});
    const fs::path file = dir / "modes.json";
    write_modes_json(file, modes);

    const auto j = nlohmann::json::parse(slurp(file));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["rank"] == 1);
    CHECK(j[0]["freq_hz"] == 2.7);
    CHECK(j[0]["magnitude"] == 0.3);
    CHECK(j[0]["snr"] == 12.3457);
    CHECK(j[1]["freq_hz"] == 3.69);

    // rewriting the same data gives identical bytes
    const std::string first = slurp(file);
    write_modes_json(file, modes);
    CHECK(slurp(file) == first);
    CHECK(first.back() == '\n');
    fs::remove_all(dir);
}

TEST_CASE("per-roi bands are grouped by mode rank") {
    const fs::path dir = fs::temp_directory_path() / "vibro_reports_test2";
    fs::create_directories(dir);
    FrequencyBand b1;
    b1.lo_hz = 2.5367;
    b1.hi_hz = 2.8633;
    b1.mu_hz = 2.7;
    b1.sigma_hz = 0.0816497;
    b1.epsilon = 2.0;
    FrequencyBand b2 = b1;
    b2.mu_hz = 5.4;
    RoiBands roi;
    roi.name = "deck";
    roi.bands = {{1, b1}, {2, b2}};

    const fs::path file = dir / "bands.json";
    write_bands_json(file, {roi});
    const auto j = nlohmann::json::parse(slurp(file));
    REQUIRE(j.contains("deck"));
    REQUIRE(j["deck"].is_array());
    CHECK(j["deck"][0]["mode_rank"] == 1);
    CHECK(j["deck"][0]["mu_hz"] == 2.7);
    CHECK(j["deck"][0]["lo_hz"] == 2.5367);
    CHECK(j["deck"][0]["hi_hz"] == 2.8633);
    CHECK(j["deck"][1]["mu_hz"] == 5.4);
    fs::remove_all(dir);
}

TEST_CASE("single band report includes epsilon and alpha") {
    const fs::path dir = fs::temp_directory_path() / "vibro_reports_test3";
    fs::create_directories(dir);
    FrequencyBand b;
    b.lo_hz = 1.5;
    b.hi_hz = 2.5;
    b.mu_hz = 2.0;
    b.sigma_hz = 0.25;
    b.epsilon = 2.0;
    const fs::path file = dir / "band.json";
    write_band_json(file, b, 10.0);
    const auto j = nlohmann::json::parse(slurp(file));
    CHECK(j["lo_hz"] == 1.5);
    CHECK(j["hi_hz"] == 2.5);
    CHECK(j["epsilon"] == 2.0);
    CHECK(j["alpha"] == 10.0);
    fs::remove_all(dir);
}

TEST_CASE("comparison report pairs modes by rank") {
    const fs::path dir = fs::temp_directory_path() / "vibro_reports_test4";
    fs::create_directories(dir);
    std::vector<ModeEstimate> a{{2.7, 0.3, 10.0, 1}, {5.4, 0.1, 4.0, 2}};
    std::vector<ModeEstimate> b{{2.72, 0.29, 9.0, 1}};
    const fs::path file = dir / "compare.json";
    write_compare_json(file, 0.6428, a, b);
    const auto j = nlohmann::json::parse(slurp(file));
    CHECK(j["nrmse_percent"] == 0.6428);
    REQUIRE(j["mode_pairs"].is_array());
    REQUIRE(j["mode_pairs"].size() == 1);  // only ranks present in both
    CHECK(j["mode_pairs"][0]["rank"] == 1);
    CHECK(j["mode_pairs"][0]["freq_a_hz"] == 2.7);
    CHECK(j["mode_pairs"][0]["freq_b_hz"] == 2.72);
    CHECK(j["mode_pairs"][0]["diff_hz"] == -0.02);
    fs::remove_all(dir);
}
