#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vibro/colormap.hpp"
#include "vibro/multipoint.hpp"
#include "vibro/spectral.hpp"

#include "oracles.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

using namespace vibro;

namespace {

FrameSequence make_seq(double freq, double amp, int size = 128,
                       double dur = 5.0) {
    SyntheticMotionSpec spec;
    spec.pattern = Pattern::Grating;
    spec.freq_hz = freq;
    spec.amplitude_px = amp;
    spec.duration_s = dur;
    return synthesize(spec, size, size, 60.0);
}

DisplacementSignal make_signal(double x, double y, std::vector<double> dx) {
    DisplacementSignal s;
    s.x = x;
    s.y = y;
    s.dy.assign(dx.size(), 0.0);
    s.dx = std::move(dx);
    s.fps = 60.0;
    return s;
}

}  // namespace

TEST_CASE("kernel construction enforces the validity rules") {
    CHECK_THROWS_AS(WeightKernel::binomial(4), ConfigError);  // even size
    CHECK_THROWS_AS(WeightKernel::binomial(0), ConfigError);
    CHECK_THROWS_AS(WeightKernel{ImageD::Constant(3, 5, 1.0)}, ConfigError);

    ImageD neg = ImageD::Constant(3, 3, 1.0);
    neg(0, 0) = -0.1;
    CHECK_THROWS_AS(WeightKernel{neg}, ConfigError);

    ImageD asym = ImageD::Constant(3, 3, 1.0);
    asym(0, 1) = 2.0;  // no matching value at (2, 1)
    asym(1, 1) = 3.0;
    CHECK_THROWS_AS(WeightKernel{asym}, ConfigError);

    ImageD rising = ImageD::Constant(5, 5, 1.0);
    rising(1, 1) = 0.5;  // dips then rises again along the diagonal ray
    rising(3, 3) = 0.5;
    rising(2, 2) = 3.0;
    CHECK_THROWS_AS(WeightKernel{rising}, ConfigError);

    CHECK_NOTHROW(WeightKernel::binomial(1));
    CHECK_NOTHROW(WeightKernel::binomial(5));
    CHECK_NOTHROW(WeightKernel::uniform(7));
}

TEST_CASE("binomial weights follow Pascal rows") {
    const auto k3 = WeightKernel::binomial(3);
    const ImageD& v = k3.values();
    CHECK(v(0, 0) == doctest::Approx(v(0, 2)));
    CHECK(v(1, 1) == doctest::Approx(4.0 * v(0, 0)));
    CHECK(v(0, 1) == doctest::Approx(2.0 * v(0, 0)));

    // 5x5 full-patch attenuation is the exact dyadic ratio 4900/65536
    const auto k5 = WeightKernel::binomial(5);
    CHECK(k5.full_patch_sum_sq() == 4900.0 / 65536.0);
}

TEST_CASE("uniform attenuation is one over the cell count") {
    CHECK(WeightKernel::uniform(5).full_patch_sum_sq() ==
          doctest::Approx(1.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("kernel file round trip and malformed input") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "vibro_kernel_test";
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "k.txt");
        out << "1 2 1\n2 4 2\n1 2 1\n";
    }
    const auto k = WeightKernel::from_file(dir / "k.txt");
    CHECK(k.size() == 3);
    CHECK(k.values()(1, 1) == doctest::Approx(4.0 * k.values()(0, 0)));

    {
        std::ofstream out(dir / "bad.txt");
        out << "1 2 1 2 1 2\n";  // six values, not a square
    }
    CHECK_THROWS_AS(WeightKernel::from_file(dir / "bad.txt"), DataError);
    CHECK_THROWS_AS(WeightKernel::from_file(dir / "missing.txt"), DataError);
    fs::remove_all(dir);
}

TEST_CASE("patch weights renormalize over feature cells only") {
    const auto k = WeightKernel::binomial(5);

    SignalMap one;
    one[{10, 10}] = make_signal(10, 10, {0.0, 1.0, 2.0});
    const auto alone = patch_signal(10, 10, one, k);
    REQUIRE(alone.dx.size() == 3);
    // lone contributor gets weight exactly 1 regardless of kernel shape
    CHECK(alone.dx[2] == 2.0);

    SignalMap two = one;
    two[{12, 10}] = make_signal(12, 10, {0.0, 3.0, 6.0});
    const auto blend = patch_signal(10, 10, two, k);
    // center cell carries 36/256, the (+2,0) cell 6/256; renormalized 6:1
    CHECK(blend.dx[2] == doctest::Approx((6.0 * 2.0 + 1.0 * 6.0) / 7.0));

    // a patch with no features at all comes back empty
    const auto none = patch_signal(40, 40, two, k);
    CHECK(none.empty());
    CHECK(none.x == 40);
}

TEST_CASE("patch output stays inside the contributor range") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto k = WeightKernel::binomial(7);
    SignalMap sigs;
    for (int y = 20; y < 27; ++y)
        for (int x = 20; x < 27; ++x)
            sigs[{x, y}] = make_signal(x, y, {0.0, u(rng)});
    const auto p = patch_signal(23, 23, sigs, k);
    double lo = 1e9, hi = -1e9;
    for (const auto& [xy, s] : sigs) {
        lo = std::min(lo, s.dx[1]);
        hi = std::max(hi, s.dx[1]);
    }
    CHECK(p.dx[1] >= lo - 1e-12);
    CHECK(p.dx[1] <= hi + 1e-12);
}

TEST_CASE("full-patch averaging attenuates iid noise by sum of squares") {
    const auto k = WeightKernel::binomial(5);
    const int n = 10000;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g(0.0, 1.0);

    SignalMap sigs;
    for (int y = 10; y < 15; ++y)
        for (int x = 10; x < 15; ++x) {
            std::vector<double> dx(n);
            for (auto& v : dx) v = g(rng);
            sigs[{x, y}] = make_signal(x, y, std::move(dx));
        }
    const auto p = patch_signal(12, 12, sigs, k);
    double var = 0;
    for (double v : p.dx) var += v * v;
    var /= n;
    CHECK(var == doctest::Approx(k.full_patch_sum_sq()).epsilon(0.10));
    CHECK(var < 1.0);  // averaging must not amplify noise
}

TEST_CASE("a static sequence measures zero displacement everywhere") {
    const auto seq = make_seq(2.0, 0.0, 96, 2.0);
    MeasureParams mp;
    const auto res = measure_points(seq, Roi::whole(96, 96),
                                    WeightKernel::binomial(5), mp);
    REQUIRE_FALSE(res.points.empty());
    for (const auto& ps : res.points)
        for (size_t t = 0; t < ps.patch.dx.size(); ++t) {
            CHECK(std::abs(ps.patch.dx[t]) <= 1e-6);
            CHECK(std::abs(ps.patch.dy[t]) <= 1e-6);
        }
}

TEST_CASE("every grating point lands on the driving frequency bin") {
    const auto seq = make_seq(2.6, 0.3);
    MeasureParams mp;
    const auto res = measure_points(seq, Roi::whole(128, 128),
                                    WeightKernel::binomial(5), mp);
    REQUIRE(res.points.size() >= 16);
    const auto map = dominant_frequency_map(res);
    REQUIRE(map.entries.size() == res.points.size());
    for (const auto& e : map.entries)
        CHECK(e.freq_hz == doctest::Approx(2.6).epsilon(1e-9));
}

TEST_CASE("two spliced regions keep their own frequencies") {
    const int size = 128, seam = 64;
    const auto left = make_seq(1.0, 0.4, size);
    const auto right = make_seq(3.0, 0.4, size);
    const auto seq = oracle::splice_columns(left, right, seam);

    MeasureParams mp;
    const auto res = measure_points(seq, Roi::whole(size, size),
                                    WeightKernel::binomial(5), mp);
    const auto map = dominant_frequency_map(res);
    int n_left = 0, n_right = 0;
    for (const auto& e : map.entries) {
        if (e.x < seam - 12) {
            CHECK(e.freq_hz == doctest::Approx(1.0).epsilon(1e-9));
            ++n_left;
        } else if (e.x > seam + 12) {
            CHECK(e.freq_hz == doctest::Approx(3.0).epsilon(1e-9));
            ++n_right;
        }
    }
    CHECK(n_left >= 4);
    CHECK(n_right >= 4);
}

TEST_CASE("displacement tracks motion past half a pattern wavelength") {
    // 5 px of excursion is more than half the 9 px pattern period, so the
    // phase difference to the reference frame wraps; a branch slip would
    // show up as a full-wavelength jump in the signal.
    const auto seq = make_seq(0.5, 5.0, 128, 4.0);
    MeasureParams mp;
    const auto res = measure_points(seq, Roi::whole(128, 128),
                                    WeightKernel::binomial(5), mp);
    REQUIRE(!res.points.empty());
    const auto& s = res.points.front().patch;
    double worst = 0;
    for (std::size_t t = 0; t < s.dx.size(); ++t) {
        const double want =
            oracle::sine_displacement(5.0, 0.5, 60.0, 0.0, int(t));
        worst = std::max(worst, std::abs(s.dx[t] - want));
    }
    CHECK(worst < 0.25);
}

TEST_CASE("frequency map drops points without a clear spectral line") {
    const int n = 600;
    PointSignal tone;
    tone.pt = {10, 10, 1.0};
    tone.raw = make_signal(10, 10, oracle::sine_signal(0.5, 3.0, 60.0, n));

    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<double> flat(n);
    for (auto& v : flat) v = noise(rng);
    PointSignal dead;
    dead.pt = {40, 10, 1.0};
    dead.raw = make_signal(40, 10, std::move(flat));

    MeasureResult res;
    res.fps = 60.0;
    res.points = {tone, dead};
    const auto map = dominant_frequency_map(res);
    REQUIRE(map.entries.size() == 1);
    CHECK(map.entries[0].x == 10);
    CHECK(map.entries[0].freq_hz == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("map prefers the cleaner axis over the louder one") {
    const int n = 600;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<double> loud(n);
    for (auto& v : loud) v = noise(rng);

    PointSignal p;
    p.pt = {10, 10, 1.0};
    p.raw = make_signal(10, 10, std::move(loud));
    p.raw.dy = oracle::sine_signal(0.02, 5.0, 60.0, n);

    // the premise: the x noise floor out-shouts the y tone in raw magnitude
    const Spectrum sx = fft_spectrum(p.raw.dx, 60.0);
    double x_peak = 0;
    for (std::size_t k = 0; k < sx.mag.size(); ++k)
        if (sx.freqs_hz[k] >= 0.3) x_peak = std::max(x_peak, sx.mag[k]);
    REQUIRE(x_peak > 0.02);

    MeasureResult res;
    res.fps = 60.0;
    res.points = {p};
    const auto map = dominant_frequency_map(res);
    REQUIRE(map.entries.size() == 1);
    CHECK(map.entries[0].freq_hz == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("thread count does not change any output value") {
    const auto seq = make_seq(2.6, 0.3, 96, 2.0);
    MeasureParams one;
    one.threads = 1;
    MeasureParams four;
    four.threads = 4;
    const auto a = measure_points(seq, Roi::whole(96, 96),
                                  WeightKernel::binomial(5), one);
    const auto b = measure_points(seq, Roi::whole(96, 96),
                                  WeightKernel::binomial(5), four);
    REQUIRE(a.points.size() == b.points.size());
    for (size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].pt.x == b.points[i].pt.x);
        CHECK(a.points[i].pt.y == b.points[i].pt.y);
        for (size_t t = 0; t < a.points[i].patch.dx.size(); ++t) {
            CHECK(a.points[i].patch.dx[t] == b.points[i].patch.dx[t]);
            CHECK(a.points[i].patch.dy[t] == b.points[i].patch.dy[t]);
        }
    }
}

TEST_CASE("mean signal averages patches with equal weight") {
    MeasureResult res;
    res.fps = 60.0;
    PointSignal p1;
    p1.pt = {10, 10, 1.0};
    p1.patch = make_signal(10, 10, {0.0, 2.0});
    PointSignal p2;
    p2.pt = {30, 10, 1.0};
    p2.patch = make_signal(30, 10, {0.0, 4.0});
    res.points = {p1, p2};
    const auto m = mean_signal(res);
    CHECK(m.dx[1] == doctest::Approx(3.0));
    CHECK(m.x == doctest::Approx(20.0));
}

TEST_CASE("hue mapping is monotone and decodes within a bin") {
    const double f_lo = 0.3, f_hi = 30.0;
    const auto lo = freq_to_rgb(f_lo, f_lo, f_hi);
    CHECK(int(lo[2]) == 255);  // low end is blue
    const auto hi = freq_to_rgb(f_hi, f_lo, f_hi);
    CHECK(int(hi[0]) == 255);  // high end is red
    CHECK(int(hi[1]) == 0);

    const double quantum = (f_hi - f_lo) / 255.0;
    for (int i = 0; i <= 40; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / 40.0;
        const auto c = freq_to_rgb(f, f_lo, f_hi);
        const double back = rgb_to_freq(c[0], c[1], c[2], f_lo, f_hi);
        CHECK(std::abs(back - f) <= quantum);
    }
}

TEST_CASE("rendered map paints feature dots and a legend strip") {
    FrequencyMap map;
    map.fps = 60.0;
    map.f_min = 0.3;
    map.roi = Roi::whole(64, 64);
    map.entries = {{20, 20, 5.0}, {40, 40, 25.0}};
    const ImageD bg = ImageD::Constant(64, 64, 0.5);
    const RgbImage img = render_frequency_map(map, bg);

    CHECK(img.width() == 64);
    CHECK(img.height() > 64);  // legend rows appended below the frame

    // feature pixels leave grayscale; untouched pixels stay gray
    CHECK(img.r(20, 20) != img.b(20, 20));
    CHECK(img.r(5, 5) == doctest::Approx(0.5));
    CHECK(img.g(5, 5) == doctest::Approx(0.5));

    auto decode = [&](int y, int x) {
        auto q = [&](const ImageD& c) {
            return std::uint8_t(std::lround(c(y, x) * 255.0));
        };
        return rgb_to_freq(q(img.r), q(img.g), q(img.b), 0.3, 30.0);
    };
    // decoded dot colors give back the entry frequencies within a hue step
    CHECK(decode(20, 20) == doctest::Approx(5.0).epsilon(0.03));
    CHECK(decode(40, 40) == doctest::Approx(25.0).epsilon(0.01));

    // legend spans the full range left to right
    const int ly = img.height() - 2;
    CHECK(decode(ly, 0) < 1.0);
    CHECK(decode(ly, 63) > 29.0);
}

TEST_CASE("frequency map csv lists one row per feature") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "vibro_map_test";
    fs::create_directories(dir);
    FrequencyMap map;
    map.entries = {{3, 4, 2.5}, {10, 12, 7.5}};
    const fs::path file = dir / "map.csv";
    write_frequency_map_csv(file, map);
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,freq_hz");
    std::string row;
    std::getline(in, row);
    CHECK(row == "3,4,2.5");
    fs::remove_all(dir);
}
