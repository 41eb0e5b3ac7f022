#include "vibro/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace vibro {

Spectrum fft_spectrum(const std::vector<double>& sig, double fps,
                      Window window) {
    if (fps <= 0) throw ConfigError("fft_spectrum: fps must be positive");
    const int n = static_cast<int>(sig.size());
    if (n < 64)
        throw DataError("fft_spectrum: need at least 64 samples, got " +
                        std::to_string(n));

    const double mean = std::accumulate(sig.begin(), sig.end(), 0.0) / n;
    std::vector<double> work(sig);
    for (double& v : work) v -= mean;

    if (window == Window::Hann) {
        // Divide by the coherent gain (mean of the window) so tone
        // amplitudes stay comparable to the rectangular case.
        double gain = 0;
        for (int i = 0; i < n; ++i) {
            const double w =
                0.5 * (1.0 - std::cos(2.0 * kPi * i / (n - 1)));
            work[i] *= w;
            gain += w;
        }
        gain /= n;
        for (double& v : work) v /= gain;
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq;
    fft.fwd(freq, work);

    Spectrum out;
    out.fps = fps;
    out.n_samples = n;
    out.window = window;
    const int half = n / 2;
    out.freqs_hz.resize(half + 1);
    out.mag.resize(half + 1);
    for (int k = 0; k <= half; ++k) {
        out.freqs_hz[k] = k * fps / n;
        // One-sided amplitude: interior bins absorb their mirror image.
        const double scale = (k == 0 || 2 * k == n) ? 1.0 / n : 2.0 / n;
        out.mag[k] = scale * std::abs(freq[k]);
    }
    return out;
}

std::vector<ModeEstimate> pick_modes(const Spectrum& spec, int max_modes,
                                     double f_min, double min_sep_hz) {
    std::vector<ModeEstimate> out;
    const int nb = static_cast<int>(spec.mag.size());
    if (nb < 3 || max_modes <= 0) return out;

    std::vector<double> sorted(spec.mag);
    std::nth_element(sorted.begin(), sorted.begin() + nb / 2, sorted.end());
    const double median = sorted[nb / 2];

    // Leftmost bin of a plateau counts as the maximum.
    // Bins this far below the strongest one are double-precision residue,
    // not signal; without the cutoff an exact-bin tone grows ghost "modes"
    // out of the fp noise floor.
    const double mag_floor =
        1e-12 * *std::max_element(spec.mag.begin(), spec.mag.end());

    std::vector<int> peaks;
    for (int k = 1; k + 1 < nb; ++k) {
        if (spec.freqs_hz[k] < f_min) continue;
        if (spec.mag[k] <= mag_floor) continue;
        if (spec.mag[k] > spec.mag[k - 1] && spec.mag[k] >= spec.mag[k + 1])
            peaks.push_back(k);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        if (spec.mag[a] != spec.mag[b]) return spec.mag[a] > spec.mag[b];
        return a < b;
    });

    std::vector<double> taken;
    for (int k : peaks) {
        const double f = spec.freqs_hz[k];
        bool clear = true;
        for (double t : taken)
            if (std::abs(f - t) < min_sep_hz) { clear = false; break; }
        if (!clear) continue;
        const double snr =
            median > 0 ? spec.mag[k] / median : (spec.mag[k] > 0 ? 1e12 : 0.0);
        if (snr <= 1.0) continue;
        taken.push_back(f);
        ModeEstimate m;
        m.freq_hz = f;
        m.magnitude = spec.mag[k];
        m.snr = snr;
        m.rank = static_cast<int>(out.size()) + 1;
        out.push_back(m);
        if (static_cast<int>(out.size()) == max_modes) break;
    }
    return out;
}

double nrmse_percent(const std::vector<double>& test,
                     const std::vector<double>& ref) {
    if (test.size() != ref.size() || ref.empty())
        throw DataError("nrmse: signals must be nonempty and equal length");
    const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
    const double range = *hi - *lo;
    if (range <= 0) throw DataError("nrmse: reference signal is constant");
    double acc = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = test[i] - ref[i];
        acc += d * d;
    }
    return 100.0 * std::sqrt(acc / ref.size()) / range;
}

std::vector<double> resample(const std::vector<double>& sig, double rate_from,
                             double rate_to) {
    if (rate_from <= 0 || rate_to <= 0)
        throw ConfigError("resample: rates must be positive");
    if (sig.size() < 2) throw DataError("resample: need at least 2 samples");
    const double span = (sig.size() - 1) / rate_from;
    const int n_out = static_cast<int>(span * rate_to * (1 + 1e-12)) + 1;
    std::vector<double> out(n_out);
    for (int j = 0; j < n_out; ++j) {
        const double s = j / rate_to * rate_from;
        const int i = std::min(static_cast<int>(s),
                               static_cast<int>(sig.size()) - 2);
        const double frac = s - i;
        out[j] = sig[i] * (1 - frac) + sig[i + 1] * frac;
    }
    return out;
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "freq_hz,magnitude\n";
    char line[80];
    for (std::size_t k = 0; k < s.mag.size(); ++k) {
        std::snprintf(line, sizeof line, "%.6g,%.6g\n", s.freqs_hz[k],
                      s.mag[k]);
        out << line;
    }
}

}  // namespace vibro
