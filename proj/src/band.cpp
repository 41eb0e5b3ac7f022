#include "vibro/band.hpp"

#include "vibro/parallel.hpp"
#include "vibro/steerable.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace vibro {

FrequencyBand select_band(const std::vector<double>& freqs_hz,
                          double epsilon) {
    if (freqs_hz.size() < 2)
        throw DataError("band selection needs at least 2 mode frequencies");
    if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
    const double n = double(freqs_hz.size());
    const double mu =
        std::accumulate(freqs_hz.begin(), freqs_hz.end(), 0.0) / n;
    double var = 0;
    for (double f : freqs_hz) var += (f - mu) * (f - mu);
    const double sigma = std::sqrt(var / n);

    FrequencyBand b;
    b.mu_hz = mu;
    b.sigma_hz = sigma;
    b.epsilon = epsilon;
    b.lo_hz = mu - epsilon * sigma;
    b.hi_hz = mu + epsilon * sigma;
    return b;
}

FrequencyBand clamp_band(FrequencyBand band, double f_min, double fps,
                         int n_samples) {
    if (!(f_min > 0) || fps <= 0 || n_samples < 2)
        throw ConfigError("clamp_band: f_min, fps, n_samples must be positive");
    const double bin = fps / n_samples;
    const double cap = fps / 2 - bin;  // keep the Nyquist bin out of bands
    band.lo_hz = std::max(band.lo_hz, f_min);
    band.hi_hz = std::min(band.hi_hz, cap);
    const double min_width = 2 * bin;
    if (band.hi_hz - band.lo_hz < min_width) {
        const double c = 0.5 * (band.lo_hz + band.hi_hz);
        band.lo_hz = c - min_width / 2;
        band.hi_hz = c + min_width / 2;
        if (band.lo_hz < f_min) {
            band.hi_hz += f_min - band.lo_hz;
            band.lo_hz = f_min;
        }
        if (band.hi_hz > cap) {
            band.lo_hz -= band.hi_hz - cap;
            band.hi_hz = cap;
            band.lo_hz = std::max(band.lo_hz, f_min);
        }
    }
    if (!(band.lo_hz < band.hi_hz))
        throw ConfigError("band does not fit between f_min and Nyquist");
    return band;
}

std::vector<double> unwrap_phase(const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    double offset = 0;
    for (std::size_t t = 1; t < wrapped.size(); ++t) {
        const double d = wrapped[t] - wrapped[t - 1];
        if (d > kPi)
            offset -= 2 * kPi;
        else if (d < -kPi)
            offset += 2 * kPi;
        out[t] = wrapped[t] + offset;
    }
    return out;
}

std::vector<double> temporal_bandpass(const std::vector<double>& series,
                                      const FrequencyBand& band, double fps) {
    const int n = int(series.size());
    if (n < 64) throw DataError("bandpass needs at least 64 samples");
    if (!(band.lo_hz > 0) || !(band.lo_hz < band.hi_hz) ||
        !(band.hi_hz < fps / 2))
        throw ConfigError("band must lie strictly inside (0, fps/2)");

    std::vector<std::complex<double>> in(n), freq, back;
    for (int t = 0; t < n; ++t) in[t] = series[t];
    Eigen::FFT<double> fft;
    fft.fwd(freq, in);
    for (int k = 0; k < n; ++k) {
        const double f = std::min(k, n - k) * fps / n;
        if (f < band.lo_hz || f > band.hi_hz) freq[k] = 0;
    }
    fft.inv(back, freq);
    std::vector<double> out(n);
    for (int t = 0; t < n; ++t) out[t] = back[t].real();
    return out;
}

FrameSequence magnify(const FrameSequence& seq, const Roi& roi,
                      const FrequencyBand& band, double alpha,
                      const MagnifyParams& params) {
    seq.validate();
    roi.validate(seq.width(), seq.height());
    if (alpha < 0) throw ConfigError("alpha must be >= 0");
    if (!(band.lo_hz > 0) || !(band.lo_hz < band.hi_hz) ||
        !(band.hi_hz < seq.fps / 2))
        throw ConfigError("band must lie strictly inside (0, fps/2)");

    FrameSequence out = seq;
    if (alpha == 0) return out;
    const int n = seq.count();
    if (n < 64) throw DataError("magnify needs at least 64 frames");

    const auto kx = make_quadrature_kernels<double>(params.sigma_px, 0.0);
    const auto ky = make_quadrature_kernels<double>(params.sigma_px, kPi / 2);
    const int rw = roi.width, rh = roi.height;
    const std::size_t area = std::size_t(rw) * rh;

    // Pass 1: per-pixel phase series (pixel-major) and all-frames validity.
    std::vector<float> phx(area * n), phy(area * n);
    MaskB okx = MaskB::Constant(rh, rw, true);
    MaskB oky = okx;
    for (int t = 0; t < n; ++t) {
        const ImageD fd = seq.frames[t].cast<double>();
        const auto rx = analyze_frame<double>(fd, kx, params.amplitude_floor_rel,
                                              params.threads);
        const auto ry = analyze_frame<double>(fd, ky, params.amplitude_floor_rel,
                                              params.threads);
        parallel_for(rh, params.threads, [&](std::int64_t r) {
            for (int c = 0; c < rw; ++c) {
                const std::size_t p = (std::size_t(r) * rw + c) * n + t;
                phx[p] = float(std::arg(rx.resp(roi.y0 + r, roi.x0 + c)));
                phy[p] = float(std::arg(ry.resp(roi.y0 + r, roi.x0 + c)));
            }
        });
        okx = okx && rx.valid.block(roi.y0, roi.x0, rh, rw);
        oky = oky && ry.valid.block(roi.y0, roi.x0, rh, rw);
    }

    // Unwrap and bandpass each pixel's phase in place.
    auto bandpass_all = [&](std::vector<float>& ph, const MaskB& ok) {
        parallel_for(rh, params.threads, [&](std::int64_t r) {
            std::vector<double> series(n);
            for (int c = 0; c < rw; ++c) {
                if (!ok(r, c)) continue;
                float* s = &ph[(std::size_t(r) * rw + c) * n];
                for (int t = 0; t < n; ++t) series[t] = s[t];
                const auto delta =
                    temporal_bandpass(unwrap_phase(series), band, seq.fps);
                for (int t = 0; t < n; ++t) s[t] = float(delta[t]);
            }
        });
    };
    bandpass_all(phx, okx);
    bandpass_all(phy, oky);

    // Pass 2: re-filter and fold the phase-advanced responses back in. The
    // gain inverts the filter transfer at its own peak frequency, so a pure
    // in-band translation comes back amplified by (1 + alpha).
    const double gain = 1.0 / g2_transfer(kx, g2_peak_frequency(kx));
    for (int t = 0; t < n; ++t) {
        const ImageD fd = seq.frames[t].cast<double>();
        const auto rx = analyze_frame<double>(fd, kx, params.amplitude_floor_rel,
                                              params.threads);
        const auto ry = analyze_frame<double>(fd, ky, params.amplitude_floor_rel,
                                              params.threads);
        ImageF& dst = out.frames[t];
        parallel_for(rh, params.threads, [&](std::int64_t r) {
            const int y = roi.y0 + int(r);
            for (int c = 0; c < rw; ++c) {
                const int x = roi.x0 + c;
                const std::size_t p = (std::size_t(r) * rw + c) * n + t;
                double v = fd(y, x);
                bool touched = false;
                if (okx(r, c)) {
                    const std::complex<double> R = rx.resp(y, x);
                    const double dphi = alpha * double(phx[p]);
                    v += gain * (std::real(R * std::polar(1.0, dphi)) - R.real());
                    touched = true;
                }
                if (oky(r, c)) {
                    const std::complex<double> R = ry.resp(y, x);
                    const double dphi = alpha * double(phy[p]);
                    v += gain * (std::real(R * std::polar(1.0, dphi)) - R.real());
                    touched = true;
                }
                if (touched) dst(y, x) = float(std::clamp(v, 0.0, 1.0));
            }
        });
    }
    return out;
}

OdsProfile extract_ods(const std::vector<DisplacementSignal>& line_signals,
                       const FrequencyBand& band) {
    const int m = int(line_signals.size());
    if (m < 3) throw DataError("deflection profile needs at least 3 points");
    const double fc = 0.5 * (band.lo_hz + band.hi_hz);

    const double fps = line_signals.front().fps;
    if (!(fps > 0)) throw DataError("signals carry no frame rate");

    // Project each axis of each signal onto the band-center frequency.
    std::vector<std::complex<double>> px(m), py(m);
    for (int i = 0; i < m; ++i) {
        const DisplacementSignal& s = line_signals[i];
        if (s.empty() || s.fps != fps)
            throw DataError("line signals must be nonempty with equal rates");
        const std::size_t nt = s.dx.size();
        const double mx =
            std::accumulate(s.dx.begin(), s.dx.end(), 0.0) / nt;
        const double my =
            std::accumulate(s.dy.begin(), s.dy.end(), 0.0) / nt;
        std::complex<double> ax = 0, ay = 0;
        for (std::size_t t = 0; t < nt; ++t) {
            const auto e = std::polar(1.0, -2 * kPi * fc * double(t) / fps);
            ax += (s.dx[t] - mx) * e;
            ay += (s.dy[t] - my) * e;
        }
        px[i] = ax;
        py[i] = ay;
    }
    double tx = 0, ty = 0;
    for (int i = 0; i < m; ++i) {
        tx += std::abs(px[i]);
        ty += std::abs(py[i]);
    }
    const auto& proj = ty > tx ? py : px;

    int ref = 0;
    for (int i = 1; i < m; ++i)
        if (std::abs(proj[i]) > std::abs(proj[ref])) ref = i;
    const double amp_ref = std::abs(proj[ref]);
    if (!(amp_ref > 0)) throw DataError("all deflections are zero");
    const auto align = std::polar(1.0, -std::arg(proj[ref]));

    // Order along whichever coordinate spreads the points farther.
    double xmin = line_signals[0].x, xmax = xmin;
    double ymin = line_signals[0].y, ymax = ymin;
    for (const auto& s : line_signals) {
        xmin = std::min(xmin, s.x);
        xmax = std::max(xmax, s.x);
        ymin = std::min(ymin, s.y);
        ymax = std::max(ymax, s.y);
    }
    const bool along_y = (ymax - ymin) > (xmax - xmin);

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = along_y ? line_signals[a].y : line_signals[a].x;
        const double pb = along_y ? line_signals[b].y : line_signals[b].x;
        return pa < pb;
    });
    for (int i = 1; i < m; ++i) {
        const auto& a = line_signals[order[i - 1]];
        const auto& b = line_signals[order[i]];
        if ((along_y ? a.y : a.x) == (along_y ? b.y : b.x))
            throw DataError("line points must be distinct along the structure");
    }

    OdsProfile ods;
    ods.freq_hz = fc;
    ods.points.resize(m);
    for (int i = 0; i < m; ++i) {
        const int src = order[i];
        auto& p = ods.points[i];
        p.index = i;
        p.x = line_signals[src].x;
        p.y = line_signals[src].y;
        p.value = src == ref ? 1.0 : (proj[src] * align).real() / amp_ref;
        if (src == ref) ods.ref_index = i;
    }
    return ods;
}

void write_ods_csv(const std::filesystem::path& path, const OdsProfile& ods) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "position_index,x,y,value\n";
    char line[96];
    for (const auto& p : ods.points) {
        std::snprintf(line, sizeof line, "%d,%.6g,%.6g,%.6g\n", p.index, p.x,
                      p.y, p.value);
        out << line;
    }
}

}  // namespace vibro
