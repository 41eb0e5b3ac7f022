#pragma once

// Independent reference implementations for checking library output.
// Deliberately naive: direct summation, no shared code with src/.

#include "vibro/frame_io.hpp"
#include "vibro/types.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

// Dense 2-D correlation with mirrored borders.
inline vibro::ImageD correlate2d(const vibro::ImageD& in,
                                 const vibro::ImageD& k) {
    const int h = int(in.rows()), w = int(in.cols());
    const int kh = int(k.rows()) / 2, kw = int(k.cols()) / 2;
    vibro::ImageD out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = 0; i < k.rows(); ++i)
                for (int j = 0; j < k.cols(); ++j)
                    acc += k(i, j) *
                           in(reflect(y + i - kh, h), reflect(x + j - kw, w));
            out(y, x) = acc;
        }
    return out;
}

// Single DFT bin by direct summation.
inline std::complex<double> dft_bin(const std::vector<double>& x, int k) {
    std::complex<double> acc = 0;
    const double n = double(x.size());
    for (std::size_t t = 0; t < x.size(); ++t)
        acc += x[t] * std::polar(1.0, -2.0 * vibro::kPi * k * double(t) / n);
    return acc;
}

// Lag of b relative to a from the cross-correlation peak, refined by a
// parabola through the three samples around the integer maximum.
inline double cross_corr_lag(const std::vector<double>& a,
                             const std::vector<double>& b, int max_lag) {
    const int n = int(a.size());
    auto xc = [&](int lag) {
        double acc = 0;
        for (int t = 0; t < n; ++t) {
            const int u = t + lag;
            if (u >= 0 && u < n) acc += a[t] * b[u];
        }
        return acc;
    };
    int best = 0;
    double best_v = xc(0);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        const double v = xc(lag);
        if (v > best_v) {
            best_v = v;
            best = lag;
        }
    }
    const double ym = xc(best - 1), y0 = xc(best), yp = xc(best + 1);
    const double denom = ym - 2 * y0 + yp;
    const double frac = denom != 0 ? 0.5 * (ym - yp) / denom : 0.0;
    return best + frac;
}

// Displacement of the synthetic motion model relative to frame 0.
inline double sine_displacement(double amp, double freq, double fps,
                                double phase0, int t) {
    return amp * (std::sin(2.0 * vibro::kPi * freq * t / fps + phase0) -
                  std::sin(phase0));
}

inline std::vector<double> sine_signal(double amp, double freq, double fps,
                                       int n, double phase0 = 0.0) {
    std::vector<double> s(n);
    for (int t = 0; t < n; ++t)
        s[t] = amp * std::sin(2.0 * vibro::kPi * freq * t / fps + phase0);
    return s;
}

// Splices the left columns of a onto the right columns of b at x = seam.
inline vibro::FrameSequence splice_columns(const vibro::FrameSequence& a,
                                           const vibro::FrameSequence& b,
                                           int seam) {
    vibro::FrameSequence out = a;
    for (int t = 0; t < out.count(); ++t)
        out.frames[t].rightCols(a.width() - seam) =
            b.frames[t].rightCols(a.width() - seam);
    return out;
}

}  // namespace oracle
