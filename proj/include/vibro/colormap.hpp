#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace vibro {

// Maps frequency to a fully saturated hue, blue (240 deg) at f_lo down to
// red (0 deg) at f_hi. 8-bit channels quantize the hue ramp finely enough
// that decoding recovers the frequency to within (f_hi - f_lo) / 255.
inline std::array<std::uint8_t, 3> freq_to_rgb(double f, double f_lo,
                                               double f_hi) {
    double t = f_hi > f_lo ? (f - f_lo) / (f_hi - f_lo) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double hue = 240.0 * (1.0 - t);
    const double hp = hue / 60.0;
    const double x = 1.0 - std::abs(std::fmod(hp, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = 1; g = x; break;
        case 1: r = x; g = 1; break;
        case 2: g = 1; b = x; break;
        case 3: g = x; b = 1; break;
        default: r = x; b = 1; break;
    }
    auto q = [](double v) {
        return static_cast<std::uint8_t>(std::lround(v * 255.0));
    };
    return {q(r), q(g), q(b)};
}

// Inverse of freq_to_rgb for palette colors (one channel saturated, one
// near zero). Gray pixels fall back to f_lo.
inline double rgb_to_freq(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                          double f_lo, double f_hi) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    if (d <= 0) return f_lo;
    double hp;
    if (mx == r)
        hp = (g - b) / d;
    else if (mx == g)
        hp = (b - r) / d + 2.0;
    else
        hp = (r - g) / d + 4.0;
    const double hue = std::clamp(60.0 * hp, 0.0, 240.0);
    return f_lo + (1.0 - hue / 240.0) * (f_hi - f_lo);
}

}  // namespace vibro
