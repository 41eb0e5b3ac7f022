#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

// Image convention used throughout: arr(y, x) with y the row index.
// Luminance is kept in [0, 1].

namespace vibro {

template <class S>
using Image = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

using ImageD = Image<double>;
using ImageF = Image<float>;
using MaskB = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;

// Bad parameter values, flag combinations, malformed requests.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing/corrupt files, inconsistent inputs, signals too short to process.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned region of interest in pixel coordinates.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;

    static Roi whole(int frame_width, int frame_height) {
        return Roi{0, 0, frame_width, frame_height};
    }

    bool contains(int x, int y) const {
        return x >= x0 && x < x0 + width && y >= y0 && y < y0 + height;
    }

    int x1() const { return x0 + width; }
    int y1() const { return y0 + height; }

    void validate(int frame_width, int frame_height) const {
        if (width <= 0 || height <= 0)
            throw ConfigError("roi has non-positive size");
        if (x0 < 0 || y0 < 0 || x1() > frame_width || y1() > frame_height)
            throw ConfigError("roi extends outside the frame");
    }
};

}  // namespace vibro
