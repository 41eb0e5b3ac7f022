#pragma once

#include "vibro/convolve.hpp"
#include "vibro/types.hpp"

#include <cmath>
#include <complex>

namespace vibro {

// G2/H2 quadrature pair: the second derivative of a Gaussian and the
// polynomial-times-Gaussian fit of its Hilbert transform (Freeman & Adelson
// style basis, steered to theta = 0 or pi/2). Both kernels are separable
// outer products profile(axis) x gaussian(cross axis); the 2D arrays and the
// 1D factors are kept side by side so the fast path and the contract agree.
template <class S>
struct KernelPair {
    Image<S> g2;  // even kernel, zero DC
    Image<S> h2;  // odd kernel
    S theta = 0;
    S sigma_px = 0;
    int taps = 0;

    Eigen::Vector<S, Eigen::Dynamic> profile_even;   // along the filter axis
    Eigen::Vector<S, Eigen::Dynamic> profile_odd;
    Eigen::Vector<S, Eigen::Dynamic> profile_gauss;  // across the filter axis

    bool along_x() const { return std::abs(theta) < S(1e-9); }
};

// Per-pixel complex response A*exp(i*phi) of one frame for one orientation.
template <class S>
struct QuadratureResponse {
    Image<std::complex<S>> resp;
    MaskB valid;
    S theta = 0;
    int border = 0;  // outermost pixels are always invalid

    Image<S> amplitude() const { return resp.abs(); }
    Image<S> phase() const { return resp.arg(); }
};

template <class S>
KernelPair<S> make_quadrature_kernels(S sigma_px, S theta) {
    if (!(sigma_px > 0)) throw ConfigError("sigma_px must be positive");
    const bool x_axis = std::abs(theta) < S(1e-9);
    if (!x_axis && std::abs(theta - S(kPi / 2)) > S(1e-9))
        throw ConfigError("theta must be 0 or pi/2");

    const int half = int(std::ceil(4.0 * double(sigma_px)));
    const int taps = 2 * half + 1;
    Eigen::Vector<S, Eigen::Dynamic> fe(taps), fo(taps), gw(taps);
    for (int i = 0; i < taps; ++i) {
        // Sample at u = x/(sigma*sqrt(2)) so exp(-u^2) has scale sigma_px.
        const double u = double(i - half) / (double(sigma_px) * std::sqrt(2.0));
        const double g = std::exp(-u * u);
        fe(i) = S((2.0 * u * u - 1.0) * g);
        fo(i) = S((u * u * u - 2.254 * u) * g);
        gw(i) = S(g);
    }
    fe.array() -= fe.mean();  // exact zero DC for the even kernel
    fe /= fe.norm() * gw.norm();
    fo /= fo.norm() * gw.norm();

    KernelPair<S> k;
    k.theta = theta;
    k.sigma_px = sigma_px;
    k.taps = taps;
    if (x_axis) {
        k.g2 = (gw * fe.transpose()).array();
        k.h2 = (gw * fo.transpose()).array();
    } else {
        k.g2 = (fe * gw.transpose()).array();
        k.h2 = (fo * gw.transpose()).array();
    }
    k.profile_even = fe;
    k.profile_odd = fo;
    k.profile_gauss = gw;
    return k;
}

// Correlates the frame with both kernels (separable passes, reflected
// boundaries) and masks pixels whose amplitude carries no usable phase.
template <class S>
QuadratureResponse<S> analyze_frame(const Image<S>& frame,
                                    const KernelPair<S>& k,
                                    S amplitude_floor_rel = S(1e-4),
                                    int threads = 1) {
    if (frame.rows() < k.taps || frame.cols() < k.taps)
        throw DataError("frame smaller than kernel");
    Image<S> re, im;
    if (k.along_x()) {
        re = correlate_separable(frame, k.profile_even, k.profile_gauss, threads);
        im = correlate_separable(frame, k.profile_odd, k.profile_gauss, threads);
    } else {
        re = correlate_separable(frame, k.profile_gauss, k.profile_even, threads);
        im = correlate_separable(frame, k.profile_gauss, k.profile_odd, threads);
    }

    QuadratureResponse<S> q;
    q.theta = k.theta;
    q.border = (k.taps + 1) / 2;
    q.resp.resize(frame.rows(), frame.cols());
    q.resp.real() = re;
    q.resp.imag() = im;

    const S range = frame.maxCoeff() - frame.minCoeff();
    const S l1 = std::max(k.g2.abs().sum(), k.h2.abs().sum());
    const S floor = amplitude_floor_rel * range * l1;
    if (range > S(0))
        q.valid = (re * re + im * im) > floor * floor;
    else  // a flat frame has no texture to trust anywhere
        q.valid = MaskB::Constant(frame.rows(), frame.cols(), false);
    q.valid.topRows(q.border).setConstant(false);
    q.valid.bottomRows(q.border).setConstant(false);
    q.valid.leftCols(q.border).setConstant(false);
    q.valid.rightCols(q.border).setConstant(false);
    return q;
}

// Magnitude of the g2 channel's correlation transfer at spatial frequency
// omega (rad/px) along the filter axis, sign included.
template <class S>
double g2_transfer(const KernelPair<S>& k, double omega) {
    double acc = 0.0;
    const int half = k.taps / 2;
    const double gsum = double(k.profile_gauss.sum());
    for (int i = 0; i < k.taps; ++i)
        acc += double(k.profile_even(i)) * std::cos(omega * (i - half));
    return acc * gsum;
}

// Spatial frequency (rad/px) where the g2 transfer magnitude peaks.
template <class S>
double g2_peak_frequency(const KernelPair<S>& k) {
    double best_w = 0.0, best_t = 0.0;
    for (double w = 0.001; w <= kPi; w += 0.001) {
        const double t = std::abs(g2_transfer(k, w));
        if (t > best_t) {
            best_t = t;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace vibro
