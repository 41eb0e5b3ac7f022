#pragma once

#include "vibro/parallel.hpp"
#include "vibro/types.hpp"

namespace vibro {

// Mirror index about the border without repeating the edge sample
// (…, 2, 1, | 0, 1, 2, …, n-1 |, n-2, n-3, …).
inline Eigen::Index reflect101(Eigen::Index i, Eigen::Index n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

// Correlation along x: out(y, x) = sum_u k(u) * in(y, x + u - h), h = taps/2.
// Reflected boundaries. Requires width >= taps.
template <class S>
Image<S> correlate_x(const Image<S>& in,
                     const Eigen::Vector<S, Eigen::Dynamic>& k,
                     int threads = 1) {
    const Eigen::Index h = k.size() / 2;
    const Eigen::Index w = in.cols();
    if (w < k.size()) throw DataError("frame narrower than kernel taps");
    Image<S> out(in.rows(), w);
    parallel_for(w, threads, [&](std::int64_t x) {
        auto col = out.col(x);
        col = k(0) * in.col(reflect101(x - h, w));
        for (Eigen::Index u = 1; u < k.size(); ++u)
            col += k(u) * in.col(reflect101(x + u - h, w));
    });
    return out;
}

// Correlation along y, same conventions as correlate_x.
template <class S>
Image<S> correlate_y(const Image<S>& in,
                     const Eigen::Vector<S, Eigen::Dynamic>& k,
                     int threads = 1) {
    const Eigen::Index taps = k.size();
    const Eigen::Index h = taps / 2;
    const Eigen::Index n = in.rows();
    if (n < taps) throw DataError("frame shorter than kernel taps");
    Image<S> out(n, in.cols());
    parallel_for(in.cols(), threads, [&](std::int64_t x) {
        const auto src = in.col(x);
        auto dst = out.col(x);
        for (Eigen::Index y = 0; y < h; ++y) {
            S acc = 0;
            for (Eigen::Index u = 0; u < taps; ++u)
                acc += k(u) * src(reflect101(y + u - h, n));
            dst(y) = acc;
        }
        for (Eigen::Index y = h; y + h < n; ++y)
            dst(y) = k.dot(src.matrix().segment(y - h, taps));
        for (Eigen::Index y = std::max(h, n - h); y < n; ++y) {
            S acc = 0;
            for (Eigen::Index u = 0; u < taps; ++u)
                acc += k(u) * src(reflect101(y + u - h, n));
            dst(y) = acc;
        }
    });
    return out;
}

// Separable correlation with an outer-product kernel ky * kx^T.
template <class S>
Image<S> correlate_separable(const Image<S>& in,
                             const Eigen::Vector<S, Eigen::Dynamic>& kx,
                             const Eigen::Vector<S, Eigen::Dynamic>& ky,
                             int threads = 1) {
    return correlate_y(correlate_x(in, kx, threads), ky, threads);
}

}  // namespace vibro
