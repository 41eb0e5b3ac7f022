#include "vibro/harris.hpp"

#include "vibro/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace vibro {

namespace {

Eigen::VectorXd gaussian_taps(double sigma) {
    const int half = std::max(1, int(std::ceil(3.0 * sigma)));
    Eigen::VectorXd k(2 * half + 1);
    for (int i = 0; i < k.size(); ++i) {
        const double u = i - half;
        k(i) = std::exp(-u * u / (2.0 * sigma * sigma));
    }
    k /= k.sum();
    return k;
}

}  // namespace

FeatureSet harris_corners(const ImageD& frame, const Roi& roi,
                          const HarrisParams& params) {
    roi.validate(int(frame.cols()), int(frame.rows()));
    if (!frame.isFinite().all()) throw DataError("frame has non-finite pixels");

    const Eigen::VectorXd win = gaussian_taps(params.window_sigma);
    const int wh = int(win.size()) / 2;
    if (roi.width < int(win.size()) + 2 || roi.height < int(win.size()) + 2)
        throw ConfigError("roi too small for the harris window");

    // Work on the ROI expanded by the window margin so windowing near the ROI
    // edge sees real image content where it exists.
    const int m = wh + 1;
    const int cx0 = std::max(0, roi.x0 - m);
    const int cy0 = std::max(0, roi.y0 - m);
    const int cx1 = std::min<int>(int(frame.cols()), roi.x1() + m);
    const int cy1 = std::min<int>(int(frame.rows()), roi.y1() + m);
    const ImageD crop = frame.block(cy0, cx0, cy1 - cy0, cx1 - cx0);
    const int ch = int(crop.rows());
    const int cw = int(crop.cols());

    ImageD gx = ImageD::Zero(ch, cw), gy = ImageD::Zero(ch, cw);
    for (int y = 1; y + 1 < ch; ++y)
        for (int x = 1; x + 1 < cw; ++x) {
            gx(y, x) = 0.5 * (crop(y, x + 1) - crop(y, x - 1));
            gy(y, x) = 0.5 * (crop(y + 1, x) - crop(y - 1, x));
        }

    const ImageD sxx = correlate_separable(ImageD(gx * gx), win, win);
    const ImageD sxy = correlate_separable(ImageD(gx * gy), win, win);
    const ImageD syy = correlate_separable(ImageD(gy * gy), win, win);
    const ImageD tr = sxx + syy;
    const ImageD resp = sxx * syy - sxy * sxy - params.k * tr * tr;

    FeatureSet out;
    out.roi = roi;
    double rmax = 0.0;
    for (int y = roi.y0; y < roi.y1(); ++y)
        for (int x = roi.x0; x < roi.x1(); ++x)
            rmax = std::max(rmax, resp(y - cy0, x - cx0));
    if (rmax <= 0.0) return out;  // flat or edge-only region

    const double thresh = params.threshold_rel * rmax;
    const int r = std::max(0, params.nms_radius);
    for (int y = roi.y0; y < roi.y1(); ++y)
        for (int x = roi.x0; x < roi.x1(); ++x) {
            const double v = resp(y - cy0, x - cx0);
            if (v <= thresh) continue;
            // Local maximum within the NMS window; equal scores are broken
            // toward smaller (y, x) so exactly one of a tied pair survives.
            bool is_max = true;
            for (int dy = -r; dy <= r && is_max; ++dy)
                for (int dx = -r; dx <= r && is_max; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int qy = y - cy0 + dy;
                    const int qx = x - cx0 + dx;
                    if (qy < 0 || qy >= ch || qx < 0 || qx >= cw) continue;
                    const double q = resp(qy, qx);
                    if (q > v || (q == v && (dy < 0 || (dy == 0 && dx < 0))))
                        is_max = false;
                }
            if (is_max) out.points.push_back({x, y, v});
        }
    // Scan order already yields (y, x) sorted points.
    return out;
}

void write_features_csv(const std::filesystem::path& path,
                        const FeatureSet& features) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write csv: " + path.string());
    out << "x,y,score\n";
    char line[96];
    for (const auto& p : features.points) {
        std::snprintf(line, sizeof line, "%d,%d,%.6g\n", p.x, p.y, p.score);
        out << line;
    }
}

ImageF render_feature_overlay(const ImageF& frame, const FeatureSet& features) {
    ImageF out = frame;
    for (const auto& p : features.points)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int y = p.y + dy, x = p.x + dx;
                if (y >= 0 && y < out.rows() && x >= 0 && x < out.cols())
                    out(y, x) = 1.0f;
            }
    return out;
}

}  // namespace vibro
