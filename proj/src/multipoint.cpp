#include "vibro/multipoint.hpp"

#include "vibro/colormap.hpp"
#include "vibro/parallel.hpp"
#include "vibro/spectral.hpp"
#include "vibro/steerable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace vibro {

namespace {

int sgn(int v) { return (v > 0) - (v < 0); }

}  // namespace

WeightKernel::WeightKernel(ImageD k) : k_(std::move(k)) {
    const int n = int(k_.rows());
    if (n == 0 || k_.cols() != n)
        throw ConfigError("weight kernel must be square");
    if (n % 2 == 0) throw ConfigError("weight kernel side must be odd");
    if (!k_.isFinite().all() || (k_ < 0).any())
        throw ConfigError("weight kernel values must be finite and >= 0");
    if (!(k_.sum() > 0)) throw ConfigError("weight kernel sums to zero");

    const int c = n / 2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (k_(i, j) != k_(n - 1 - i, n - 1 - j))
                throw ConfigError("weight kernel must be point-symmetric");
            if (i == c && j == c) continue;
            // One step along the ray back toward the center may not be
            // smaller than this cell.
            const int ii = i - sgn(i - c);
            const int jj = j - sgn(j - c);
            if (k_(ii, jj) < k_(i, j))
                throw ConfigError(
                    "weight kernel must be non-increasing away from center");
        }
}

WeightKernel WeightKernel::binomial(int size) {
    if (size < 1 || size % 2 == 0)
        throw ConfigError("binomial kernel size must be odd and positive");
    Eigen::VectorXd row = Eigen::VectorXd::Ones(1);
    for (int s = 1; s < size; ++s) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(s + 1);
        for (int i = 0; i < s; ++i) {
            next(i) += row(i);
            next(i + 1) += row(i);
        }
        row = next;
    }
    row /= row.sum();
    return WeightKernel(ImageD((row * row.transpose()).array()));
}

WeightKernel WeightKernel::uniform(int size) {
    if (size < 1 || size % 2 == 0)
        throw ConfigError("uniform kernel size must be odd and positive");
    return WeightKernel(ImageD::Constant(size, size, 1.0 / (size * size)));
}

WeightKernel WeightKernel::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read kernel file " + path.string());
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    if (!in.eof()) throw DataError("non-numeric data in " + path.string());
    const int n = int(std::lround(std::sqrt(double(vals.size()))));
    if (vals.empty() || std::size_t(n) * n != vals.size())
        throw DataError("kernel file must hold N*N values");
    ImageD k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = vals[std::size_t(i) * n + j];
    return WeightKernel(std::move(k));
}

double WeightKernel::full_patch_sum_sq() const {
    const ImageD w = k_ / k_.sum();
    return (w * w).sum();
}

DisplacementSignal patch_signal(int cx, int cy, const SignalMap& signals,
                                const WeightKernel& kernel) {
    const int r = kernel.radius();
    const ImageD& k = kernel.values();

    struct Contrib {
        const DisplacementSignal* sig;
        double w;
    };
    std::vector<Contrib> parts;
    double denom = 0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const auto it = signals.find({cx + dx, cy + dy});
            if (it == signals.end() || it->second.empty()) continue;
            const double kw = k(dy + r, dx + r);
            if (kw <= 0) continue;
            denom += kw;
            parts.push_back({&it->second, kw});
        }

    DisplacementSignal out;
    out.x = cx;
    out.y = cy;
    if (denom <= 0) return out;  // nothing to normalize against

    const std::size_t n = parts.front().sig->dx.size();
    out.fps = parts.front().sig->fps;
    out.units = parts.front().sig->units;
    out.dx.assign(n, 0.0);
    out.dy.assign(n, 0.0);
    for (const Contrib& c : parts) {
        if (c.sig->dx.size() != n || c.sig->fps != out.fps ||
            c.sig->units != out.units)
            throw DataError("patch signals disagree in length, rate, or units");
        const double w = c.w / denom;
        for (std::size_t t = 0; t < n; ++t) {
            out.dx[t] += w * c.sig->dx[t];
            out.dy[t] += w * c.sig->dy[t];
        }
        out.gaps_x += c.sig->gaps_x;
        out.gaps_y += c.sig->gaps_y;
    }
    return out;
}

MeasureResult measure_points(const FrameSequence& seq, const Roi& roi,
                             const WeightKernel& kernel,
                             const MeasureParams& params) {
    seq.validate();
    roi.validate(seq.width(), seq.height());
    if (seq.count() < 2)
        throw DataError("need at least 2 frames to measure motion");

    const auto kx = make_quadrature_kernels<double>(params.sigma_px, 0.0);
    const auto ky = make_quadrature_kernels<double>(params.sigma_px, kPi / 2);

    // Keep detection away from the frame edge: phase needs the filter
    // support plus one pixel for the spatial derivative.
    const int margin = (kx.taps + 1) / 2 + 1;
    Roi det;
    det.x0 = std::max(roi.x0, margin);
    det.y0 = std::max(roi.y0, margin);
    det.width = std::min(roi.x1(), seq.width() - margin) - det.x0;
    det.height = std::min(roi.y1(), seq.height() - margin) - det.y0;
    if (det.width <= 0 || det.height <= 0)
        throw DataError("roi leaves no room inside the filter margin");

    const ImageD first = seq.frames[0].cast<double>();
    MeasureResult res;
    res.fps = seq.fps;
    res.features = harris_corners(first, det, params.harris);
    const auto& pts = res.features.points;
    if (pts.empty()) throw DataError("no feature points detected in roi");

    const int n = seq.count();
    const int m = int(pts.size());
    std::vector<std::vector<double>> dx(m, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> dy(m, std::vector<double>(n, 0.0));
    std::vector<double> track_x(m, 0.0), track_y(m, 0.0);
    std::vector<int> gaps_x(m, 0), gaps_y(m, 0);

    auto analyze = [&](const ImageD& f, const auto& k) {
        return analyze_frame<double>(f, k, params.amplitude_floor_rel,
                                     params.threads);
    };
    const QuadratureResponse<double> rx0 = analyze(first, kx);
    const QuadratureResponse<double> ry0 = analyze(first, ky);
    for (int t = 1; t < n; ++t) {
        const ImageD frame = seq.frames[t].cast<double>();
        QuadratureResponse<double> rx = analyze(frame, kx);
        QuadratureResponse<double> ry = analyze(frame, ky);
        parallel_for(m, params.threads, [&](std::int64_t f) {
            const Feature& p = pts[f];
            const double ux = detail::displacement_at(
                rx0, rx, p.x, p.y, params.slope_floor, track_x[f]);
            const double uy = detail::displacement_at(
                ry0, ry, p.x, p.y, params.slope_floor, track_y[f]);
            if (std::isfinite(ux)) {
                dx[f][t] = ux;
            } else {
                dx[f][t] = dx[f][t - 1];
                ++gaps_x[f];
            }
            if (std::isfinite(uy)) {
                dy[f][t] = uy;
            } else {
                dy[f][t] = dy[f][t - 1];
                ++gaps_y[f];
            }
        });
    }

    SignalMap raw;
    res.points.resize(m);
    for (int f = 0; f < m; ++f) {
        DisplacementSignal s;
        s.x = pts[f].x;
        s.y = pts[f].y;
        s.fps = seq.fps;
        s.units = Units::Px;
        s.dx = std::move(dx[f]);
        s.dy = std::move(dy[f]);
        s.gaps_x = gaps_x[f];
        s.gaps_y = gaps_y[f];
        res.points[f].pt = pts[f];
        res.points[f].raw = s;
        raw.emplace(std::make_pair(pts[f].x, pts[f].y), std::move(s));
    }
    parallel_for(m, params.threads, [&](std::int64_t f) {
        res.points[f].patch =
            patch_signal(pts[f].x, pts[f].y, raw, kernel);
    });
    return res;
}

namespace {

// Strongest bin with f_min <= freq < fps/2 (ties go low) plus its ratio to
// the median magnitude over the same range; a flat noise floor scores near 1.
struct AxisPeak {
    double freq = 0;
    double snr = 0;
};

AxisPeak axis_peak(const Spectrum& s, double f_min) {
    const double nyq = s.fps / 2;
    std::vector<double> mags;
    double best_f = -1, best_m = -1;
    for (std::size_t k = 0; k < s.mag.size(); ++k) {
        if (s.freqs_hz[k] < f_min || s.freqs_hz[k] >= nyq) continue;
        mags.push_back(s.mag[k]);
        if (s.mag[k] > best_m) {
            best_m = s.mag[k];
            best_f = s.freqs_hz[k];
        }
    }
    if (best_f < 0)
        throw ConfigError("no spectrum bins between f_min and fps/2");
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double med = mags[mags.size() / 2];
    AxisPeak p;
    p.freq = best_f;
    if (med > 0)
        p.snr = best_m / med;
    else if (best_m > 0)
        p.snr = std::numeric_limits<double>::infinity();
    return p;
}

}  // namespace

FrequencyMap dominant_frequency_map(const MeasureResult& result,
                                    double f_min) {
    FrequencyMap map;
    map.roi = result.features.roi;
    map.fps = result.fps;
    map.f_min = f_min;
    // A point joins the map only when one axis shows a clear spectral line.
    // Below this peak-to-median ratio the "peak" is indistinguishable from
    // the noise floor of an axis that carries no usable motion, and its
    // frequency would be a coin flip.
    constexpr double kMinPeakOverMedian = 10.0;
    for (const PointSignal& p : result.points) {
        const DisplacementSignal& s = p.patch.empty() ? p.raw : p.patch;
        const AxisPeak px = axis_peak(fft_spectrum(s.dx, s.fps), f_min);
        const AxisPeak py = axis_peak(fft_spectrum(s.dy, s.fps), f_min);
        const AxisPeak& best = py.snr > px.snr ? py : px;
        if (!(best.snr >= kMinPeakOverMedian)) continue;
        FrequencyMap::Entry e;
        e.x = p.pt.x;
        e.y = p.pt.y;
        e.freq_hz = best.freq;
        map.entries.push_back(e);
    }
    return map;
}

RgbImage render_frequency_map(const FrequencyMap& map,
                              const ImageD& background) {
    if (map.entries.empty()) throw DataError("frequency map is empty");
    if (map.fps <= 0) throw ConfigError("frequency map has no frame rate");
    const int w = int(background.cols());
    const int h = int(background.rows());
    const double f_hi = map.fps / 2;
    constexpr int kSeparator = 2, kRamp = 12;

    RgbImage img;
    img.r = ImageD::Zero(h + kSeparator + kRamp, w);
    img.g = img.r;
    img.b = img.r;
    img.r.topRows(h) = background;
    img.g.topRows(h) = background;
    img.b.topRows(h) = background;

    auto paint = [&](int x, int y, const std::array<std::uint8_t, 3>& c) {
        img.r(y, x) = c[0] / 255.0;
        img.g(y, x) = c[1] / 255.0;
        img.b(y, x) = c[2] / 255.0;
    };
    for (const auto& e : map.entries) {
        const auto c = freq_to_rgb(e.freq_hz, map.f_min, f_hi);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = e.x + dx, y = e.y + dy;
                if (x >= 0 && x < w && y >= 0 && y < h) paint(x, y, c);
            }
    }
    // Feature centers repainted last so overlapping dots keep their own hue.
    for (const auto& e : map.entries)
        if (e.x >= 0 && e.x < w && e.y >= 0 && e.y < h)
            paint(e.x, e.y, freq_to_rgb(e.freq_hz, map.f_min, f_hi));

    for (int x = 0; x < w; ++x) {
        const double f =
            map.f_min + (f_hi - map.f_min) * (w > 1 ? double(x) / (w - 1) : 0);
        const auto c = freq_to_rgb(f, map.f_min, f_hi);
        for (int y = h + kSeparator; y < h + kSeparator + kRamp; ++y)
            paint(x, y, c);
    }
    return img;
}

DisplacementSignal mean_signal(const MeasureResult& result) {
    if (result.points.empty()) throw DataError("no signals to average");
    DisplacementSignal out;
    out.fps = result.fps;
    out.units = Units::Px;
    const std::size_t n = result.points.front().patch.dx.size();
    out.dx.assign(n, 0.0);
    out.dy.assign(n, 0.0);
    double cx = 0, cy = 0;
    for (const PointSignal& p : result.points) {
        if (p.patch.dx.size() != n)
            throw DataError("signals disagree in length");
        for (std::size_t t = 0; t < n; ++t) {
            out.dx[t] += p.patch.dx[t];
            out.dy[t] += p.patch.dy[t];
        }
        out.gaps_x += p.patch.gaps_x;
        out.gaps_y += p.patch.gaps_y;
        cx += p.pt.x;
        cy += p.pt.y;
    }
    const double m = double(result.points.size());
    for (std::size_t t = 0; t < n; ++t) {
        out.dx[t] /= m;
        out.dy[t] /= m;
    }
    out.x = cx / m;
    out.y = cy / m;
    return out;
}

void write_frequency_map_csv(const std::filesystem::path& path,
                             const FrequencyMap& map) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "x,y,freq_hz\n";
    char line[64];
    for (const auto& e : map.entries) {
        std::snprintf(line, sizeof line, "%d,%d,%.6g\n", e.x, e.y, e.freq_hz);
        out << line;
    }
}

}  // namespace vibro
