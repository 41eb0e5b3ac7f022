#include "vibro/phase.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vibro {

namespace detail {

double velocity_at(const QuadratureResponse<double>& prev,
                   const QuadratureResponse<double>& curr, int x, int y,
                   double slope_floor) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const bool along_x = std::abs(curr.theta) < 1e-9;
    const int sx = along_x ? 1 : 0;
    const int sy = along_x ? 0 : 1;
    if (!curr.valid(y, x) || !prev.valid(y, x)) return nan;
    if (!curr.valid(y + sy, x + sx) || !curr.valid(y - sy, x - sx)) return nan;

    const std::complex<double> c = curr.resp(y, x);
    const std::complex<double> fwd = curr.resp(y + sy, x + sx) * std::conj(c);
    const std::complex<double> bwd = c * std::conj(curr.resp(y - sy, x - sx));
    const double slope = 0.5 * (std::arg(fwd) + std::arg(bwd));
    if (std::abs(slope) < slope_floor) return nan;

    const double dphi_dt = std::arg(c * std::conj(prev.resp(y, x)));
    return -dphi_dt / slope;
}

double displacement_at(const QuadratureResponse<double>& ref,
                       const QuadratureResponse<double>& curr, int x, int y,
                       double slope_floor, double& phase_track) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    const bool along_x = std::abs(curr.theta) < 1e-9;
    const int sx = along_x ? 1 : 0;
    const int sy = along_x ? 0 : 1;
    if (!curr.valid(y, x) || !ref.valid(y, x)) return nan;
    if (!curr.valid(y + sy, x + sx) || !curr.valid(y - sy, x - sx)) return nan;

    const std::complex<double> c = curr.resp(y, x);
    const std::complex<double> fwd = curr.resp(y + sy, x + sx) * std::conj(c);
    const std::complex<double> bwd = c * std::conj(curr.resp(y - sy, x - sx));
    const double slope = 0.5 * (std::arg(fwd) + std::arg(bwd));
    if (std::abs(slope) < slope_floor) return nan;

    const double pv = std::arg(c * std::conj(ref.resp(y, x)));
    const double u = pv + two_pi * std::round((phase_track - pv) / two_pi);
    phase_track = u;
    return -u / slope;
}

}  // namespace detail

VelocityComponent phase_velocity(const QuadratureResponse<double>& prev,
                                 const QuadratureResponse<double>& curr,
                                 double slope_floor) {
    if (prev.resp.rows() != curr.resp.rows() ||
        prev.resp.cols() != curr.resp.cols())
        throw DataError("responses differ in size");
    if (prev.theta != curr.theta)
        throw DataError("responses differ in orientation");
    const int h = int(curr.resp.rows());
    const int w = int(curr.resp.cols());
    VelocityComponent out;
    out.theta = curr.theta;
    out.v = ImageD::Constant(h, w, std::numeric_limits<double>::quiet_NaN());
    out.valid = MaskB::Constant(h, w, false);
    for (int y = 1; y + 1 < h; ++y)
        for (int x = 1; x + 1 < w; ++x) {
            const double v = detail::velocity_at(prev, curr, x, y, slope_floor);
            if (std::isfinite(v)) {
                out.v(y, x) = v;
                out.valid(y, x) = true;
            }
        }
    return out;
}

std::vector<double> integrate_velocity(const std::vector<double>& v,
                                       int* gaps) {
    std::vector<double> d(v.size() + 1);
    d[0] = 0.0;
    int dropped = 0;
    for (size_t t = 0; t < v.size(); ++t) {
        double step = v[t];
        if (!std::isfinite(step)) {
            step = 0.0;
            ++dropped;
        }
        d[t + 1] = d[t] + step;
    }
    if (gaps) *gaps = dropped;
    return d;
}

double scale_from_marker(double width_px, double width_mm) {
    if (width_px <= 0 || width_mm <= 0)
        throw ConfigError("marker widths must be positive");
    return width_mm / width_px;
}

DisplacementSignal to_units(const DisplacementSignal& sig,
                            double scale_mm_per_px) {
    if (scale_mm_per_px <= 0) throw ConfigError("scale must be positive");
    if (sig.units != Units::Px) throw ConfigError("signal is not in pixels");
    DisplacementSignal out = sig;
    for (auto& v : out.dx) v *= scale_mm_per_px;
    for (auto& v : out.dy) v *= scale_mm_per_px;
    out.units = Units::Mm;
    return out;
}

void write_displacement_csv(const std::filesystem::path& path,
                            const DisplacementSignal& sig) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write csv: " + path.string());
    out << "t_s,dx,dy,units\n";
    const char* u = sig.units == Units::Px ? "px" : "mm";
    char line[160];
    for (size_t t = 0; t < sig.dx.size(); ++t) {
        std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%s\n",
                      sig.fps > 0 ? t / sig.fps : double(t), sig.dx[t],
                      sig.dy[t], u);
        out << line;
    }
    if (!out) throw DataError("write failed: " + path.string());
}

DisplacementSignal load_displacement_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open csv: " + path.string());
    DisplacementSignal sig;
    std::string line;
    std::getline(in, line);  // header
    double t0 = 0, t1 = 0;
    int n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f0, f1, f2, f3;
        std::getline(ss, f0, ',');
        std::getline(ss, f1, ',');
        std::getline(ss, f2, ',');
        std::getline(ss, f3, ',');
        const double t = std::stod(f0);
        if (n == 0) t0 = t;
        if (n == 1) t1 = t;
        sig.dx.push_back(std::stod(f1));
        sig.dy.push_back(std::stod(f2));
        if (f3 == "mm") sig.units = Units::Mm;
        ++n;
    }
    if (n < 2) throw DataError("displacement csv needs at least two rows");
    if (t1 > t0) {
        // Timestamps were written with 6 significant digits; snap rates that
        // are within rounding error of a whole number back to it.
        const double fps = 1.0 / (t1 - t0);
        const double snapped = std::round(fps);
        sig.fps = std::abs(fps - snapped) < 1e-3 ? snapped : fps;
    }
    return sig;
}

}  // namespace vibro
