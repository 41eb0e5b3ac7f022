#include "vibro/frame_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace vibro {

namespace fs = std::filesystem;

void FrameSequence::validate() const {
    if (fps <= 0) throw DataError("fps must be positive");
    for (const auto& f : frames) {
        if (f.rows() != height() || f.cols() != width())
            throw DataError("frame dimension mismatch");
        if (!f.isFinite().all() || (f < 0.0f).any() || (f > 1.0f).any())
            throw DataError("luminance outside [0,1]");
    }
    if (scale_mm_per_px && *scale_mm_per_px <= 0)
        throw DataError("scale must be positive");
}

// ---------------------------------------------------------------------------
// PGM / PPM

namespace {

int read_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comment lines.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    return v;
}

}  // namespace

ImageF load_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open frame file: " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw DataError("unsupported pixel format (expected binary PGM): " +
                        path.string());
    const int w = read_pnm_token(in);
    const int h = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw DataError("malformed PGM header: " + path.string());
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(size_t(w) * h * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (!in) throw DataError("truncated PGM data: " + path.string());
    ImageF img(h, w);
    const float inv = 1.0f / float(maxval);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = (size_t(y) * w + x) * bytes;
            const unsigned v =
                bytes == 1 ? buf[i] : (unsigned(buf[i]) << 8) | buf[i + 1];
            img(y, x) = float(v) * inv;
        }
    return img;
}

void save_pgm(const fs::path& path, const ImageF& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ConfigError("pgm bit depth must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write frame file: " + path.string());
    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
    const int bytes = bit_depth / 8;
    out << "P5\n" << img.cols() << " " << img.rows() << "\n" << maxval << "\n";
    std::vector<unsigned char> buf(size_t(img.rows()) * img.cols() * bytes);
    size_t i = 0;
    for (Eigen::Index y = 0; y < img.rows(); ++y)
        for (Eigen::Index x = 0; x < img.cols(); ++x) {
            const float v = std::clamp(img(y, x), 0.0f, 1.0f);
            const unsigned q = unsigned(std::lround(double(v) * maxval));
            if (bytes == 2) buf[i++] = (unsigned char)(q >> 8);
            buf[i++] = (unsigned char)(q & 0xff);
        }
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

void save_ppm(const fs::path& path, const ImageD& r, const ImageD& g,
              const ImageD& b) {
    if (r.rows() != g.rows() || r.rows() != b.rows() || r.cols() != g.cols() ||
        r.cols() != b.cols())
        throw DataError("color planes differ in size");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image file: " + path.string());
    out << "P6\n" << r.cols() << " " << r.rows() << "\n255\n";
    std::vector<unsigned char> buf(size_t(r.rows()) * r.cols() * 3);
    size_t i = 0;
    for (Eigen::Index y = 0; y < r.rows(); ++y)
        for (Eigen::Index x = 0; x < r.cols(); ++x) {
            buf[i++] = (unsigned char)std::lround(std::clamp(r(y, x), 0.0, 1.0) * 255.0);
            buf[i++] = (unsigned char)std::lround(std::clamp(g(y, x), 0.0, 1.0) * 255.0);
            buf[i++] = (unsigned char)std::lround(std::clamp(b(y, x), 0.0, 1.0) * 255.0);
        }
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Manifest + sequence

namespace {

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d.pgm", index);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

FrameSequence load_sequence(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest: " + manifest_path.string());
    FrameSequence seq;
    int count = -1;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "fps")
            seq.fps = std::stod(val);
        else if (key == "scale_mm_per_px")
            seq.scale_mm_per_px = std::stod(val);
        else if (key == "count")
            count = std::stoi(val);
    }
    if (seq.fps <= 0) throw DataError("manifest fps must be positive");
    if (count < 0) throw DataError("manifest missing count");
    const fs::path dir = manifest_path.parent_path();
    seq.frames.reserve(count);
    for (int i = 0; i < count; ++i) {
        ImageF f = load_pgm(dir / frame_name(i));
        if (!seq.frames.empty() &&
            (f.rows() != seq.height() || f.cols() != seq.width()))
            throw DataError("frame dimension mismatch at index " +
                            std::to_string(i));
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

fs::path save_sequence(const FrameSequence& seq, const fs::path& dir,
                       int bit_depth) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (int i = 0; i < seq.count(); ++i)
        save_pgm(dir / frame_name(i), seq.frames[i], bit_depth);
    const fs::path manifest = dir / "manifest.txt";
    std::ofstream out(manifest);
    if (!out) throw DataError("cannot write manifest: " + manifest.string());
    out << "fps=" << fmt6(seq.fps) << "\n";
    if (seq.scale_mm_per_px)
        out << "scale_mm_per_px=" << fmt6(*seq.scale_mm_per_px) << "\n";
    out << "count=" << seq.count() << "\n";
    if (!out) throw DataError("write failed: " + manifest.string());
    return manifest;
}

// ---------------------------------------------------------------------------
// Synthesis

double pattern_value(const SyntheticMotionSpec& spec, int width, int height,
                     double x, double y) {
    switch (spec.pattern) {
        case Pattern::Grating: {
            // Sum of an x and a y grating: each filter orientation sees a pure
            // sinusoid on its own axis while crossings give 2-D structure.
            const double w = 2.0 * kPi / spec.period_px;
            return 0.5 + spec.contrast * std::sin(w * x) +
                   spec.contrast * std::sin(w * y);
        }
        case Pattern::Checkerboard: {
            const double w = 2.0 * kPi / spec.period_px;
            const double q = spec.sharpness;
            return 0.5 + 0.5 * std::erf(q * std::sin(w * x)) *
                             std::erf(q * std::sin(w * y));
        }
        case Pattern::Blob: {
            const double cx = 0.5 * (width - 1);
            const double cy = 0.5 * (height - 1);
            const double s2 = 2.0 * spec.blob_sigma_px * spec.blob_sigma_px;
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            return 0.5 + 0.4 * std::exp(-d2 / s2);
        }
    }
    return 0.5;
}

Eigen::Vector2d synthetic_displacement(const SyntheticMotionSpec& spec,
                                       double fps, int t) {
    const Eigen::Vector2d dir = spec.direction.normalized();
    const double d =
        spec.amplitude_px *
        (std::sin(2.0 * kPi * spec.freq_hz * t / fps + spec.phase0) -
         std::sin(spec.phase0));
    return d * dir;
}

namespace {

FrameSequence render(const SyntheticMotionSpec& spec, int width, int height,
                     double fps,
                     const std::function<double(double, double)>* amp_scale) {
    if (fps <= 0) throw ConfigError("fps must be positive");
    if (spec.amplitude_px < 0) throw ConfigError("amplitude must be >= 0");
    if (spec.freq_hz >= fps / 2.0)
        throw ConfigError("motion frequency violates the Nyquist limit fps/2");
    if (spec.direction.norm() == 0)
        throw ConfigError("direction must be a nonzero vector");
    const int n = std::max(1, int(std::llround(spec.duration_s * fps)));
    const Eigen::Vector2d dir = spec.direction.normalized();

    FrameSequence seq;
    seq.fps = fps;
    seq.frames.reserve(n);
    std::mt19937_64 rng(spec.noise_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < n; ++t) {
        const double d =
            spec.amplitude_px *
            std::sin(2.0 * kPi * spec.freq_hz * t / fps + spec.phase0);
        ImageF frame(height, width);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double a = amp_scale ? (*amp_scale)(x, y) : 1.0;
                const double dx = d * a * dir.x();
                const double dy = d * a * dir.y();
                double v = pattern_value(spec, width, height, x - dx, y - dy);
                if (spec.noise_sigma > 0) v += spec.noise_sigma * noise(rng);
                frame(y, x) = float(std::clamp(v, 0.0, 1.0));
            }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace

FrameSequence synthesize(const SyntheticMotionSpec& spec, int width, int height,
                         double fps) {
    return render(spec, width, height, fps, nullptr);
}

FrameSequence synthesize_modulated(
    const SyntheticMotionSpec& spec, int width, int height, double fps,
    const std::function<double(double, double)>& amp_scale) {
    return render(spec, width, height, fps, &amp_scale);
}

}  // namespace vibro
