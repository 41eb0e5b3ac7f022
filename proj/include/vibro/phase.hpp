#pragma once

#include "vibro/steerable.hpp"
#include "vibro/types.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace vibro {

enum class Units { Px, Mm };

// Relative in-plane displacement time series at one pixel; dx[0] = dy[0] = 0.
struct DisplacementSignal {
    double x = 0;
    double y = 0;
    std::vector<double> dx;
    std::vector<double> dy;
    Units units = Units::Px;
    double fps = 0;
    int gaps_x = 0;  // velocity samples dropped as invalid and zero-filled
    int gaps_y = 0;

    bool empty() const { return dx.empty(); }
};

// One velocity component (px/frame) between two consecutive frames.
struct VelocityComponent {
    ImageD v;
    MaskB valid;
    double theta = 0;
};

namespace detail {

// Wrap-free phase derivatives from response products:
//   temporal: arg(curr * conj(prev))
//   spatial:  mean of the two one-sided arg(R(s+1) * conj(R(s))) differences
// Velocity = -d(phi)/dt / d(phi)/ds; NaN when the pixel is unusable.
double velocity_at(const QuadratureResponse<double>& prev,
                   const QuadratureResponse<double>& curr, int x, int y,
                   double slope_floor);

// Displacement of one pixel relative to the reference frame, from the total
// phase excursion arg(curr * conj(ref)) divided by the local spatial slope.
// Anchoring every sample to the reference keeps phase noise bounded; summing
// per-frame velocities instead lets noise and validity dropouts random-walk.
// phase_track carries the previous unwrapped excursion so motion beyond half
// a wavelength stays on the right branch; NaN when the pixel is unusable.
double displacement_at(const QuadratureResponse<double>& ref,
                       const QuadratureResponse<double>& curr, int x, int y,
                       double slope_floor, double& phase_track);

}  // namespace detail

// Full-field velocity for one orientation (x motion for theta=0, y for pi/2).
VelocityComponent phase_velocity(const QuadratureResponse<double>& prev,
                                 const QuadratureResponse<double>& curr,
                                 double slope_floor = 0.02);

// Cumulative sum of per-frame velocity increments; d has v.size()+1 samples
// and starts at zero. Non-finite velocity samples contribute zero; their
// count is returned through gaps.
std::vector<double> integrate_velocity(const std::vector<double>& v,
                                       int* gaps = nullptr);

// mm-per-px scale from a marker of known physical width.
double scale_from_marker(double width_px, double width_mm);

DisplacementSignal to_units(const DisplacementSignal& sig, double scale_mm_per_px);

void write_displacement_csv(const std::filesystem::path& path,
                            const DisplacementSignal& sig);
DisplacementSignal load_displacement_csv(const std::filesystem::path& path);

}  // namespace vibro
