#pragma once

#include <string>
#include <vector>

#include "isar/estimator.hpp"

namespace isar {

/// Image-plane geometry derived from the estimated velocity.
struct ImagingGeometry {
    double r0 = 0.0;           // sqrt(X0^2+Y0^2+Z0^2)
    double omega = 0.0;        // rotational rate, V_perp / R0
    double range_res = 0.0;    // c / (2W)
    double doppler_bw = 0.0;   // W_D = 2 omega Y_size f_c / c
    double crossrange_res = 0.0;  // lambda W_D / (2 M omega) == Y_size / M
    double doppler_res = 0.0;  // W_D / M
    double velocity_res = 0.0; // lambda * doppler_res / 2
    int range_bins = 0;        // N_r
    int crossrange_bins = 0;   // N_cr == M
    double range_origin = 0.0; // R0 - X_size/2
    double plane_x = 0.0, plane_y = 0.0;
    double carrier_hz = 0.0;
    double symbol_period = 0.0;

    // 0-based range bin satisfying (C*) for a sampled delay; -1 if off plane.
    int range_bin_of_delay(int delay) const;
    // l(r): sampled delay probed for range bin r.
    int delay_of_range_bin(int r) const;
    // Cross-range FFT bins per Hz of Doppler: c / (2 f_c omega Delta_cr).
    double crossrange_bins_per_hz() const;
};

ImagingGeometry geometry(const SceneConfig& cfg, double velocity_estimate);

// |R~[l(r)]| over range bins; lags outside the profile map to zero.
std::vector<double> range_profile(const CorrelationProfile& profile, const ImagingGeometry& geo);

/// Pre-image: N_cr x M complex matrix; occupied columns carry cross-range
/// phase histories, others the constant range-profile magnitude (or zero).
struct PreImage {
    int rows = 0;  // N_cr (slow time)
    int cols = 0;  // N_r
    std::vector<cdouble> values;  // row-major
    std::vector<int> occupied;    // range bins holding scatterers
    cdouble& at(int m, int r) { return values[static_cast<std::size_t>(m) * cols + r]; }
    const cdouble& at(int m, int r) const { return values[static_cast<std::size_t>(m) * cols + r]; }
};

PreImage build_pre_image(const DelaySet& delays, const DopplerMatrix& doppler,
                         const CorrelationProfile& profile0, const ImagingGeometry& geo,
                         bool background_zero_fill = false);

/// Magnitude image. Rows are cross-range bins after an fftshift: row q maps to
/// cross-range (q - N_cr/2) * Delta_cr, so row 0 is the most negative
/// cross-range before flipping. Columns are range bins.
struct IsarImage {
    int rows = 0, cols = 0;
    std::vector<double> magnitude;  // row-major
    bool flipped = false;
    double range_origin = 0.0, range_step = 0.0, crossrange_step = 0.0;
    double at(int q, int r) const { return magnitude[static_cast<std::size_t>(q) * cols + r]; }
    double crossrange_of_row(int q) const { return (q - rows / 2) * crossrange_step; }
    double range_of_col(int r) const { return range_origin + r * range_step; }
    // fftshifted row index of a Doppler-domain FFT bin.
    int row_of_fft_bin(int q) const { return ((q % rows) + rows + rows / 2) % rows; }
};

// Column-wise forward DFT of the pre-image, magnitudes, fftshifted rows.
IsarImage form_image(const PreImage& pre, const ImagingGeometry& geo);

// Reverse cross-range row order.
IsarImage flip_image(const IsarImage& img);

// PGM "P5", 16-bit big-endian, linear min-max to [0, 65535]; sidecar text with
// the axis metadata next to it (path + ".meta").
void write_pgm(const std::string& path, const IsarImage& img);
// CSV: cross_range_m,range_m,magnitude
void write_image_csv(const std::string& path, const IsarImage& img);
void write_range_profile_csv(const std::string& path, const std::vector<double>& profile,
                             const ImagingGeometry& geo);

}  // namespace isar
