#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isar/channel.hpp"

namespace isar {

/// Segment correlation R~[l] over the admissible lag range of one frame.
struct CorrelationProfile {
    int first_lag = 0;                 // lag of values[0]
    std::vector<cdouble> values;
    const cdouble& at_lag(int lag) const;
    bool has_lag(int lag) const {
        return lag >= first_lag && lag < first_lag + static_cast<int>(values.size());
    }
    int peak_lag() const;              // argmax |R~|
};

// R~[l] = sum_{kN=0}^{511} s512[kN] * conj(y[m, l + kN + 2048]).
CorrelationProfile correlate(const std::vector<cdouble>& frame_samples, int first_delay,
                             const GolayPreamble& preamble, int data_guard_samples = 1);

/// Sorted distinct sampled delays admitted around the correlation peak.
struct DelaySet {
    std::vector<int> delays;           // ascending
    int peak_delay = 0;
    int count() const { return static_cast<int>(delays.size()); }
    int first() const;
    bool contains(int d) const;
    int index_of(int d) const;         // -1 when absent
};

DelaySet extract_delays(const CorrelationProfile& profile, double sigma_nc, int search_span);

// LSE of the effective radar channel at one frame: columns are the TX symbol
// sequence shifted to each admitted delay; rows span the observed window.
// Returns h for frame 0, h_p * exp(j 2 pi nu_p (k_c + mK) Ts) for frame m.
std::vector<cdouble> lse_channel(const std::vector<cdouble>& frame_samples, int first_sample_k,
                                 const DelaySet& delays, const FrameSignal& signal,
                                 double symbol_energy, int preamble_samples,
                                 int data_guard_samples);

// Window-center sample index k_c^m = (2*ell_hat_0 + K_pre - ell_D) / 2.
double window_center(const DelaySet& delays, int preamble_samples, int data_guard_samples);

// D_m = 1 / (2 pi (k_c + m K) Ts), Hz per radian of principal phase.
double doppler_scale(double k_center, int m, int frame_samples, double symbol_period);

// nu_hat_p = angle(h_m[p]/h_0[p]) * D_m; principal value in (-pi, pi].
std::vector<double> doppler_raw(const std::vector<cdouble>& h0, const std::vector<cdouble>& hm,
                                double scale_dm, double zero_tol = 0.0);

// One-more-wrap preprocessing: if nu_b - nu_a > sigma_wrap, nu_a += 2 pi D_a;
// if < -sigma_wrap, nu_b += 2 pi D_b. sigma_wrap = pi (D_a + D_b) / 2.
void preprocess_wrap(std::vector<double>& nu_a, std::vector<double>& nu_b, double d_a, double d_b);

struct WrapResult {
    std::vector<double> nu_a;   // compensated nu at frame m_check - i
    std::vector<double> nu_b;   // compensated nu at frame m_check
    std::vector<int> wraps;     // |M_bar_p|
};

// Wrap-count compensation: M_bar = round((nu_b - nu_a)/(2 pi (D_a - D_b))),
// applied as nu += 2 pi M_bar D with the signed count.
WrapResult compensate_wrap(const std::vector<double>& nu_a, const std::vector<double>& nu_b,
                           double d_a, double d_b);

// Extrapolate to all frames: row m = nu_b + (m - m_check) * median(delta) where
// delta = (nu_b - nu_a)/i elementwise.
struct DopplerMatrix {
    int frame_count = 0;
    int scatterer_count = 0;
    std::vector<double> values;  // row-major M x N_p
    double delta_median = 0.0;
    double at(int m, int p) const { return values[static_cast<std::size_t>(m) * scatterer_count + p]; }
};

DopplerMatrix doppler_all_frames(const std::vector<double>& nu_a, const std::vector<double>& nu_b,
                                 int m_check, int gap, int frame_count);

// V_hat = sqrt(lambda R0 (nu0 - nu_last) / (2 CPI)) per scatterer, median over p.
double estimate_velocity(const std::vector<double>& nu_first, const std::vector<double>& nu_last,
                         double wavelength, double r0, double cpi);

// Pair two sorted delay sets by order-preserving alignment (max pairs, then
// minimal total drift). max_drift bounds the per-scatterer value change; use 0
// when the geometry cannot move a delay by half a bin over the CPI.
std::vector<std::pair<int, int>> match_delay_sets(const DelaySet& a, const DelaySet& b,
                                                  int max_drift = 1);

/// Text report: [delays], [h0], [doppler], [velocity] sections.
struct EstimationReport {
    DelaySet delays0;
    std::vector<cdouble> h0;
    std::vector<int> doppler_delays;    // delays the Doppler chain covered
    DopplerMatrix doppler;
    std::vector<int> wrap_counts;
    double velocity_mps = 0.0;
    int m_check = 0;
    int frame_gap = 0;
    std::string to_text() const;
};

}  // namespace isar
