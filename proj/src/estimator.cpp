#include "isar/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace isar {

const cdouble& CorrelationProfile::at_lag(int lag) const {
    if (!has_lag(lag)) throw DimensionMismatch("lag outside correlation profile");
    return values[static_cast<std::size_t>(lag - first_lag)];
}

int CorrelationProfile::peak_lag() const {
    if (values.empty()) throw WindowTooShort("empty correlation profile");
    std::size_t best = 0;
    double mag = -1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double m = std::abs(values[i]);
        if (m > mag) {
            mag = m;
            best = i;
        }
    }
    return first_lag + static_cast<int>(best);
}

CorrelationProfile correlate(const std::vector<cdouble>& frame_samples, int first_delay,
                             const GolayPreamble& preamble, int data_guard_samples) {
    const int nsamp = static_cast<int>(frame_samples.size());
    const int kpre = static_cast<int>(preamble.samples.size());
    const int off = preamble.segment_offset;
    // y[m,k] observed for k in [l0, l0 + nsamp); need l + kN + off within that
    // window for kN in [0, 512).
    const int lag_lo = first_delay - off;
    const int lag_hi = first_delay + nsamp - kSegmentLen - off;  // inclusive
    (void)kpre;
    (void)data_guard_samples;
    if (lag_hi < lag_lo) throw WindowTooShort("frame too short for segment correlation");
    CorrelationProfile prof;
    prof.first_lag = lag_lo;
    prof.values.resize(static_cast<std::size_t>(lag_hi - lag_lo + 1));
    for (int lag = lag_lo; lag <= lag_hi; ++lag) {
        const int base = lag + off - first_delay;
        cdouble acc{0.0, 0.0};
        for (int k = 0; k < kSegmentLen; ++k) {
            acc += static_cast<double>(preamble.segment[k]) * std::conj(frame_samples[base + k]);
        }
        prof.values[static_cast<std::size_t>(lag - lag_lo)] = acc;
    }
    return prof;
}

int DelaySet::first() const {
    if (delays.empty()) throw NoTarget("empty delay set");
    return delays.front();
}

bool DelaySet::contains(int d) const {
    return std::binary_search(delays.begin(), delays.end(), d);
}

int DelaySet::index_of(int d) const {
    auto it = std::lower_bound(delays.begin(), delays.end(), d);
    if (it == delays.end() || *it != d) return -1;
    return static_cast<int>(it - delays.begin());
}

DelaySet extract_delays(const CorrelationProfile& profile, double sigma_nc, int search_span) {
    if (profile.values.empty()) throw WindowTooShort("empty correlation profile");
    const double threshold = 512.0 * sigma_nc;
    const int peak = profile.peak_lag();
    if (std::abs(profile.at_lag(peak)) <= threshold)
        throw NoTarget("correlation peak below threshold");
    DelaySet set;
    set.peak_delay = peak;
    set.delays.push_back(peak);
    for (int d = 1; d <= search_span; ++d) {
        for (int lag : {peak - d, peak + d}) {
            if (profile.has_lag(lag) && std::abs(profile.at_lag(lag)) > threshold)
                set.delays.push_back(lag);
        }
    }
    std::sort(set.delays.begin(), set.delays.end());
    set.delays.erase(std::unique(set.delays.begin(), set.delays.end()), set.delays.end());
    return set;
}

std::vector<cdouble> lse_channel(const std::vector<cdouble>& frame_samples, int first_sample_k,
                                 const DelaySet& delays, const FrameSignal& signal,
                                 double symbol_energy, int preamble_samples,
                                 int data_guard_samples) {
    const int np = delays.count();
    if (np < 1) throw NoTarget("LSE needs at least one delay");
    const int l0 = delays.first();
    // Nominal rows k in [l0, K_pre - ell_D + l0], clamped to observed samples.
    const int k_lo = std::max(l0, first_sample_k);
    const int k_hi = std::min(preamble_samples - data_guard_samples + l0,
                              first_sample_k + static_cast<int>(frame_samples.size()) - 1);
    const int rows = k_hi - k_lo + 1;
    if (rows < np) throw WindowTooShort("fewer observed samples than delays");

    Eigen::MatrixXd S(rows, np);
    S.setZero();
    for (int j = 0; j < np; ++j) {
        const int dj = delays.delays[j];
        for (int r = 0; r < rows; ++r) {
            const long n = static_cast<long>(k_lo) + r - dj;
            if (n >= 0 && n < preamble_samples)
                S(r, j) = signal.symbols[static_cast<std::size_t>(n)].real();
        }
    }
    Eigen::VectorXd yr(rows), yi(rows);
    for (int r = 0; r < rows; ++r) {
        const cdouble& z = frame_samples[static_cast<std::size_t>(k_lo - first_sample_k + r)];
        yr(r) = z.real();
        yi(r) = z.imag();
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
    // reciprocal condition estimate from the R diagonal
    const auto& R = qr.matrixR();
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < np; ++j) {
        double d = std::abs(R(j, j));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (!(dmin > 0.0) || dmin / dmax < 1e-10)
        throw SingularGram("delay matrix numerically singular (rcond < 1e-10)");

    Eigen::VectorXd hr = qr.solve(yr);
    Eigen::VectorXd hi = qr.solve(yi);
    std::vector<cdouble> h(static_cast<std::size_t>(np));
    const double scale = 1.0 / std::sqrt(symbol_energy);
    for (int j = 0; j < np; ++j) h[static_cast<std::size_t>(j)] = scale * cdouble{hr(j), hi(j)};
    return h;
}

double window_center(const DelaySet& delays, int preamble_samples, int data_guard_samples) {
    return (2.0 * delays.first() + preamble_samples - data_guard_samples) / 2.0;
}

double doppler_scale(double k_center, int m, int frame_samples, double symbol_period) {
    return 1.0 / (2.0 * kPi * (k_center + static_cast<double>(m) * frame_samples) * symbol_period);
}

std::vector<double> doppler_raw(const std::vector<cdouble>& h0, const std::vector<cdouble>& hm,
                                double scale_dm, double zero_tol) {
    if (h0.size() != hm.size()) throw DimensionMismatch("h vectors differ in length");
    std::vector<double> nu(h0.size());
    for (std::size_t p = 0; p < h0.size(); ++p) {
        if (std::abs(h0[p]) <= zero_tol)
            throw ZeroReference("reference channel magnitude below tolerance");
        nu[p] = principal_angle(hm[p] / h0[p]) * scale_dm;
    }
    return nu;
}

void preprocess_wrap(std::vector<double>& nu_a, std::vector<double>& nu_b, double d_a, double d_b) {
    if (nu_a.size() != nu_b.size()) throw DimensionMismatch("doppler vectors differ in length");
    const double sigma_wrap = kPi * (d_a + d_b) / 2.0;
    for (std::size_t p = 0; p < nu_a.size(); ++p) {
        const double diff = nu_b[p] - nu_a[p];
        if (diff > sigma_wrap) nu_a[p] += 2.0 * kPi * d_a;
        else if (diff < -sigma_wrap) nu_b[p] += 2.0 * kPi * d_b;
    }
}

WrapResult compensate_wrap(const std::vector<double>& nu_a, const std::vector<double>& nu_b,
                           double d_a, double d_b) {
    if (nu_a.size() != nu_b.size()) throw DimensionMismatch("doppler vectors differ in length");
    WrapResult out;
    out.nu_a = nu_a;
    out.nu_b = nu_b;
    out.wraps.resize(nu_a.size());
    const double denom = 2.0 * kPi * (d_a - d_b);
    for (std::size_t p = 0; p < nu_a.size(); ++p) {
        const long mbar = std::lround((nu_b[p] - nu_a[p]) / denom);
        out.nu_a[p] += 2.0 * kPi * mbar * d_a;
        out.nu_b[p] += 2.0 * kPi * mbar * d_b;
        out.wraps[p] = static_cast<int>(std::labs(mbar));
    }
    return out;
}

DopplerMatrix doppler_all_frames(const std::vector<double>& nu_a, const std::vector<double>& nu_b,
                                 int m_check, int gap, int frame_count) {
    if (gap < 1 || m_check < gap || m_check >= frame_count)
        throw DimensionMismatch("need 0 < i <= m_check < M");
    if (nu_a.size() != nu_b.size() || nu_a.empty())
        throw DimensionMismatch("doppler vectors empty or mismatched");
    const int np = static_cast<int>(nu_a.size());
    std::vector<double> delta(np);
    for (int p = 0; p < np; ++p) delta[p] = (nu_b[p] - nu_a[p]) / gap;
    DopplerMatrix mat;
    mat.frame_count = frame_count;
    mat.scatterer_count = np;
    mat.delta_median = median(delta);
    mat.values.resize(static_cast<std::size_t>(frame_count) * np);
    for (int m = 0; m < frame_count; ++m) {
        const double shift = (m - m_check) * mat.delta_median;
        for (int p = 0; p < np; ++p)
            mat.values[static_cast<std::size_t>(m) * np + p] = nu_b[p] + shift;
    }
    return mat;
}

double estimate_velocity(const std::vector<double>& nu_first, const std::vector<double>& nu_last,
                         double wavelength, double r0, double cpi) {
    if (nu_first.size() != nu_last.size() || nu_first.empty())
        throw DimensionMismatch("doppler vectors empty or mismatched");
    std::vector<double> v;
    v.reserve(nu_first.size());
    for (std::size_t p = 0; p < nu_first.size(); ++p) {
        const double radicand = wavelength * r0 * (nu_first[p] - nu_last[p]) / (2.0 * cpi);
        if (radicand <= 0.0)
            throw NegativeRadicand("doppler decrease non-positive for scatterer " + std::to_string(p));
        v.push_back(std::sqrt(radicand));
    }
    return median(v);
}

std::vector<std::pair<int, int>> match_delay_sets(const DelaySet& a, const DelaySet& b,
                                                  int max_drift) {
    // Order-preserving alignment of two sorted delay sets: maximize matched
    // pairs, then minimize the total |drift|. Plain greedy/exact-first
    // matching mispairs coherent drift chains (e.g. {254,255} vs {253,254}).
    const int n = a.count();
    const int m = b.count();
    const int kDrift = max_drift;
    // dp over (i, j): best (pairs, -cost) aligning a[i:] with b[j:]
    std::vector<std::pair<int, int>> dp(static_cast<std::size_t>((n + 1) * (m + 1)), {0, 0});
    std::vector<int8_t> move(static_cast<std::size_t>((n + 1) * (m + 1)), 0);
    auto idx = [m](int i, int j) { return static_cast<std::size_t>(i * (m + 1) + j); };
    for (int i = n - 1; i >= 0; --i) {
        for (int j = m - 1; j >= 0; --j) {
            std::pair<int, int> best = dp[idx(i + 1, j)];
            int8_t mv = 1;  // skip a[i]
            if (dp[idx(i, j + 1)] > best) {
                best = dp[idx(i, j + 1)];
                mv = 2;  // skip b[j]
            }
            const int d = std::abs(a.delays[i] - b.delays[j]);
            if (d <= kDrift) {
                std::pair<int, int> take{dp[idx(i + 1, j + 1)].first + 1,
                                         dp[idx(i + 1, j + 1)].second - d};
                if (take > best) {
                    best = take;
                    mv = 3;  // pair (i, j)
                }
            }
            dp[idx(i, j)] = best;
            move[idx(i, j)] = mv;
        }
    }
    std::vector<std::pair<int, int>> pairs;
    int i = 0, j = 0;
    while (i < n && j < m) {
        switch (move[idx(i, j)]) {
            case 1: ++i; break;
            case 2: ++j; break;
            default:
                pairs.emplace_back(i, j);
                ++i;
                ++j;
        }
    }
    return pairs;
}

std::string EstimationReport::to_text() const {
    std::ostringstream o;
    o.precision(12);
    o << "[delays]\n";
    o << "count = " << delays0.count() << "\npeak = " << delays0.peak_delay << "\n";
    o << "values =";
    for (int d : delays0.delays) o << " " << d;
    o << "\n[h0]\n";
    for (std::size_t p = 0; p < h0.size(); ++p)
        o << delays0.delays[p] << " " << h0[p].real() << " " << h0[p].imag() << "\n";
    o << "[doppler]\n";
    o << "m_check = " << m_check << "\nframe_gap = " << frame_gap << "\n";
    o << "delta_median_hz_per_frame = " << doppler.delta_median << "\n";
    o << "delays =";
    for (int d : doppler_delays) o << " " << d;
    o << "\nwraps =";
    for (int w : wrap_counts) o << " " << w;
    o << "\nnu_m_check_hz =";
    for (int p = 0; p < doppler.scatterer_count; ++p) o << " " << doppler.at(m_check, p);
    o << "\nnu_first_hz =";
    for (int p = 0; p < doppler.scatterer_count; ++p) o << " " << doppler.at(0, p);
    o << "\nnu_last_hz =";
    for (int p = 0; p < doppler.scatterer_count; ++p)
        o << " " << doppler.at(doppler.frame_count - 1, p);
    o << "\n[velocity]\n";
    o << "vx_mps = " << velocity_mps << "\n";
    return o.str();
}

}  // namespace isar
