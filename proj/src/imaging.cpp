#include "isar/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace isar {

int ImagingGeometry::range_bin_of_delay(int delay) const {
    // (C*): -Dr < r*Dr - c*l*Ts/2 + R0 - X/2 < 0
    const double w = kSpeedOfLight * delay * symbol_period / 2.0 - range_origin;
    const int r = static_cast<int>(std::ceil(w / range_res)) - 1;
    if (r < 0 || r >= range_bins) return -1;
    return r;
}

int ImagingGeometry::delay_of_range_bin(int r) const {
    return static_cast<int>(
        std::ceil(2.0 / (kSpeedOfLight * symbol_period) * (r * range_res + range_origin)));
}

double ImagingGeometry::crossrange_bins_per_hz() const {
    return kSpeedOfLight / (2.0 * carrier_hz * omega * crossrange_res);
}

ImagingGeometry geometry(const SceneConfig& cfg, double velocity_estimate) {
    if (!(velocity_estimate > 0.0)) throw ZeroVelocity("velocity estimate must be positive");
    ImagingGeometry g;
    g.r0 = cfg.reference_range_m();
    const double v_perp = velocity_estimate * std::cos(std::atan(cfg.x0_m / cfg.y0_m));
    g.omega = v_perp / g.r0;
    g.range_res = kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
    const double lambda = cfg.wavelength_m();
    const int m = cfg.frame_count();
    g.doppler_bw = 2.0 * g.omega * cfg.plane_y_m * cfg.carrier_hz / kSpeedOfLight;
    g.crossrange_res = lambda * g.doppler_bw / (2.0 * m * g.omega);
    g.doppler_res = g.doppler_bw / m;
    g.velocity_res = lambda * g.doppler_res / 2.0;
    g.range_bins = static_cast<int>(cfg.plane_x_m / g.range_res);
    // floor with a guard: Delta_cr * M == Y_size algebraically, so the ratio
    // sits within one ulp of the integer M.
    g.crossrange_bins = static_cast<int>(std::floor(cfg.plane_y_m / g.crossrange_res + 1e-6));
    g.range_origin = g.r0 - cfg.plane_x_m / 2.0;
    g.plane_x = cfg.plane_x_m;
    g.plane_y = cfg.plane_y_m;
    g.carrier_hz = cfg.carrier_hz;
    g.symbol_period = cfg.symbol_period_s();
    return g;
}

std::vector<double> range_profile(const CorrelationProfile& profile, const ImagingGeometry& geo) {
    std::vector<double> out(static_cast<std::size_t>(geo.range_bins), 0.0);
    for (int r = 0; r < geo.range_bins; ++r) {
        const int lag = geo.delay_of_range_bin(r);
        if (profile.has_lag(lag)) out[static_cast<std::size_t>(r)] = std::abs(profile.at_lag(lag));
    }
    return out;
}

PreImage build_pre_image(const DelaySet& delays, const DopplerMatrix& doppler,
                         const CorrelationProfile& profile0, const ImagingGeometry& geo,
                         bool background_zero_fill) {
    if (doppler.frame_count != geo.crossrange_bins)
        throw DimensionMismatch("doppler matrix rows != N_cr");
    if (doppler.scatterer_count != delays.count())
        throw DimensionMismatch("doppler matrix columns != delay count");
    PreImage pre;
    pre.rows = geo.crossrange_bins;
    pre.cols = geo.range_bins;
    pre.values.assign(static_cast<std::size_t>(pre.rows) * pre.cols, cdouble{0.0, 0.0});

    if (!background_zero_fill) {
        const std::vector<double> prof = range_profile(profile0, geo);
        for (int m = 0; m < pre.rows; ++m)
            for (int r = 0; r < pre.cols; ++r) pre.at(m, r) = prof[static_cast<std::size_t>(r)];
    }

    const double bins_per_hz = geo.crossrange_bins_per_hz();
    std::vector<bool> cleared(static_cast<std::size_t>(pre.cols), false);
    for (int p = 0; p < delays.count(); ++p) {
        const int rbin = geo.range_bin_of_delay(delays.delays[p]);
        if (rbin < 0) continue;
        if (!cleared[static_cast<std::size_t>(rbin)]) {
            for (int m = 0; m < pre.rows; ++m) pre.at(m, rbin) = cdouble{0.0, 0.0};
            cleared[static_cast<std::size_t>(rbin)] = true;
            pre.occupied.push_back(rbin);
        }
        const double mag = std::abs(profile0.at_lag(delays.delays[p]));
        for (int m = 0; m < pre.rows; ++m) {
            const double ph = 2.0 * kPi / pre.rows * m * doppler.at(m, p) * bins_per_hz;
            pre.at(m, rbin) += mag * cdouble{std::cos(ph), std::sin(ph)};
        }
    }
    std::sort(pre.occupied.begin(), pre.occupied.end());
    return pre;
}

IsarImage form_image(const PreImage& pre, const ImagingGeometry& geo) {
    IsarImage img;
    img.rows = pre.rows;
    img.cols = pre.cols;
    img.magnitude.assign(static_cast<std::size_t>(img.rows) * img.cols, 0.0);
    img.range_origin = geo.range_origin;
    img.range_step = geo.range_res;
    img.crossrange_step = geo.crossrange_res;

    const int n = pre.rows;
    // forward DFT twiddles e^{-j 2 pi k / n}
    std::vector<cdouble> tw(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double ph = -2.0 * kPi * k / n;
        tw[static_cast<std::size_t>(k)] = {std::cos(ph), std::sin(ph)};
    }
    std::vector<cdouble> col(static_cast<std::size_t>(n));
    for (int r = 0; r < pre.cols; ++r) {
        for (int m = 0; m < n; ++m) col[static_cast<std::size_t>(m)] = pre.at(m, r);
        for (int q = 0; q < n; ++q) {
            cdouble acc{0.0, 0.0};
            std::size_t idx = 0;
            for (int m = 0; m < n; ++m) {
                acc += col[static_cast<std::size_t>(m)] * tw[idx];
                idx += static_cast<std::size_t>(q);
                if (idx >= static_cast<std::size_t>(n)) idx -= static_cast<std::size_t>(n);
            }
            const int row = img.row_of_fft_bin(q);
            img.magnitude[static_cast<std::size_t>(row) * img.cols + r] = std::abs(acc);
        }
    }
    return img;
}

IsarImage flip_image(const IsarImage& img) {
    IsarImage out = img;
    for (int q = 0; q < img.rows; ++q) {
        const int src = img.rows - 1 - q;
        for (int r = 0; r < img.cols; ++r)
            out.magnitude[static_cast<std::size_t>(q) * img.cols + r] = img.at(src, r);
    }
    out.flipped = !img.flipped;
    return out;
}

void write_pgm(const std::string& path, const IsarImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Io("cannot write image: " + path);
    double lo = img.magnitude.empty() ? 0.0 : img.magnitude[0];
    double hi = lo;
    for (double v : img.magnitude) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    out << "P5\n" << img.cols << " " << img.rows << "\n65535\n";
    for (int q = 0; q < img.rows; ++q) {
        for (int r = 0; r < img.cols; ++r) {
            const double v = (img.at(q, r) - lo) / span;
            const auto u = static_cast<uint16_t>(std::lround(v * 65535.0));
            const unsigned char bytes[2] = {static_cast<unsigned char>(u >> 8),
                                            static_cast<unsigned char>(u & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    }
    if (!out) throw Io("short write: " + path);
    std::ofstream meta(path + ".meta");
    if (!meta) throw Io("cannot write image metadata: " + path + ".meta");
    meta.precision(12);
    meta << "rows_crossrange = " << img.rows << "\ncols_range = " << img.cols << "\n"
         << "range_origin_m = " << img.range_origin << "\nrange_step_m = " << img.range_step << "\n"
         << "crossrange_step_m = " << img.crossrange_step << "\n"
         << "crossrange_row0_m = " << img.crossrange_of_row(0) << "\n"
         << "flipped = " << (img.flipped ? 1 : 0) << "\n"
         << "normalization = " << lo << " " << hi << "\n";
}

void write_image_csv(const std::string& path, const IsarImage& img) {
    std::ofstream out(path);
    if (!out) throw Io("cannot write image csv: " + path);
    out << "cross_range_m,range_m,magnitude\n";
    out.precision(9);
    for (int q = 0; q < img.rows; ++q)
        for (int r = 0; r < img.cols; ++r)
            out << img.crossrange_of_row(q) << "," << img.range_of_col(r) << "," << img.at(q, r)
                << "\n";
}

void write_range_profile_csv(const std::string& path, const std::vector<double>& profile,
                             const ImagingGeometry& geo) {
    std::ofstream out(path);
    if (!out) throw Io("cannot write range profile csv: " + path);
    out << "range_m,magnitude\n";
    out.precision(9);
    for (std::size_t r = 0; r < profile.size(); ++r)
        out << geo.range_origin + static_cast<double>(r) * geo.range_res << "," << profile[r] << "\n";
}

}  // namespace isar
