#include "isar/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "isar/rng.hpp"

namespace isar {

std::vector<cdouble> steering(double phi, double theta, int nx, int ny) {
    const double px = kPi * std::cos(theta) * std::sin(phi);
    const double py = kPi * std::sin(theta);
    std::vector<cdouble> v;
    v.reserve(static_cast<std::size_t>(nx) * ny);
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            double ph = ix * px + iy * py;
            v.emplace_back(std::cos(ph), std::sin(ph));
        }
    }
    return v;
}

std::vector<std::vector<cdouble>> dft_codebook(int nx, int ny) {
    std::vector<std::vector<cdouble>> cb;
    cb.reserve(static_cast<std::size_t>(nx) * ny);
    const double norm = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
    for (int qx = 0; qx < nx; ++qx) {
        for (int qy = 0; qy < ny; ++qy) {
            std::vector<cdouble> f;
            f.reserve(static_cast<std::size_t>(nx) * ny);
            for (int ix = 0; ix < nx; ++ix) {
                for (int iy = 0; iy < ny; ++iy) {
                    double ph = 2.0 * kPi * (static_cast<double>(qx) * ix / nx +
                                             static_cast<double>(qy) * iy / ny);
                    f.emplace_back(norm * std::cos(ph), norm * std::sin(ph));
                }
            }
            cb.push_back(std::move(f));
        }
    }
    return cb;
}

namespace {

cdouble inner(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    // a^H b
    cdouble s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace

BeamPair align_beams(const SceneConfig& cfg, const std::vector<Scatterer>& /*scatterers*/,
                     uint64_t seed) {
    const int ntx = cfg.tx_count();
    const int nvrx = cfg.vrx_count();
    const double kc = db_to_linear(cfg.rician_k_db);

    // LOS toward the vehicle reference point; elevation sign flips at the RSU.
    const double az = std::atan2(-cfg.x0_m, cfg.y0_m);
    const double el = std::atan2(cfg.z0_m, std::hypot(cfg.x0_m, cfg.y0_m));
    auto a_tx = steering(az, el, cfg.tx_x, cfg.tx_y);
    auto a_v = steering(az, -el, cfg.vrx_x, cfg.vrx_y);

    Rng rng = Rng::substream(seed, /*tag=*/0xbea3);
    // H_com[0] = sqrt(Kc/(Kc+1)) H_LOS + sqrt(1/(Kc+1)) H_NLOS, rows vRX x cols TX.
    std::vector<cdouble> H(static_cast<std::size_t>(nvrx) * ntx, cdouble{0.0, 0.0});
    cdouble alpha0 = rng.complex_gaussian(1.0);
    const double wlos = std::sqrt(kc / (kc + 1.0));
    for (int r = 0; r < nvrx; ++r)
        for (int c = 0; c < ntx; ++c)
            H[static_cast<std::size_t>(r) * ntx + c] = wlos * alpha0 * a_v[r] * std::conj(a_tx[c]);
    const double wnlos = std::sqrt(1.0 / (kc + 1.0)) / std::sqrt(static_cast<double>(cfg.nlos_paths));
    for (int u = 0; u < cfg.nlos_paths; ++u) {
        cdouble au = rng.complex_gaussian(1.0);
        double pv = rng.uniform(-kPi / 2, kPi / 2);
        double tv = rng.uniform(-kPi / 4, kPi / 4);
        double pt = rng.uniform(-kPi / 2, kPi / 2);
        double tt = rng.uniform(-kPi / 4, kPi / 4);
        auto av_u = steering(pv, tv, cfg.vrx_x, cfg.vrx_y);
        auto at_u = steering(pt, tt, cfg.tx_x, cfg.tx_y);
        for (int r = 0; r < nvrx; ++r)
            for (int c = 0; c < ntx; ++c)
                H[static_cast<std::size_t>(r) * ntx + c] += wnlos * au * av_u[r] * std::conj(at_u[c]);
    }

    auto cb_tx = dft_codebook(cfg.tx_x, cfg.tx_y);
    auto cb_vrx = dft_codebook(cfg.vrx_x, cfg.vrx_y);
    double best = -1.0;
    std::size_t best_t = 0, best_r = 0;
    std::vector<cdouble> Hf(nvrx);
    for (std::size_t ti = 0; ti < cb_tx.size(); ++ti) {
        for (int r = 0; r < nvrx; ++r) {
            cdouble s{0.0, 0.0};
            for (int c = 0; c < ntx; ++c) s += H[static_cast<std::size_t>(r) * ntx + c] * cb_tx[ti][c];
            Hf[r] = s;
        }
        for (std::size_t ri = 0; ri < cb_vrx.size(); ++ri) {
            double val = std::norm(inner(cb_vrx[ri], Hf));
            if (val > best) {
                best = val;
                best_t = ti;
                best_r = ri;
            }
        }
    }
    BeamPair bp;
    bp.f_tx = cb_tx[best_t];
    bp.f_rx_vehicle = cb_vrx[best_r];
    bp.f_rx_radar.resize(bp.f_tx.size());
    for (std::size_t i = 0; i < bp.f_tx.size(); ++i) bp.f_rx_radar[i] = std::conj(bp.f_tx[i]);
    return bp;
}

NoiseClutter clutter_power(const SceneConfig& cfg) {
    const double es = cfg.symbol_energy();
    const double lambda = cfg.wavelength_m();
    const double r0 = cfg.reference_range_m();
    const double phi_b = 2.0 / cfg.tx_x;
    const double theta_b = 2.0 / cfg.tx_y;
    const double ga = kPi / (theta_b * phi_b);
    const double sigma0 = 0.15 * std::sin(std::atan(std::abs(cfg.z0_m) / cfg.y0_m));
    const double sigma_s = sigma0 * theta_b * r0 * kSpeedOfLight * cfg.symbol_period_s() / 2.0;
    const double fourpi3 = 64.0 * kPi * kPi * kPi;
    NoiseClutter nc;
    nc.clutter_w = es * ga * ga * lambda * lambda * sigma_s /
                   (fourpi3 * r0 * r0 * r0 * r0 * std::cos(std::atan(cfg.z0_m / cfg.y0_m)));
    nc.sigma_nc2 = cfg.noise_density_w_per_hz() * cfg.bandwidth_hz + nc.clutter_w;
    return nc;
}

BackscatterSet draw_backscatter(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                                const BeamPair& beams, uint64_t seed) {
    FrameTruth t0 = frame_truth(cfg, scatterers, 0);
    Rng rng = Rng::substream(seed, /*tag=*/0xbac5);
    BackscatterSet bs;
    bs.h.reserve(scatterers.size());
    for (std::size_t p = 0; p < scatterers.size(); ++p) {
        cdouble beta = rng.complex_gaussian(1.0);
        auto a_rx = steering(t0.azimuth[p], t0.elevation[p], cfg.tx_x, cfg.tx_y);
        auto a_tx = a_rx;  // N_TX == N_RX, co-located arrays
        // f_rx_radar^H a_rx^*  and  a_tx^H f_tx
        cdouble g_rx{0.0, 0.0}, g_tx{0.0, 0.0};
        for (std::size_t i = 0; i < a_rx.size(); ++i) {
            g_rx += std::conj(beams.f_rx_radar[i]) * std::conj(a_rx[i]);
            g_tx += std::conj(a_tx[i]) * beams.f_tx[i];
        }
        bs.h.push_back(std::sqrt(t0.gain[p]) * beta * g_rx * g_tx);
    }
    return bs;
}

EchoFrameSet synthesize_echoes(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                               const BackscatterSet& backscatter, uint64_t noise_seed,
                               bool with_noise) {
    if (backscatter.h.size() != scatterers.size())
        throw DimensionMismatch("backscatter count != scatterer count");
    const int m_count = cfg.frame_count();
    const int kpre = cfg.preamble_samples;
    const int ld = cfg.data_guard_samples;
    const int nsamp = kpre - ld + 1;
    const double ts = cfg.symbol_period_s();
    const double amp = std::sqrt(cfg.symbol_energy());
    const double sigma_nc2 = clutter_power(cfg).sigma_nc2;
    FrameSignal signal = build_frame(cfg.seed, cfg.frame_samples);

    EchoFrameSet out;
    out.frame_count = m_count;
    out.samples_per_frame = nsamp;
    out.sigma_nc2 = sigma_nc2;
    out.symbol_energy = cfg.symbol_energy();
    out.seed = noise_seed;
    out.first_delay.resize(m_count);
    out.y.resize(m_count);
    out.truth.reserve(m_count);
    for (int m = 0; m < m_count; ++m) out.truth.push_back(frame_truth(cfg, scatterers, m));

    for (int m = 0; m < m_count; ++m) {
        const FrameTruth& ft = out.truth[m];
        const int l0 = ft.sampled_delay.empty() ? 1 : ft.first_delay();
        out.first_delay[m] = l0;
        auto& ym = out.y[m];
        ym.assign(nsamp, cdouble{0.0, 0.0});
        for (std::size_t p = 0; p < scatterers.size(); ++p) {
            const int lp = ft.sampled_delay[p];
            const double nu = ft.doppler_hz[p];
            const cdouble hp = amp * backscatter.h[p];
            // phase advance per sample: 2*pi*nu*Ts
            const double dph = 2.0 * kPi * nu * ts;
            const double ph0 = 2.0 * kPi * nu * (static_cast<double>(l0) +
                                                 static_cast<double>(m) * cfg.frame_samples) * ts;
            cdouble rot{std::cos(ph0), std::sin(ph0)};
            const cdouble step{std::cos(dph), std::sin(dph)};
            for (int j = 0; j < nsamp; ++j) {
                long n = static_cast<long>(l0) + j - lp;
                if (n >= 0 && n < cfg.frame_samples) ym[j] += hp * rot * signal.symbols[n];
                rot *= step;
            }
        }
        if (with_noise) {
            Rng rng = Rng::substream(noise_seed, /*tag=*/0x201de, static_cast<uint64_t>(m));
            for (int j = 0; j < nsamp; ++j) ym[j] += rng.complex_gaussian(sigma_nc2);
        }
    }
    return out;
}

EchoFrameSet synthesize_echoes(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                               const BeamPair& beams, uint64_t seed, bool with_noise) {
    BackscatterSet bs = draw_backscatter(cfg, scatterers, beams, seed);
    return synthesize_echoes(cfg, scatterers, bs, seed, with_noise);
}

void write_echo_dump(const std::string& path, const EchoFrameSet& echoes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Io("cannot write echo dump: " + path);
    char header[64];
    std::memset(header, ' ', sizeof(header));
    int n = std::snprintf(header, sizeof(header), "ISARECHO1 M=%d S=%d SEED=%llu",
                          echoes.frame_count, echoes.samples_per_frame,
                          static_cast<unsigned long long>(echoes.seed));
    if (n > 0 && n < static_cast<int>(sizeof(header))) header[n] = ' ';
    header[63] = '\n';
    out.write(header, sizeof(header));
    for (int m = 0; m < echoes.frame_count; ++m) {
        for (const cdouble& z : echoes.y[m]) {
            double re = z.real(), im = z.imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
    if (!out) throw Io("short write on echo dump: " + path);
}

EchoFrameSet read_echo_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Io("cannot open echo dump: " + path);
    char header[64];
    in.read(header, sizeof(header));
    if (!in) throw Io("echo dump truncated header: " + path);
    int m = 0, s = 0;
    unsigned long long seed = 0;
    if (std::sscanf(header, "ISARECHO1 M=%d S=%d SEED=%llu", &m, &s, &seed) != 3)
        throw Io("bad echo dump header: " + path);
    EchoFrameSet out;
    out.frame_count = m;
    out.samples_per_frame = s;
    out.seed = seed;
    out.y.assign(m, std::vector<cdouble>(s));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < s; ++j) {
            double re, im;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            out.y[i][j] = {re, im};
        }
    }
    if (!in) throw Io("echo dump truncated payload: " + path);
    return out;
}

}  // namespace isar
