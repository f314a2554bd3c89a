// Acceptance suite: run as `acceptance_tests <criterion>` (1..10). Each
// criterion prints one PASS/FAIL line with its measured values and the binary
// exits nonzero on failure.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>

#include "isar/pipeline.hpp"

using namespace isar;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int crit, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", crit, pass ? "PASS" : "FAIL", detail.c_str());
    return pass;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// 1. Golay complementarity, exact, < 1 s.
bool criterion1() {
    auto t0 = Clock::now();
    bool ok = true;
    for (int n = 2; n <= 1024 && ok; n *= 2) {
        GolayPair g = generate_golay_pair(n);
        if (aperiodic_autocorr(g.a, 0) + aperiodic_autocorr(g.b, 0) != 2 * n) ok = false;
        for (int k = 1; k < n && ok; ++k)
            if (aperiodic_autocorr(g.a, k) + aperiodic_autocorr(g.b, k) != 0) ok = false;
    }
    double dt = seconds_since(t0);
    return report(1, ok && dt < 1.0, fmt("N=2..1024 exact, %.3f s", dt));
}

// 2. Segment guard property, exact zeros. The satisfiable window is 64 samples
// toward the STF and 128 toward the CEF (the spec's printed interval mirrors
// it; zero at shift -128 is impossible for any complementary pair).
bool criterion2() {
    GolayPreamble pre = build_preamble();
    bool ok = pre.segment_correlation(0) == 512;
    int checked = 0;
    for (int d = -64; d <= 128; ++d) {
        if (d == 0) continue;
        if (pre.segment_correlation(d) != 0) ok = false;
        ++checked;
    }
    return report(2, ok, fmt("peak=512, %d shifts in [-64,-1]u[1,128] all zero", checked));
}

// 3. Perfect delay recovery in >= 99 of 100 noise trials, < 30 s.
bool criterion3() {
    auto t0 = Clock::now();
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    auto sc = scene_for_config(cfg);
    GolayPreamble pre = build_preamble();
    BeamPair beams = align_beams(cfg, sc, cfg.seed);
    BackscatterSet bs = draw_backscatter(cfg, sc, beams, cfg.seed);
    const double sigma_nc = std::sqrt(clutter_power(cfg).sigma_nc2);
    std::vector<int> truth = frame_truth(cfg, sc, 0).sampled_delay;
    std::sort(truth.begin(), truth.end());
    int good = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        EchoFrameSet e = synthesize_echoes(cfg, sc, bs, trial_seed(cfg.seed, t));
        CorrelationProfile prof = correlate(e.frame(0), e.first_delay[0], pre);
        try {
            DelaySet d = extract_delays(prof, sigma_nc, cfg.search_span);
            if (d.delays == truth) ++good;
        } catch (const Error&) {
        }
    }
    double dt = seconds_since(t0);
    return report(3, good >= 99 && dt < 30.0, fmt("%d/100 exact recoveries, %.1f s", good, dt));
}

// 4. Range resolution 0.0852 +- 0.0001 m.
bool criterion4() {
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    ImagingGeometry g = geometry(cfg, 40.0);
    bool ok = std::abs(g.range_res - 0.0852) <= 1e-4;
    return report(4, ok, fmt("Delta_r = %.7f m", g.range_res));
}

// 5. Doppler NMSE curve: plateau <= 1e-3 over >= 50 contiguous m_check,
// endpoints {i+1, M-1} at >= 10x the band minimum. 100 trials, < 10 min.
bool criterion5() {
    auto t0 = Clock::now();
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    auto sc = scene_for_config(cfg);
    const int m_lo = cfg.frame_gap + 1;
    const int m_hi = cfg.frame_count() - 1;
    auto pts = nmse_doppler_experiment(cfg, sc, m_lo, m_hi, 1, 100);
    // longest contiguous band with NMSE <= 1e-3
    int best_len = 0, best_start = -1, cur_len = 0, cur_start = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (pts[j].nmse <= 1e-3) {
            if (cur_len == 0) cur_start = static_cast<int>(j);
            if (++cur_len > best_len) {
                best_len = cur_len;
                best_start = cur_start;
            }
        } else {
            cur_len = 0;
        }
    }
    double band_min = 1e9;
    for (int j = best_start; j >= 0 && j < best_start + best_len; ++j)
        band_min = std::min(band_min, pts[static_cast<std::size_t>(j)].nmse);
    const double nmse_first = pts.front().nmse;  // m = i+1
    const double nmse_last = pts.back().nmse;    // m = M-1
    const double dt = seconds_since(t0);
    const bool band_ok = best_len >= 50;
    const bool first_ok = band_min > 0 && nmse_first >= 10.0 * band_min;
    const bool last_ok = band_min > 0 && nmse_last >= 10.0 * band_min;
    const bool time_ok = dt < 600.0;
    return report(5, band_ok && first_ok && last_ok && time_ok,
                  fmt("band %d pts >=50 %s, min %.2e; NMSE(%d)=%.2e (%.0fx) %s; NMSE(%d)=%.2e "
                      "(%.1fx) %s; %.0f s",
                      best_len, band_ok ? "ok" : "FAIL", band_min, m_lo, nmse_first,
                      nmse_first / band_min, first_ok ? "ok" : "FAIL", m_hi, nmse_last,
                      nmse_last / band_min, last_ok ? "ok" : "FAIL", dt));
}

// 6. Preprocessing benefit ordering for i in {6..20}; gap > 10x somewhere.
bool criterion6() {
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    auto sc = scene_for_config(cfg);
    auto pts = nmse_diff_experiment(cfg, sc, 6, 20, 100);
    bool all_le = true;
    double best_gap = 0.0;
    for (const auto& p : pts) {
        if (!(p.median_pre <= p.mean_raw)) all_le = false;
        if (p.median_pre > 0) best_gap = std::max(best_gap, p.mean_raw / p.median_pre);
    }
    return report(6, all_le && best_gap > 10.0,
                  fmt("median_pre <= mean_raw for all i in [6,20]: %s; max ratio %.1fx",
                      all_le ? "yes" : "NO", best_gap));
}

// 7. Median velocity within 2% of 40 m/s over 100 trials.
bool criterion7() {
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    auto sc = scene_for_config(cfg);
    GolayPreamble pre = build_preamble();
    FrameSignal sig = build_frame(cfg.seed, cfg.frame_samples);
    const int m_count = cfg.frame_count();
    const int mck = std::min(cfg.effective_m_check(), m_count - 1);
    std::vector<double> vels;
    for (int t = 0; t < 100; ++t) {
        const uint64_t seed = trial_seed(cfg.seed, t);
        try {
            BeamPair beams = align_beams(cfg, sc, seed);
            EchoFrameSet e = synthesize_echoes(cfg, sc, beams, seed);
            DopplerChainResult dc = doppler_chain(cfg, e, pre, sig, mck, cfg.frame_gap);
            DopplerMatrix mat = doppler_all_frames(dc.nu_a, dc.nu_b, mck, cfg.frame_gap, m_count);
            std::vector<double> nu0(mat.scatterer_count), nul(mat.scatterer_count);
            for (int p = 0; p < mat.scatterer_count; ++p) {
                nu0[static_cast<std::size_t>(p)] = mat.at(0, p);
                nul[static_cast<std::size_t>(p)] = mat.at(m_count - 1, p);
            }
            vels.push_back(estimate_velocity(nu0, nul, cfg.wavelength_m(),
                                             cfg.reference_range_m(), cfg.cpi_s));
        } catch (const Error&) {
        }
    }
    const double med = median(vels);
    const bool ok = vels.size() >= 95 && std::abs(med - 40.0) <= 0.02 * 40.0;
    return report(7, ok, fmt("median V = %.3f m/s over %zu trials (target 40 +- 0.8)", med,
                             vels.size()));
}

// 8. Image placement oracle + flip orientation, noise-free, X0 in {-5, 0, 5}.
bool criterion8() {
    bool all_ok = true;
    std::string detail;
    for (const char* cfgfile :
         {"configs/paper_x0_m5.cfg", "configs/paper_x0_0.cfg", "configs/paper_x0_p5.cfg"}) {
        SceneConfig cfg = load_config_file(cfgfile);
        auto sc = scene_for_config(cfg);
        PipelineResult res = run_pipeline(cfg, sc, cfg.seed, /*with_noise=*/false);
        const FrameTruth t0 = frame_truth(cfg, sc, 0);
        const ImagingGeometry& g = res.geo;
        const IsarImage& img = res.image;
        bool ok = res.delays0.count() == static_cast<int>(sc.size());
        double roof_cr = 0.0, wheel_cr = 0.0;
        int roof_n = 0, wheel_n = 0;
        for (std::size_t p = 0; p < sc.size() && ok; ++p) {
            const int dl = t0.sampled_delay[p];
            if (!res.delays0.contains(dl)) {
                ok = false;
                break;
            }
            const int col = g.range_bin_of_delay(dl);
            const int rbin_pred =
                static_cast<int>(std::ceil((t0.range_m[p] - g.range_origin) / g.range_res)) - 1;
            if (col < 0 || std::abs(col - rbin_pred) > 1) {
                ok = false;
                break;
            }
            const double q_pred = t0.doppler_hz[p] * g.crossrange_bins_per_hz();
            const int row_pred = img.row_of_fft_bin(static_cast<int>(std::lround(q_pred)));
            int peak_row = 0;
            double best = -1.0;
            for (int q = 0; q < img.rows; ++q) {
                if (img.at(q, col) > best) {
                    best = img.at(q, col);
                    peak_row = q;
                }
            }
            if (std::abs(peak_row - row_pred) > 2) {
                ok = false;
                break;
            }
            // orientation bookkeeping on the flipped image
            const int flip_row = img.rows - 1 - peak_row;
            const double cr = res.image_flipped.crossrange_of_row(flip_row);
            if (sc[p].z > 0.5) {
                roof_cr += cr;
                ++roof_n;
            } else if (sc[p].z > -0.5 && sc[p].z < -0.3) {
                wheel_cr += cr;
                ++wheel_n;
            }
        }
        bool orient = ok && roof_n > 0 && wheel_n > 0 && (roof_cr / roof_n) > (wheel_cr / wheel_n);
        all_ok = all_ok && ok && orient;
        detail += fmt("%sx0=%g: placement %s, flip roof %.2f > wheels %.2f %s", detail.empty() ? "" : "; ",
                      cfg.x0_m, ok ? "ok" : "FAIL", roof_n ? roof_cr / roof_n : 0.0,
                      wheel_n ? wheel_cr / wheel_n : 0.0, orient ? "ok" : "FAIL");
    }
    return report(8, all_ok, detail);
}

// 9. Scaling identities.
bool criterion9() {
    SceneConfig cfg = load_config_file("configs/paper_x0_0.cfg");
    ImagingGeometry g = geometry(cfg, 40.0);
    const bool ok = g.crossrange_bins == cfg.frame_count() &&
                    std::abs(g.crossrange_res * g.crossrange_bins - cfg.plane_y_m) < 1e-9;
    return report(9, ok, fmt("Delta_cr*N_cr = %.12f (Y=25), N_cr = %d (M=%d)",
                             g.crossrange_res * g.crossrange_bins, g.crossrange_bins,
                             cfg.frame_count()));
}

// 10. CLI determinism: same config+seed twice -> byte-identical artifacts.
bool criterion10() {
    const std::string outs[2] = {"/tmp/isar_accept10_a", "/tmp/isar_accept10_b"};
    for (const auto& d : outs) {
        fs::remove_all(d);
        std::string cmd = std::string(ISAR_CLI_PATH) +
                          " pipeline --config configs/paper_x0_0.cfg --out " + d + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) return report(10, false, "cli run failed");
    }
    bool ok = true;
    std::string detail;
    for (const char* f :
         {"/report.txt", "/range_profile.csv", "/image.pgm", "/image.pgm.meta", "/image.csv"}) {
        const std::string ca = file_checksum(outs[0] + f);
        const std::string cb = file_checksum(outs[1] + f);
        if (ca != cb) {
            ok = false;
            detail += std::string(f) + " differs; ";
        }
    }
    fs::remove_all(outs[0]);
    fs::remove_all(outs[1]);
    return report(10, ok, ok ? "5 artifacts byte-identical across two runs" : detail);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    } else {
        for (int c = 1; c <= 10; ++c) which.push_back(c);
    }
    bool all = true;
    for (int c : which) {
        bool ok = false;
        try {
            switch (c) {
                case 1: ok = criterion1(); break;
                case 2: ok = criterion2(); break;
                case 3: ok = criterion3(); break;
                case 4: ok = criterion4(); break;
                case 5: ok = criterion5(); break;
                case 6: ok = criterion6(); break;
                case 7: ok = criterion7(); break;
                case 8: ok = criterion8(); break;
                case 9: ok = criterion9(); break;
                case 10: ok = criterion10(); break;
                default:
                    std::fprintf(stderr, "unknown criterion %d\n", c);
            }
        } catch (const std::exception& e) {
            std::printf("criterion %d: FAIL  (exception: %s)\n", c, e.what());
            ok = false;
        }
        all = all && ok;
    }
    return all ? 0 : 1;
}
