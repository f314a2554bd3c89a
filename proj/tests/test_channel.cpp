#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "isar/channel.hpp"
#include "isar/rng.hpp"

using namespace isar;

TEST_SUITE_BEGIN("channel");

TEST_CASE("steering vector basics") {
    auto v = steering(0.0, 0.0, 4, 3);
    REQUIRE(v.size() == 12);
    for (const auto& z : v) {
        CHECK(z.real() == doctest::Approx(1.0));
        CHECK(z.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
    auto u = steering(kPi / 2, 0.0, 2, 1);
    REQUIRE(u.size() == 2);
    CHECK(u[0].real() == doctest::Approx(1.0));
    CHECK(u[1].real() == doctest::Approx(-1.0));
    CHECK(std::abs(u[1].imag()) < 1e-12);

    double n2 = 0.0;
    for (const auto& z : steering(0.7, -0.3, 8, 8)) n2 += std::norm(z);
    CHECK(n2 == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("codebook vectors are unit norm") {
    for (const auto& f : dft_codebook(8, 2)) {
        double n2 = 0.0;
        for (const auto& z : f) n2 += std::norm(z);
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pure LOS alignment picks the best quantized beam") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    cfg.rician_k_db = 200.0;  // Rician collapses to LOS
    BeamPair bp = align_beams(cfg, sc, 3);
    double n2 = 0.0;
    for (const auto& z : bp.f_tx) n2 += std::norm(z);
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < bp.f_tx.size(); ++i)
        CHECK(bp.f_rx_radar[i] == std::conj(bp.f_tx[i]));

    // brute-force the codebook vector maximizing |a_tx^H f|
    const double az = std::atan2(-cfg.x0_m, cfg.y0_m);
    const double el = std::atan2(cfg.z0_m, std::hypot(cfg.x0_m, cfg.y0_m));
    auto a_tx = steering(az, el, cfg.tx_x, cfg.tx_y);
    double best = -1.0;
    std::vector<cdouble> best_f;
    for (const auto& f : dft_codebook(cfg.tx_x, cfg.tx_y)) {
        cdouble s{0, 0};
        for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(a_tx[i]) * f[i];
        if (std::abs(s) > best) {
            best = std::abs(s);
            best_f = f;
        }
    }
    for (std::size_t i = 0; i < best_f.size(); ++i) {
        CHECK(bp.f_tx[i].real() == doctest::Approx(best_f[i].real()).epsilon(1e-12));
        CHECK(bp.f_tx[i].imag() == doctest::Approx(best_f[i].imag()).epsilon(1e-12));
    }
}

TEST_CASE("rician alignment mostly picks the LOS-optimal beam") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    SceneConfig los_cfg = cfg;
    los_cfg.rician_k_db = 200.0;
    BeamPair ref = align_beams(los_cfg, sc, 0);
    int hits = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        BeamPair bp = align_beams(cfg, sc, 1000 + t);
        bool same = true;
        for (std::size_t i = 0; i < ref.f_tx.size() && same; ++i)
            same = std::abs(bp.f_tx[i] - ref.f_tx[i]) < 1e-12;
        hits += same;
    }
    CHECK(hits > trials / 2);
}

TEST_CASE("clutter power formula") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    NoiseClutter nc = clutter_power(cfg);
    // frozen regression constants (independent arithmetic oracle)
    CHECK(nc.clutter_w == doctest::Approx(3.7347098213e-12).epsilon(1e-6));
    CHECK(nc.sigma_nc2 == doctest::Approx(1.0741396023e-11).epsilon(1e-6));
    // noise floor alone: N0*W ~ -81.54 dBm
    const double n0w = cfg.noise_density_w_per_hz() * cfg.bandwidth_hz;
    CHECK(10.0 * std::log10(n0w * 1e3) == doctest::Approx(-81.545).epsilon(1e-4));

    SceneConfig flat = cfg;
    flat.z0_m = 0.0;  // grazing term vanishes (constructed directly; not a valid pipeline config)
    NoiseClutter nc0 = clutter_power(flat);
    CHECK(nc0.clutter_w == 0.0);
    CHECK(nc0.sigma_nc2 == doctest::Approx(n0w).epsilon(1e-12));
}

TEST_CASE("beamforming reciprocity with conjugate combiner") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    BeamPair bp = align_beams(cfg, sc, 5);
    FrameTruth t0 = frame_truth(cfg, sc, 0);
    for (std::size_t p = 0; p < sc.size(); ++p) {
        auto a = steering(t0.azimuth[p], t0.elevation[p], cfg.tx_x, cfg.tx_y);
        cdouble g_rx{0, 0}, g_tx{0, 0};
        for (std::size_t i = 0; i < a.size(); ++i) {
            g_rx += std::conj(bp.f_rx_radar[i]) * std::conj(a[i]);
            g_tx += std::conj(a[i]) * bp.f_tx[i];
        }
        CHECK(std::abs(g_rx * g_tx) == doctest::Approx(std::norm(g_tx)).epsilon(1e-9));
    }
}

TEST_CASE("noise-only echoes match sigma_nc2") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    std::vector<Scatterer> empty;
    BackscatterSet none;
    EchoFrameSet e = synthesize_echoes(cfg, empty, none, 99);
    double acc = 0.0;
    long n = 0;
    for (int m = 0; m < e.frame_count; ++m) {
        for (const auto& z : e.frame(m)) acc += std::norm(z);
        n += e.samples_per_frame;
    }
    CHECK(acc / n == doctest::Approx(e.sigma_nc2).epsilon(0.05));
}

TEST_CASE("single stationary scatterer reproduces the TX symbols exactly") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    cfg.velocity_mps = 0.0;  // nu = 0
    std::vector<Scatterer> one{{0.0, 0.0, 0.0, 1.0}};
    BackscatterSet bs;
    bs.h = {cdouble{0.5, 0.25}};
    EchoFrameSet e = synthesize_echoes(cfg, one, bs, 1, /*with_noise=*/false);
    FrameSignal sig = build_frame(cfg.seed, cfg.frame_samples);
    const int l0 = e.first_delay[0];
    const double amp = std::sqrt(e.symbol_energy);
    for (int k = 0; k < e.samples_per_frame; ++k) {
        cdouble expect = amp * bs.h[0] * sig.at(k);  // y[0, l0+k'] = sqrt(Es) h s[k']
        CHECK(std::abs(e.frame(0)[k] - expect) < 1e-12 * (1.0 + std::abs(expect)));
    }
    (void)l0;
}

TEST_CASE("moving scatterer: constant magnitude, linear phase ramp") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    std::vector<Scatterer> one{{-2.0, 0.0, 0.0, 1.0}};
    BackscatterSet bs;
    bs.h = {cdouble{1.0, 0.0}};
    EchoFrameSet e = synthesize_echoes(cfg, one, bs, 1, false);
    FrameTruth t0 = frame_truth(cfg, one, 0);
    const double nu = t0.doppler_hz[0];
    const double step_expected = 2.0 * kPi * nu * cfg.symbol_period_s();
    FrameSignal sig = build_frame(cfg.seed, cfg.frame_samples);
    const auto& y = e.frame(0);
    const double mag0 = std::abs(y[10]);
    int checked = 0;
    for (int k = 10; k < 3000; ++k) {
        CHECK(std::abs(y[k]) == doctest::Approx(mag0).epsilon(1e-9));
        // undo the +-1 symbol signs, then the per-sample rotation is 2 pi nu Ts
        cdouble r = y[k + 1] * std::conj(y[k]) * sig.at(k + 1) * sig.at(k);
        CHECK(principal_angle(r) == doctest::Approx(step_expected).epsilon(1e-6));
        if (++checked > 200) break;
    }
}

TEST_CASE("energy sanity at preamble-covered samples") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    BeamPair bp = align_beams(cfg, sc, 11);
    BackscatterSet bs = draw_backscatter(cfg, sc, bp, 11);
    EchoFrameSet e = synthesize_echoes(cfg, sc, bs, 11);
    double h2 = 0.0;
    for (const auto& h : bs.h) h2 += std::norm(h);
    const double expected = e.symbol_energy * h2 + e.sigma_nc2;
    // average over fully-covered samples (past the largest delay spread)
    double acc = 0.0;
    long n = 0;
    for (int m = 0; m < e.frame_count; m += 5) {
        const auto& y = e.frame(m);
        for (int k = 64; k < e.samples_per_frame - 64; k += 3) {
            acc += std::norm(y[k]);
            ++n;
        }
    }
    CHECK(acc / n == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("synthesis is deterministic and seed-sensitive") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    BeamPair bp = align_beams(cfg, sc, 4);
    EchoFrameSet a = synthesize_echoes(cfg, sc, bp, 42);
    EchoFrameSet b = synthesize_echoes(cfg, sc, bp, 42);
    EchoFrameSet c = synthesize_echoes(cfg, sc, bp, 43);
    CHECK(a.y == b.y);
    CHECK(a.y != c.y);
}

TEST_CASE("echo dump round trip") {
    auto [cfg, sc] = builtin_scene("sedan-side", 0.0);
    cfg.cpi_s = 4 * cfg.frame_period_s();  // keep the file small
    BeamPair bp = align_beams(cfg, sc, 4);
    EchoFrameSet e = synthesize_echoes(cfg, sc, bp, 42);
    const std::string path = "/tmp/isar_echo_test.bin";
    write_echo_dump(path, e);
    EchoFrameSet r = read_echo_dump(path);
    CHECK(r.frame_count == e.frame_count);
    CHECK(r.samples_per_frame == e.samples_per_frame);
    CHECK(r.seed == e.seed);
    CHECK(r.y == e.y);
    std::remove(path.c_str());
}

TEST_SUITE_END();
