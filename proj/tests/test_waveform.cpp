#include <doctest.h>

#include "isar/rng.hpp"
#include "isar/waveform.hpp"

using namespace isar;

TEST_SUITE_BEGIN("waveform");

TEST_CASE("smallest golay pair matches the hand-checked values") {
    GolayPair g = generate_golay_pair(2);
    CHECK(g.a == std::vector<int>{1, 1});
    CHECK(g.b == std::vector<int>{1, -1});
    CHECK(aperiodic_autocorr(g.a, 1) + aperiodic_autocorr(g.b, 1) == 0);
}

TEST_CASE("complementarity holds exactly for every doubling stage") {
    for (int n = 2; n <= 1024; n *= 2) {
        GolayPair g = generate_golay_pair(n);
        REQUIRE(g.length() == n);
        for (int v : g.a) CHECK(std::abs(v) == 1);
        for (int v : g.b) CHECK(std::abs(v) == 1);
        CHECK(aperiodic_autocorr(g.a, 0) + aperiodic_autocorr(g.b, 0) == 2 * n);
        for (int k = 1; k < n; ++k) {
            CHECK(aperiodic_autocorr(g.a, k) + aperiodic_autocorr(g.b, k) == 0);
        }
    }
}

TEST_CASE("n=128 autocorrelation sums") {
    GolayPair g = generate_golay_pair(128);
    CHECK(aperiodic_autocorr(g.a, 0) + aperiodic_autocorr(g.b, 0) == 256);
    for (int k = 1; k < 128; ++k)
        CHECK(aperiodic_autocorr(g.a, k) + aperiodic_autocorr(g.b, k) == 0);
}

TEST_CASE("non-power-of-two lengths are rejected") {
    CHECK_THROWS_AS(generate_golay_pair(3), NonPowerOfTwo);
    CHECK_THROWS_AS(generate_golay_pair(0), NonPowerOfTwo);
    CHECK_THROWS_AS(generate_golay_pair(2048), NonPowerOfTwo);
}

TEST_CASE("preamble layout") {
    GolayPreamble pre = build_preamble();
    REQUIRE(static_cast<int>(pre.samples.size()) == kPreambleLen);
    REQUIRE(static_cast<int>(pre.segment.size()) == kSegmentLen);
    for (int v : pre.samples) CHECK(std::abs(v) == 1);

    // STF: blocks 0..15 identical, block 16 is their negation.
    for (int k = 0; k < 128; ++k) {
        for (int blk = 1; blk < 16; ++blk) CHECK(pre.samples[blk * 128 + k] == pre.samples[k]);
        CHECK(pre.samples[16 * 128 + k] == -pre.samples[k]);
    }
    // segment == samples[2048..2560), and its first block is -a128 (STF end).
    for (int k = 0; k < kSegmentLen; ++k)
        CHECK(pre.segment[k] == pre.samples[kSegmentOffset + k]);
    for (int k = 0; k < 128; ++k) CHECK(pre.samples[2048 + k] == -pre.samples[k]);
    // s512 block structure: [-a, -b, -a, +b] -> blocks 0 and 2 equal, 1 = -3.
    for (int k = 0; k < 128; ++k) {
        CHECK(pre.segment[k] == pre.segment[256 + k]);
        CHECK(pre.segment[128 + k] == -pre.segment[384 + k]);
    }
}

TEST_CASE("segment guard window is exactly zero") {
    GolayPreamble pre = build_preamble();
    CHECK(pre.segment_correlation(0) == 512);
    for (int d = -kGuardBack; d <= kGuardFwd; ++d) {
        if (d == 0) continue;
        CHECK(pre.segment_correlation(d) == 0);
    }
    // outside the window the correlation is allowed (and known) to leak
    CHECK(pre.segment_correlation(-128) != 0);
    // independent direct-sum oracle at a couple of shifts
    auto direct = [&](int delta) {
        long s = 0;
        for (int k = 0; k < kSegmentLen; ++k)
            s += static_cast<long>(pre.samples[kSegmentOffset + k]) *
                 pre.samples[kSegmentOffset + delta + k];
        return s;
    };
    CHECK(direct(0) == 512);
    CHECK(direct(-64) == 0);
    CHECK(direct(128) == 0);
}

TEST_CASE("frame symbols: deterministic, unit energy, preamble prefix") {
    FrameSignal f1 = build_frame(0);
    FrameSignal f2 = build_frame(0);
    REQUIRE(f1.symbols.size() == 13632);
    CHECK(f1.symbols == f2.symbols);
    FrameSignal f3 = build_frame(7);
    CHECK(f1.symbols != f3.symbols);

    GolayPreamble pre = build_preamble();
    for (int k = 0; k < kPreambleLen; ++k) {
        CHECK(f1.symbols[k].imag() == 0.0);
        CHECK(f1.symbols[k].real() == static_cast<double>(pre.samples[k]));
    }
    double e = 0.0;
    for (const auto& s : f1.symbols) e += std::norm(s);
    CHECK(e / f1.symbols.size() == doctest::Approx(1.0).epsilon(1e-12));
    // out-of-range access is zero
    CHECK(f1.at(-1) == cdouble{0.0, 0.0});
    CHECK(f1.at(13632) == cdouble{0.0, 0.0});
}

TEST_SUITE_END();
