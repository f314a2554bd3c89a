#pragma once

#include <cstdint>
#include <vector>

#include "isar/common.hpp"

namespace isar {

/// Complementary bipolar pair: aperiodic autocorrelations sum to 2N*delta[k].
struct GolayPair {
    std::vector<int> a;
    std::vector<int> b;
    int length() const { return static_cast<int>(a.size()); }
};

// Aperiodic autocorrelation R_c[k] = sum_q c[q] c[q+k].
long aperiodic_autocorr(const std::vector<int>& c, int k);

// Aperiodic crosscorrelation sum_q x[q] y[q+k].
long aperiodic_crosscorr(const std::vector<int>& x, const std::vector<int>& y, int k);

// Recursive doubling construction from ([+1],[+1]): a2N=[aN bN], b2N=[aN -bN].
// n must be a power of two in [2, 1024].
GolayPair generate_golay_pair(int n);

inline constexpr int kPreambleLen = 3328;   // K_pre
inline constexpr int kSegmentOffset = 2048; // segment starts at sample 2049 (1-based)
inline constexpr int kSegmentLen = 512;
inline constexpr int kGuardBack = 64;       // exact zeros for shifts [-64,-1]
inline constexpr int kGuardFwd = 128;       // exact zeros for shifts [1,128]

/// SC PHY preamble: STF (16 x a128, -a128) then CEF (1152 samples). The window
/// [2048,2560) equals s512 = [-a,-b,-a,+b]; correlating s512 against the
/// preamble is exactly zero for shifts in [-64,-1] u [1,128].
struct GolayPreamble {
    std::vector<int> samples;   // length 3328, values +-1
    std::vector<int> segment;   // s512
    int segment_offset = kSegmentOffset;

    // sum_k segment[k]*samples[segment_offset+delta+k]; requires the shifted
    // window to stay inside the preamble.
    long segment_correlation(int delta) const;
};

GolayPreamble build_preamble();

/// One SC PHY frame worth of unit-energy TX symbols: real +-1 preamble then
/// seeded QPSK-like data placeholders.
struct FrameSignal {
    std::vector<cdouble> symbols;  // length K
    int preamble_len = kPreambleLen;

    // s[n] with s = 0 outside [0, K-1].
    cdouble at(long n) const {
        if (n < 0 || n >= static_cast<long>(symbols.size())) return {0.0, 0.0};
        return symbols[static_cast<std::size_t>(n)];
    }
};

FrameSignal build_frame(uint64_t seed, int frame_len = 13632);

}  // namespace isar
