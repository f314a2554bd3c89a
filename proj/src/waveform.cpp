#include "isar/waveform.hpp"

#include "isar/rng.hpp"

namespace isar {

long aperiodic_autocorr(const std::vector<int>& c, int k) {
    return aperiodic_crosscorr(c, c, k);
}

long aperiodic_crosscorr(const std::vector<int>& x, const std::vector<int>& y, int k) {
    const int n = static_cast<int>(x.size());
    long s = 0;
    for (int q = 0; q + k < n && q < n; ++q) {
        if (q + k >= 0) s += static_cast<long>(x[q]) * y[q + k];
    }
    return s;
}

GolayPair generate_golay_pair(int n) {
    if (n < 2 || n > 1024 || (n & (n - 1)) != 0) {
        throw NonPowerOfTwo("golay length must be a power of two in [2,1024], got " +
                            std::to_string(n));
    }
    std::vector<int> a{1}, b{1};
    while (static_cast<int>(a.size()) < n) {
        std::vector<int> a2(a);
        a2.insert(a2.end(), b.begin(), b.end());
        std::vector<int> b2(a);
        for (int v : b) b2.push_back(-v);
        a = std::move(a2);
        b = std::move(b2);
    }
    return {a, b};
}

namespace {

// The preamble pair needs equal second halves so that the segment's backward
// correlation against the trailing STF block vanishes exactly; [u v] / [-u v]
// is complementary whenever (u, v) is (cross terms cancel in pairs).
GolayPair preamble_pair() {
    GolayPair uv = generate_golay_pair(64);
    GolayPair p;
    p.a = uv.a;
    p.a.insert(p.a.end(), uv.b.begin(), uv.b.end());
    for (int v : uv.a) p.b.push_back(-v);
    p.b.insert(p.b.end(), uv.b.begin(), uv.b.end());
    return p;
}

void append_block(std::vector<int>& out, const std::vector<int>& blk, int sign) {
    for (int v : blk) out.push_back(sign * v);
}

}  // namespace

GolayPreamble build_preamble() {
    GolayPair g = preamble_pair();
    GolayPreamble pre;
    pre.samples.reserve(kPreambleLen);
    // STF: 16 repetitions of a128, then -a128.
    for (int i = 0; i < 16; ++i) append_block(pre.samples, g.a, +1);
    append_block(pre.samples, g.a, -1);
    // CEF: [-b -a +b -a | -b +a -b -a | -b], same block pattern as the
    // standard's Gu512/Gv512/Gv128 fields.
    const int signs_ab[9][2] = {{-1, 1}, {-1, 0}, {+1, 1}, {-1, 0}, {-1, 1},
                                {+1, 0}, {-1, 1}, {-1, 0}, {-1, 1}};
    for (auto& sb : signs_ab) {
        append_block(pre.samples, sb[1] ? g.b : g.a, sb[0]);
    }
    pre.segment.assign(pre.samples.begin() + kSegmentOffset,
                       pre.samples.begin() + kSegmentOffset + kSegmentLen);
    return pre;
}

long GolayPreamble::segment_correlation(int delta) const {
    const int start = segment_offset + delta;
    if (start < 0 || start + kSegmentLen > static_cast<int>(samples.size())) {
        throw DimensionMismatch("segment correlation shift out of preamble");
    }
    long s = 0;
    for (int k = 0; k < kSegmentLen; ++k) s += static_cast<long>(segment[k]) * samples[start + k];
    return s;
}

FrameSignal build_frame(uint64_t seed, int frame_len) {
    if (frame_len < kPreambleLen) throw DimensionMismatch("frame shorter than preamble");
    FrameSignal f;
    f.symbols.reserve(frame_len);
    GolayPreamble pre = build_preamble();
    for (int v : pre.samples) f.symbols.emplace_back(static_cast<double>(v), 0.0);
    Rng rng = Rng::substream(seed, /*tag=*/0x5f4a6e);
    for (int n = kPreambleLen; n < frame_len; ++n) {
        int q = static_cast<int>(rng.uniform_index(4));
        double ph = kPi / 4.0 + q * kPi / 2.0;
        f.symbols.emplace_back(std::cos(ph), std::sin(ph));
    }
    return f;
}

}  // namespace isar
