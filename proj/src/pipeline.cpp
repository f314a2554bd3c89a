#include "isar/pipeline.hpp"

#include <atomic>
#include <numeric>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "isar/rng.hpp"

namespace isar {

uint64_t trial_seed(uint64_t root, int trial) {
    uint64_t sm = root;
    return splitmix64(sm) ^ (0xa0761d6478bd642full * (static_cast<uint64_t>(trial) + 1));
}

int max_threads() {
    if (const char* env = std::getenv("ISAR_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

DopplerChainResult doppler_chain(const SceneConfig& cfg, const EchoFrameSet& echoes,
                                 const GolayPreamble& preamble, const FrameSignal& signal,
                                 int m_check, int gap, bool preprocess, bool compensate) {
    if (gap < 1 || m_check - gap < 0 || m_check >= echoes.frame_count)
        throw DimensionMismatch("need 0 < i <= m_check < M");
    const double sigma_nc = std::sqrt(echoes.sigma_nc2);
    const double ts = cfg.symbol_period_s();

    struct FrameEst {
        DelaySet delays;
        std::vector<cdouble> h;
        double scale = 0.0;
    };
    auto estimate_frame = [&](int m) {
        CorrelationProfile prof =
            correlate(echoes.frame(m), echoes.first_delay[m], preamble, cfg.data_guard_samples);
        FrameEst fe;
        fe.delays = extract_delays(prof, sigma_nc, cfg.search_span);
        fe.h = lse_channel(echoes.frame(m), echoes.first_delay[m], fe.delays, signal,
                           echoes.symbol_energy, cfg.preamble_samples, cfg.data_guard_samples);
        fe.scale = doppler_scale(window_center(fe.delays, cfg.preamble_samples, cfg.data_guard_samples),
                                 m, cfg.frame_samples, ts);
        return fe;
    };

    FrameEst f0 = estimate_frame(0);
    FrameEst fa = estimate_frame(m_check - gap);
    FrameEst fb = estimate_frame(m_check);

    // Pair frame-0 delays with both later frames. The drift tolerance comes
    // from the geometry: a sampled delay can change by one only if the radial
    // motion over the CPI reaches a half bin. With zero tolerance, a detection
    // flicker of one weak scatterer cannot cross-pair two adjacent scatterers.
    const double drift_bins = 2.0 * cfg.velocity_mps * cfg.cpi_s *
                              ((std::abs(cfg.x0_m) + cfg.vehicle_x_m / 2.0) /
                               cfg.reference_range_m()) /
                              (kSpeedOfLight * ts);
    const int max_drift = drift_bins >= 0.25 ? 1 : 0;
    auto pa = match_delay_sets(f0.delays, fa.delays, max_drift);
    auto pb = match_delay_sets(f0.delays, fb.delays, max_drift);
    std::vector<int> ia(f0.delays.count(), -1), ib(f0.delays.count(), -1);
    for (auto& pr : pa) ia[static_cast<std::size_t>(pr.first)] = pr.second;
    for (auto& pr : pb) ib[static_cast<std::size_t>(pr.first)] = pr.second;

    DopplerChainResult out;
    out.delays0 = f0.delays;
    out.scale_a = fa.scale;
    out.scale_b = fb.scale;
    std::vector<cdouble> h0m, ham, hbm;
    for (int p = 0; p < f0.delays.count(); ++p) {
        if (ia[static_cast<std::size_t>(p)] < 0 || ib[static_cast<std::size_t>(p)] < 0) continue;
        const cdouble c0 = f0.h[static_cast<std::size_t>(p)];
        const cdouble ca = fa.h[static_cast<std::size_t>(ia[static_cast<std::size_t>(p)])];
        const cdouble cb = fb.h[static_cast<std::size_t>(ib[static_cast<std::size_t>(p)])];
        // backscatter magnitude is constant over the CPI; a gross mismatch
        // marks a mispaired or corrupted estimate
        const double m0 = std::abs(c0);
        if (m0 <= 0.0) continue;
        const double ra = std::abs(ca) / m0, rb = std::abs(cb) / m0;
        if (ra < 0.4 || ra > 2.5 || rb < 0.4 || rb > 2.5) continue;
        out.delays.push_back(f0.delays.delays[p]);
        h0m.push_back(c0);
        ham.push_back(ca);
        hbm.push_back(cb);
    }
    if (out.delays.empty()) throw NoTarget("no delays matched across frames");
    out.h0 = h0m;
    out.nu_a_raw = doppler_raw(h0m, ham, fa.scale);
    out.nu_b_raw = doppler_raw(h0m, hbm, fb.scale);
    out.nu_a = out.nu_a_raw;
    out.nu_b = out.nu_b_raw;
    if (preprocess) preprocess_wrap(out.nu_a, out.nu_b, fa.scale, fb.scale);
    if (compensate) {
        WrapResult wr = compensate_wrap(out.nu_a, out.nu_b, fa.scale, fb.scale);
        out.nu_a = wr.nu_a;
        out.nu_b = wr.nu_b;
        out.wraps = wr.wraps;
    } else {
        out.wraps.assign(out.delays.size(), 0);
    }
    return out;
}

PipelineResult run_pipeline(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                            uint64_t seed, bool with_noise) {
    PipelineResult res;
    res.beams = align_beams(cfg, scatterers, seed);
    res.echoes = synthesize_echoes(cfg, scatterers, res.beams, seed, with_noise);
    GolayPreamble preamble = build_preamble();
    FrameSignal signal = build_frame(cfg.seed, cfg.frame_samples);

    const int m_count = cfg.frame_count();
    const int m_check = std::min(cfg.effective_m_check(), m_count - 1);
    const int gap = cfg.frame_gap;

    res.profile0 = correlate(res.echoes.frame(0), res.echoes.first_delay[0], preamble,
                             cfg.data_guard_samples);
    const double sigma_nc = std::sqrt(res.echoes.sigma_nc2);
    res.delays0 = extract_delays(res.profile0, sigma_nc, cfg.search_span);

    DopplerChainResult dc = doppler_chain(cfg, res.echoes, preamble, signal, m_check, gap);

    DopplerMatrix mat = doppler_all_frames(dc.nu_a, dc.nu_b, m_check, gap, m_count);
    std::vector<double> nu_first(mat.scatterer_count), nu_last(mat.scatterer_count);
    for (int p = 0; p < mat.scatterer_count; ++p) {
        nu_first[static_cast<std::size_t>(p)] = mat.at(0, p);
        nu_last[static_cast<std::size_t>(p)] = mat.at(m_count - 1, p);
    }
    const double vhat = estimate_velocity(nu_first, nu_last, cfg.wavelength_m(),
                                          cfg.reference_range_m(), cfg.cpi_s);

    res.report.delays0 = res.delays0;
    res.report.h0 = lse_channel(res.echoes.frame(0), res.echoes.first_delay[0], res.delays0, signal,
                                res.echoes.symbol_energy, cfg.preamble_samples,
                                cfg.data_guard_samples);
    res.report.doppler_delays = dc.delays;
    res.report.doppler = mat;
    res.report.wrap_counts = dc.wraps;
    res.report.velocity_mps = vhat;
    res.report.m_check = m_check;
    res.report.frame_gap = gap;

    res.geo = geometry(cfg, vhat);
    res.range_prof = range_profile(res.profile0, res.geo);

    // pre-image wants one Doppler column per frame-0 delay; delays missing from
    // the Doppler chain (dropped by matching) reuse the chain median slope.
    DelaySet img_delays;
    img_delays.peak_delay = res.delays0.peak_delay;
    img_delays.delays = dc.delays;
    PreImage pre = build_pre_image(img_delays, mat, res.profile0, res.geo,
                                   cfg.background_zero_fill);
    res.image = form_image(pre, res.geo);
    res.image_flipped = flip_image(res.image);
    return res;
}

namespace {

struct DiffAccum {
    double med_pre = 0.0, mean_pre = 0.0, med_raw = 0.0, mean_raw = 0.0;
    int n = 0;
};

}  // namespace

std::vector<NmseDiffPoint> nmse_diff_experiment(const SceneConfig& cfg,
                                                const std::vector<Scatterer>& scatterers,
                                                int gap_lo, int gap_hi, int trials, int threads) {
    if (trials < 1) throw ConfigParse("trials must be >= 1");
    if (gap_lo < 1 || gap_hi < gap_lo) throw ConfigParse("bad gap range");
    const int m_count = cfg.frame_count();
    const int m_check = m_count - 1;  // Fig. 6 setting
    GolayPreamble preamble = build_preamble();
    FrameSignal signal = build_frame(cfg.seed, cfg.frame_samples);
    const int ngap = gap_hi - gap_lo + 1;

    std::vector<DiffAccum> acc(static_cast<std::size_t>(ngap));
    std::vector<std::vector<DiffAccum>> per_trial(
        static_cast<std::size_t>(trials), std::vector<DiffAccum>(static_cast<std::size_t>(ngap)));

    const int nthreads = std::min(threads > 0 ? threads : max_threads(), trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
            const uint64_t seed = trial_seed(cfg.seed, t);
            BeamPair beams = align_beams(cfg, scatterers, seed);
            EchoFrameSet echoes = synthesize_echoes(cfg, scatterers, beams, seed);
            for (int g = gap_lo; g <= gap_hi; ++g) {
                DiffAccum& a = per_trial[static_cast<std::size_t>(t)][static_cast<std::size_t>(g - gap_lo)];
                try {
                    DopplerChainResult pre =
                        doppler_chain(cfg, echoes, preamble, signal, m_check, g, true, true);
                    DopplerChainResult raw =
                        doppler_chain(cfg, echoes, preamble, signal, m_check, g, false, true);
                    // truth difference, matched by delay
                    const FrameTruth& tb = echoes.truth[static_cast<std::size_t>(m_check)];
                    const FrameTruth& ta = echoes.truth[static_cast<std::size_t>(m_check - g)];
                    std::vector<double> dtrue;
                    std::vector<double> d_pre, d_raw;
                    for (std::size_t j = 0; j < pre.delays.size(); ++j) {
                        d_pre.push_back((pre.nu_b[j] - pre.nu_a[j]) / g);
                    }
                    for (std::size_t j = 0; j < raw.delays.size(); ++j) {
                        d_raw.push_back((raw.nu_b[j] - raw.nu_a[j]) / g);
                    }
                    const FrameTruth& t0 = echoes.truth[0];
                    for (std::size_t p = 0; p < t0.sampled_delay.size(); ++p)
                        dtrue.push_back((tb.doppler_hz[p] - ta.doppler_hz[p]) / g);
                    const double dt = median(dtrue);
                    auto rel2 = [dt](double v) { return ((v - dt) / dt) * ((v - dt) / dt); };
                    a.med_pre = rel2(median(d_pre));
                    a.mean_pre = rel2(std::accumulate(d_pre.begin(), d_pre.end(), 0.0) / d_pre.size());
                    a.med_raw = rel2(median(d_raw));
                    a.mean_raw = rel2(std::accumulate(d_raw.begin(), d_raw.end(), 0.0) / d_raw.size());
                    a.n = 1;
                } catch (const Error&) {
                    a.n = 0;  // trial dropped for this gap (no target); rare
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // ordered reduction over trials, independent of scheduling
    for (int t = 0; t < trials; ++t) {
        for (int j = 0; j < ngap; ++j) {
            const DiffAccum& a = per_trial[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            if (!a.n) continue;
            acc[static_cast<std::size_t>(j)].med_pre += a.med_pre;
            acc[static_cast<std::size_t>(j)].mean_pre += a.mean_pre;
            acc[static_cast<std::size_t>(j)].med_raw += a.med_raw;
            acc[static_cast<std::size_t>(j)].mean_raw += a.mean_raw;
            acc[static_cast<std::size_t>(j)].n += 1;
        }
    }
    std::vector<NmseDiffPoint> out;
    for (int j = 0; j < ngap; ++j) {
        const DiffAccum& a = acc[static_cast<std::size_t>(j)];
        NmseDiffPoint pt;
        pt.gap = gap_lo + j;
        const double n = a.n ? static_cast<double>(a.n) : 1.0;
        pt.median_pre = a.med_pre / n;
        pt.mean_pre = a.mean_pre / n;
        pt.median_raw = a.med_raw / n;
        pt.mean_raw = a.mean_raw / n;
        out.push_back(pt);
    }
    return out;
}

std::vector<NmseDopplerPoint> nmse_doppler_experiment(const SceneConfig& cfg,
                                                      const std::vector<Scatterer>& scatterers,
                                                      int m_lo, int m_hi, int step, int trials,
                                                      int threads) {
    if (trials < 1) throw ConfigParse("trials must be >= 1");
    const int m_count = cfg.frame_count();
    const int gap = cfg.frame_gap;
    if (m_lo < gap + 1 || m_hi >= m_count || m_lo > m_hi || step < 1)
        throw ConfigParse("m_check sweep must lie in [i+1, M-1]");
    GolayPreamble preamble = build_preamble();
    FrameSignal signal = build_frame(cfg.seed, cfg.frame_samples);

    std::vector<int> sweep;
    for (int m = m_lo; m <= m_hi; m += step) sweep.push_back(m);

    // per (sweep point, delay) accumulators, merged after the pool joins
    struct Cell {
        double sum = 0.0;
        int n = 0;
    };
    std::vector<std::vector<std::map<int, Cell>>> per_trial(
        static_cast<std::size_t>(trials),
        std::vector<std::map<int, Cell>>(sweep.size()));

    const int nthreads = std::min(threads > 0 ? threads : max_threads(), trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
            const uint64_t seed = trial_seed(cfg.seed, t);
            BeamPair beams = align_beams(cfg, scatterers, seed);
            EchoFrameSet echoes = synthesize_echoes(cfg, scatterers, beams, seed);
            for (std::size_t si = 0; si < sweep.size(); ++si) {
                const int mck = sweep[si];
                try {
                    DopplerChainResult dc =
                        doppler_chain(cfg, echoes, preamble, signal, mck, gap, true, true);
                    const FrameTruth& tb = echoes.truth[static_cast<std::size_t>(mck)];
                    const FrameTruth& t0 = echoes.truth[0];
                    for (std::size_t j = 0; j < dc.delays.size(); ++j) {
                        // match estimate to truth by frame-0 sampled delay
                        int pt = -1;
                        for (std::size_t p = 0; p < t0.sampled_delay.size(); ++p) {
                            if (t0.sampled_delay[p] == dc.delays[j]) {
                                pt = static_cast<int>(p);
                                break;
                            }
                        }
                        if (pt < 0) continue;
                        const double tru = tb.doppler_hz[static_cast<std::size_t>(pt)];
                        const double rel = (dc.nu_b[j] - tru) / tru;
                        Cell& c = per_trial[static_cast<std::size_t>(t)][si][dc.delays[j]];
                        c.sum += rel * rel;
                        c.n += 1;
                    }
                } catch (const Error&) {
                    // no target this trial at this m_check; skip
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::vector<NmseDopplerPoint> out;
    for (std::size_t si = 0; si < sweep.size(); ++si) {
        std::map<int, Cell> merged;
        for (int t = 0; t < trials; ++t) {
            for (const auto& kv : per_trial[static_cast<std::size_t>(t)][si]) {
                merged[kv.first].sum += kv.second.sum;
                merged[kv.first].n += kv.second.n;
            }
        }
        NmseDopplerPoint pt;
        pt.m_check = sweep[si];
        double total = 0.0;
        int np = 0;
        for (const auto& kv : merged) {
            if (kv.second.n == 0) continue;
            total += kv.second.sum / kv.second.n;  // E[.] per scatterer
            ++np;
        }
        pt.nmse = np ? total / np : 0.0;
        out.push_back(pt);
    }
    return out;
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Io("cannot checksum: " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Io("cannot write manifest: " + path);
    out << "command = " << command << "\n";
    out << "version = " << version << "\n";
    out << "seed = " << seed << "\n";
    out << "[artifacts]\n";
    for (const auto& a : artifacts) out << a.second << "  " << a.first << "\n";
    out << "[config]\n" << config_text;
}

}  // namespace isar
