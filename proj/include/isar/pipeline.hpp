#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isar/imaging.hpp"

namespace isar {

/// Everything one pipeline run produces, in memory.
struct PipelineResult {
    BeamPair beams;
    EchoFrameSet echoes;
    CorrelationProfile profile0;
    DelaySet delays0;
    EstimationReport report;
    ImagingGeometry geo;
    std::vector<double> range_prof;
    IsarImage image;          // as formed
    IsarImage image_flipped;  // cross-range reversed
};

// Full chain: beams -> echoes -> delays -> LSE -> Doppler -> velocity -> image.
// with_noise=false runs the noise-free variant (thresholds still use the
// config's nominal sigma_nc).
PipelineResult run_pipeline(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                            uint64_t seed, bool with_noise = true);

// Doppler estimates at (m_check, m_check-i) for one echo set; pairs frames by
// delay value. Returns per-matched-delay results.
struct DopplerChainResult {
    std::vector<int> delays;        // matched delays (frame-0 values)
    std::vector<double> nu_a;       // compensated, frame m_check - i
    std::vector<double> nu_b;       // compensated, frame m_check
    std::vector<double> nu_a_raw;   // before preprocessing/compensation
    std::vector<double> nu_b_raw;
    std::vector<int> wraps;
    double scale_a = 0.0, scale_b = 0.0;
    std::vector<cdouble> h0;        // matched subset
    DelaySet delays0;               // full frame-0 delay set
};

DopplerChainResult doppler_chain(const SceneConfig& cfg, const EchoFrameSet& echoes,
                                 const GolayPreamble& preamble, const FrameSignal& signal,
                                 int m_check, int gap, bool preprocess = true,
                                 bool compensate = true);

// Monte-Carlo seed for trial t of a root seed.
uint64_t trial_seed(uint64_t root, int trial);

// --- experiment drivers (Fig. 6 / Fig. 7 style curves) ---

struct NmseDiffPoint {
    int gap = 0;
    double median_pre = 0.0;
    double mean_pre = 0.0;
    double median_raw = 0.0;
    double mean_raw = 0.0;
};

// NMSE of the Doppler-shift difference vs frame gap i at m_check = M-1:
// {median, mean} x {with, without preprocessing}, Monte-Carlo over trials.
std::vector<NmseDiffPoint> nmse_diff_experiment(const SceneConfig& cfg,
                                                const std::vector<Scatterer>& scatterers,
                                                int gap_lo, int gap_hi, int trials,
                                                int threads = 0);

struct NmseDopplerPoint {
    int m_check = 0;
    double nmse = 0.0;
};

// NMSE of compensated Doppler at the m_check-th frame over a sweep, i fixed.
std::vector<NmseDopplerPoint> nmse_doppler_experiment(const SceneConfig& cfg,
                                                      const std::vector<Scatterer>& scatterers,
                                                      int m_lo, int m_hi, int step, int trials,
                                                      int threads = 0);

// ISAR_THREADS env var cap (>=1); 0 -> hardware concurrency.
int max_threads();

// FNV-1a 64-bit file checksum, hex.
std::string file_checksum(const std::string& path);

inline constexpr const char* kToolkitVersion = "isar 1.0.0";

/// Run manifest: config snapshot, seed, toolkit version, artifact checksums.
struct RunManifest {
    std::string command;
    std::string version = kToolkitVersion;
    uint64_t seed = 0;
    std::string config_text;
    std::vector<std::pair<std::string, std::string>> artifacts;  // path, checksum
    void add(const std::string& path) { artifacts.emplace_back(path, file_checksum(path)); }
    void write(const std::string& path) const;
};

}  // namespace isar
