#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isar/scene.hpp"
#include "isar/waveform.hpp"

namespace isar {

/// UPA steering vector, Kronecker of the x-axis ramp with the y-axis ramp;
/// half-wavelength spacing so phi_x = pi cos(theta) sin(phi), phi_y = pi sin(theta).
std::vector<cdouble> steering(double phi, double theta, int nx, int ny);

// 2-D DFT codebook, nx*ny unit-norm vectors.
std::vector<std::vector<cdouble>> dft_codebook(int nx, int ny);

struct BeamPair {
    std::vector<cdouble> f_tx;          // unit norm, N_TX
    std::vector<cdouble> f_rx_radar;    // conj(f_tx)
    std::vector<cdouble> f_rx_vehicle;  // unit norm, N_vRX
};

// Exhaustive DFT-codebook alignment over the Rician channel at m=0.
BeamPair align_beams(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                     uint64_t seed);

struct NoiseClutter {
    double clutter_w = 0.0;    // P_c
    double sigma_nc2 = 0.0;    // N0*W + P_c
};

NoiseClutter clutter_power(const SceneConfig& cfg);

/// Per-scatterer complex backscattering coefficients, constant over the CPI.
struct BackscatterSet {
    std::vector<cdouble> h;
};

BackscatterSet draw_backscatter(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                                const BeamPair& beams, uint64_t seed);

/// Observed echo samples: per frame m, y[k] for k = ell_0^m .. K_pre - ell_D + ell_0^m.
struct EchoFrameSet {
    int frame_count = 0;
    int samples_per_frame = 0;          // K_pre - ell_D + 1
    std::vector<int> first_delay;       // ell_0^m per frame
    std::vector<std::vector<cdouble>> y;
    double sigma_nc2 = 0.0;
    double symbol_energy = 0.0;
    std::vector<FrameTruth> truth;
    uint64_t seed = 0;

    const std::vector<cdouble>& frame(int m) const { return y.at(m); }
};

// Synthesize echoes for all M frames with an explicit backscatter draw; noise
// substream is derived per frame from noise_seed.
EchoFrameSet synthesize_echoes(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                               const BackscatterSet& backscatter, uint64_t noise_seed,
                               bool with_noise = true);

// Spec-signature form: seed is split into backscatter and noise substreams.
EchoFrameSet synthesize_echoes(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers,
                               const BeamPair& beams, uint64_t seed, bool with_noise = true);

// Binary echo dump: 64-byte text header, then row-major little-endian
// interleaved float64 (re, im).
void write_echo_dump(const std::string& path, const EchoFrameSet& echoes);
EchoFrameSet read_echo_dump(const std::string& path);

}  // namespace isar
