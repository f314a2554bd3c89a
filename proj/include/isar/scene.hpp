#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isar/common.hpp"

namespace isar {

/// Full experiment configuration (paper Table I values by default).
struct SceneConfig {
    // geometry / kinematics
    double x0_m = 0.0;
    double y0_m = 20.0;
    double z0_m = -7.0;
    double velocity_mps = 40.0;
    double vehicle_x_m = 4.8, vehicle_y_m = 2.1, vehicle_z_m = 1.5;

    // waveform
    double bandwidth_hz = 1.76e9;
    double carrier_hz = 60e9;
    int frame_samples = 13632;       // K
    int preamble_samples = 3328;     // K_pre
    int data_guard_samples = 1;      // ell_D

    // radar / channel
    double cpi_s = 2e-3;
    double tx_power_dbm = 30.0;
    double noise_density_dbm_per_hz = -174.0;
    double rcs_total_dbsm = 20.0;
    double rician_k_db = 12.347;
    int nlos_paths = 5;

    // arrays (RSU TX == radar RX size)
    int tx_x = 8, tx_y = 8;
    int vrx_x = 8, vrx_y = 2;

    // imaging plane
    double plane_x_m = 15.0;
    double plane_y_m = 25.0;
    bool background_zero_fill = false;

    // estimation knobs
    int m_check = -1;   // -1: auto = floor(M/2)
    int frame_gap = 6;  // i
    int search_span = 64;

    uint64_t seed = 1;

    std::string scene_model = "sedan-side";
    std::string scene_file;  // overrides scene_model when nonempty

    // derived quantities
    double symbol_period_s() const { return 1.0 / bandwidth_hz; }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double frame_period_s() const { return frame_samples * symbol_period_s(); }
    int frame_count() const { return static_cast<int>(cpi_s / frame_period_s()); }  // M
    double reference_range_m() const {
        return std::sqrt(x0_m * x0_m + y0_m * y0_m + z0_m * z0_m);  // R0
    }
    // Es: per-symbol signal scale in watts (see README on units).
    double symbol_energy() const { return dbm_to_watts(tx_power_dbm); }
    double noise_density_w_per_hz() const { return dbm_to_watts(noise_density_dbm_per_hz); }
    double rcs_total_m2() const { return db_to_linear(rcs_total_dbsm); }
    int tx_count() const { return tx_x * tx_y; }
    int vrx_count() const { return vrx_x * vrx_y; }
    int effective_m_check() const { return m_check < 0 ? frame_count() / 2 : m_check; }

    void validate() const;
};

/// Point scatterer: body-frame position (x forward along travel, y lateral
/// toward +y, z up) plus its linear RCS share in m^2.
struct Scatterer {
    double x = 0.0, y = 0.0, z = 0.0;
    double rcs_share = 0.0;
};

/// Ground-truth radar parameters of every scatterer at one frame.
struct FrameTruth {
    int frame = 0;
    std::vector<double> range_m;        // r_p^m
    std::vector<double> doppler_angle;  // phi_p with sin(phi) = -x/r (Doppler angle)
    std::vector<double> azimuth;        // steering azimuth, atan2(-x, y)
    std::vector<double> elevation;      // theta_p, negative below the RSU
    std::vector<int> sampled_delay;     // ell_p^m
    std::vector<double> doppler_hz;     // nu_p^m
    std::vector<double> gain;           // G_p (held at its m=0 value)
    int first_delay() const;
};

// Shipped point-scatterer models. model_id currently: "sedan-side".
std::pair<SceneConfig, std::vector<Scatterer>> builtin_scene(const std::string& model_id,
                                                             double x0_m);

// Scene file: one "x y z rcs_share" per line, '#' comments.
std::vector<Scatterer> load_scene_file(const std::string& path);
void write_scene_file(const std::string& path, const std::vector<Scatterer>& scatterers,
                      const std::string& header_comment = "");

// Sectioned key=value config file. Unknown keys are hard errors.
SceneConfig load_config_file(const std::string& path);
std::string config_to_text(const SceneConfig& cfg);

// Scatterers for a config: its scene_file if set, else the builtin model.
std::vector<Scatterer> scene_for_config(const SceneConfig& cfg);

// Truth at frame m: positions advanced by V*m*K*Ts.
FrameTruth frame_truth(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers, int m);

}  // namespace isar
