#include "isar/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace isar {

void SceneConfig::validate() const {
    if (bandwidth_hz <= 0 || carrier_hz <= 0) throw ConfigParse("bandwidth/carrier must be positive");
    if (y0_m <= 0) throw ConfigParse("y0_m must be positive (vehicle in front of the RSU)");
    if (z0_m == 0) throw ConfigParse("z0_m must be nonzero (RSU elevated)");
    if (data_guard_samples < 1 || data_guard_samples >= preamble_samples)
        throw ConfigParse("data_guard_samples must be in [1, preamble_samples)");
    if (preamble_samples != 3328) throw ConfigParse("preamble_samples must be 3328");
    if (frame_samples < preamble_samples) throw ConfigParse("frame_samples < preamble_samples");
    if (frame_count() < 2) throw ConfigParse("CPI shorter than two frames");
    if (tx_x < 1 || tx_y < 1 || vrx_x < 1 || vrx_y < 1) throw ConfigParse("array sizes must be >= 1");
    if (plane_x_m <= 0 || plane_y_m <= 0) throw ConfigParse("image plane must be positive");
}

namespace {

// 10-point cab-forward outline, 4.8 x 2.1 x 1.5 envelope. Lateral offsets are
// chosen so the sampled delays are mutually distinct at X0 in {-5, 0, 5}; the
// rear-glass point carries a deliberately small share (weak return).
const std::vector<Scatterer>& sedan_side_points() {
    static const double eq = 100.0 / 9.1;  // equal share, sum with the 0.1x point = 100 m^2
    static const std::vector<Scatterer> pts = {
        {2.3680, 0.5296, 0.0500, eq},      // nose
        {1.9500, -0.4819, 0.4000, eq},      // hood / windshield base
        {1.5500, 0.0681, -0.4500, eq},      // front wheel
        {1.3000, 0.0415, 0.7400, eq},      // roof front rail
        {0.8500, 0.7818, 0.7500, eq},      // roof mid
        {-0.8500, -0.3877, 0.7200, eq},      // roof rear rail
        {-0.9500, -0.6819, -0.6000, eq},      // rocker
        {-1.3000, 0.0383, 0.4500, eq * 0.1},// rear glass (weak)
        {-1.4500, -0.1066, -0.4500, eq},      // rear wheel
        {-2.4000, 0.3346, 0.0200, eq},      // tail
    };
    return pts;
}

}  // namespace

std::pair<SceneConfig, std::vector<Scatterer>> builtin_scene(const std::string& model_id,
                                                             double x0_m) {
    if (model_id != "sedan-side") throw UnknownModel("unknown scene model: " + model_id);
    SceneConfig cfg;
    cfg.x0_m = x0_m;
    cfg.scene_model = model_id;
    cfg.validate();
    return {cfg, sedan_side_points()};
}

std::vector<Scatterer> load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParse("cannot open scene file: " + path);
    std::vector<Scatterer> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        Scatterer s;
        if (!(ss >> s.x)) continue;  // blank/comment line
        if (!(ss >> s.y >> s.z >> s.rcs_share))
            throw ConfigParse(path + ":" + std::to_string(lineno) + ": expected 'x y z rcs_share'");
        if (s.rcs_share <= 0)
            throw ConfigParse(path + ":" + std::to_string(lineno) + ": rcs_share must be positive");
        out.push_back(s);
    }
    if (out.empty()) throw ConfigParse("scene file has no scatterers: " + path);
    return out;
}

void write_scene_file(const std::string& path, const std::vector<Scatterer>& scatterers,
                      const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw Io("cannot write scene file: " + path);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "# x_m y_m z_m rcs_share_m2\n";
    char buf[128];
    for (const auto& s : scatterers) {
        std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f %.9g\n", s.x, s.y, s.z, s.rcs_share);
        out << buf;
    }
}

std::vector<Scatterer> scene_for_config(const SceneConfig& cfg) {
    if (!cfg.scene_file.empty()) return load_scene_file(cfg.scene_file);
    return builtin_scene(cfg.scene_model, cfg.x0_m).second;
}

namespace {

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigParse("bad numeric value for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& v, const std::string& key) {
    double d = parse_double(v, key);
    long l = static_cast<long>(d);
    if (static_cast<double>(l) != d) throw ConfigParse("expected integer for " + key + ": '" + v + "'");
    return l;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

SceneConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParse("cannot open config file: " + path);
    SceneConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParse(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "scene.model") cfg.scene_model = val;
        else if (key == "scene.scene_file") cfg.scene_file = val;
        else if (key == "scene.x0_m") cfg.x0_m = parse_double(val, key);
        else if (key == "scene.y0_m") cfg.y0_m = parse_double(val, key);
        else if (key == "scene.z0_m") cfg.z0_m = parse_double(val, key);
        else if (key == "scene.velocity_mps") cfg.velocity_mps = parse_double(val, key);
        else if (key == "scene.vehicle_x_m") cfg.vehicle_x_m = parse_double(val, key);
        else if (key == "scene.vehicle_y_m") cfg.vehicle_y_m = parse_double(val, key);
        else if (key == "scene.vehicle_z_m") cfg.vehicle_z_m = parse_double(val, key);
        else if (key == "waveform.bandwidth_hz") cfg.bandwidth_hz = parse_double(val, key);
        else if (key == "waveform.carrier_hz") cfg.carrier_hz = parse_double(val, key);
        else if (key == "waveform.frame_samples") cfg.frame_samples = static_cast<int>(parse_int(val, key));
        else if (key == "waveform.preamble_samples") cfg.preamble_samples = static_cast<int>(parse_int(val, key));
        else if (key == "waveform.data_guard_samples") cfg.data_guard_samples = static_cast<int>(parse_int(val, key));
        else if (key == "radar.cpi_s") cfg.cpi_s = parse_double(val, key);
        else if (key == "radar.tx_power_dbm") cfg.tx_power_dbm = parse_double(val, key);
        else if (key == "radar.noise_density_dbm_per_hz") cfg.noise_density_dbm_per_hz = parse_double(val, key);
        else if (key == "radar.rcs_total_dbsm") cfg.rcs_total_dbsm = parse_double(val, key);
        else if (key == "radar.rician_k_db") cfg.rician_k_db = parse_double(val, key);
        else if (key == "radar.nlos_paths") cfg.nlos_paths = static_cast<int>(parse_int(val, key));
        else if (key == "arrays.tx_x") cfg.tx_x = static_cast<int>(parse_int(val, key));
        else if (key == "arrays.tx_y") cfg.tx_y = static_cast<int>(parse_int(val, key));
        else if (key == "arrays.vrx_x") cfg.vrx_x = static_cast<int>(parse_int(val, key));
        else if (key == "arrays.vrx_y") cfg.vrx_y = static_cast<int>(parse_int(val, key));
        else if (key == "image.plane_x_m") cfg.plane_x_m = parse_double(val, key);
        else if (key == "image.plane_y_m") cfg.plane_y_m = parse_double(val, key);
        else if (key == "image.background") {
            if (val == "zero") cfg.background_zero_fill = true;
            else if (val == "profile") cfg.background_zero_fill = false;
            else throw ConfigParse("image.background must be 'profile' or 'zero'");
        }
        else if (key == "estimation.m_check") {
            if (val == "auto") cfg.m_check = -1;
            else cfg.m_check = static_cast<int>(parse_int(val, key));
        }
        else if (key == "estimation.frame_gap") cfg.frame_gap = static_cast<int>(parse_int(val, key));
        else if (key == "estimation.search_span") cfg.search_span = static_cast<int>(parse_int(val, key));
        else if (key == "run.seed") cfg.seed = static_cast<uint64_t>(parse_int(val, key));
        else throw ConfigParse(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

std::string config_to_text(const SceneConfig& c) {
    std::ostringstream o;
    o.precision(17);
    o << "[scene]\n"
      << "model = " << c.scene_model << "\n";
    if (!c.scene_file.empty()) o << "scene_file = " << c.scene_file << "\n";
    o << "x0_m = " << c.x0_m << "\ny0_m = " << c.y0_m << "\nz0_m = " << c.z0_m << "\n"
      << "velocity_mps = " << c.velocity_mps << "\n"
      << "vehicle_x_m = " << c.vehicle_x_m << "\nvehicle_y_m = " << c.vehicle_y_m
      << "\nvehicle_z_m = " << c.vehicle_z_m << "\n"
      << "[waveform]\n"
      << "bandwidth_hz = " << c.bandwidth_hz << "\ncarrier_hz = " << c.carrier_hz << "\n"
      << "frame_samples = " << c.frame_samples << "\npreamble_samples = " << c.preamble_samples
      << "\ndata_guard_samples = " << c.data_guard_samples << "\n"
      << "[radar]\n"
      << "cpi_s = " << c.cpi_s << "\ntx_power_dbm = " << c.tx_power_dbm << "\n"
      << "noise_density_dbm_per_hz = " << c.noise_density_dbm_per_hz << "\n"
      << "rcs_total_dbsm = " << c.rcs_total_dbsm << "\nrician_k_db = " << c.rician_k_db << "\n"
      << "nlos_paths = " << c.nlos_paths << "\n"
      << "[arrays]\n"
      << "tx_x = " << c.tx_x << "\ntx_y = " << c.tx_y << "\nvrx_x = " << c.vrx_x
      << "\nvrx_y = " << c.vrx_y << "\n"
      << "[image]\n"
      << "plane_x_m = " << c.plane_x_m << "\nplane_y_m = " << c.plane_y_m << "\n"
      << "background = " << (c.background_zero_fill ? "zero" : "profile") << "\n"
      << "[estimation]\n"
      << "m_check = ";
    if (c.m_check < 0) o << "auto";
    else o << c.m_check;
    o << "\nframe_gap = " << c.frame_gap << "\nsearch_span = " << c.search_span << "\n"
      << "[run]\n"
      << "seed = " << c.seed << "\n";
    return o.str();
}

int FrameTruth::first_delay() const {
    if (sampled_delay.empty()) throw DimensionMismatch("empty frame truth");
    return *std::min_element(sampled_delay.begin(), sampled_delay.end());
}

FrameTruth frame_truth(const SceneConfig& cfg, const std::vector<Scatterer>& scatterers, int m) {
    if (m < 0 || m >= cfg.frame_count()) throw DimensionMismatch("frame index out of CPI");
    const double ts = cfg.symbol_period_s();
    const double lambda = cfg.wavelength_m();
    const double t = static_cast<double>(m) * cfg.frame_samples * ts;
    FrameTruth ft;
    ft.frame = m;
    const std::size_t n = scatterers.size();
    ft.range_m.resize(n);
    ft.doppler_angle.resize(n);
    ft.azimuth.resize(n);
    ft.elevation.resize(n);
    ft.sampled_delay.resize(n);
    ft.doppler_hz.resize(n);
    ft.gain.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double x = scatterers[p].x + cfg.x0_m + cfg.velocity_mps * t;
        const double y = scatterers[p].y + cfg.y0_m;
        const double z = scatterers[p].z + cfg.z0_m;
        const double rho = std::hypot(x, y);
        const double r = std::sqrt(x * x + y * y + z * z);
        ft.range_m[p] = r;
        // Doppler angle: relative radial velocity V*sin(phi) with sin(phi) = -x/r.
        ft.doppler_angle[p] = std::asin(-x / r);
        ft.azimuth[p] = std::atan2(-x, y);
        ft.elevation[p] = std::atan2(z, rho);
        ft.doppler_hz[p] = 2.0 * cfg.velocity_mps * std::sin(ft.doppler_angle[p]) / lambda;
        long ell = std::lround(2.0 * r / (kSpeedOfLight * ts));
        if (ell < 1 || ell >= cfg.preamble_samples - cfg.data_guard_samples) {
            throw DelayOutOfFrame("sampled delay " + std::to_string(ell) +
                                  " outside (0, K_pre - ell_D) at frame " + std::to_string(m));
        }
        ft.sampled_delay[p] = static_cast<int>(ell);
    }
    // Large-scale gain held at its m=0 value across the CPI.
    const double t0 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double x = scatterers[p].x + cfg.x0_m + cfg.velocity_mps * t0;
        const double y = scatterers[p].y + cfg.y0_m;
        const double z = scatterers[p].z + cfg.z0_m;
        const double r0 = std::sqrt(x * x + y * y + z * z);
        ft.gain[p] = lambda * lambda * scatterers[p].rcs_share /
                     (64.0 * kPi * kPi * kPi * r0 * r0 * r0 * r0);
    }
    return ft;
}

}  // namespace isar
