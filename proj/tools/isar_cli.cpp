// Experiment driver: simulate | pipeline | nmse-diff | nmse-doppler.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "isar/pipeline.hpp"

namespace fs = std::filesystem;
using namespace isar;

namespace {

int exit_code_for(const Error& e) {
    static const std::map<std::string, int> codes = {
        {"ConfigParse", 10},      {"Io", 11},           {"NonPowerOfTwo", 12},
        {"UnknownModel", 13},     {"DelayOutOfFrame", 14}, {"WindowTooShort", 15},
        {"NoTarget", 16},         {"SingularGram", 17}, {"ZeroReference", 18},
        {"NegativeRadicand", 19}, {"ZeroVelocity", 20}, {"DimensionMismatch", 21},
    };
    auto it = codes.find(e.name());
    return it == codes.end() ? 64 : it->second;
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int64_t seed_override = -1;
    int m_check_override = -2;
    int gap_override = -1;
};

SceneConfig load_and_override(const CommonArgs& a) {
    SceneConfig cfg = load_config_file(a.config_path);
    if (a.seed_override >= 0) cfg.seed = static_cast<uint64_t>(a.seed_override);
    if (a.m_check_override >= -1) cfg.m_check = a.m_check_override;
    if (a.gap_override >= 1) cfg.frame_gap = a.gap_override;
    cfg.validate();
    return cfg;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Io("cannot create output dir: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Io("cannot write: " + path);
    out << text;
}

int cmd_simulate(const CommonArgs& a) {
    SceneConfig cfg = load_and_override(a);
    auto scatterers = scene_for_config(cfg);
    ensure_dir(a.out_dir);
    BeamPair beams = align_beams(cfg, scatterers, cfg.seed);
    EchoFrameSet echoes = synthesize_echoes(cfg, scatterers, beams, cfg.seed);

    const std::string dump = a.out_dir + "/echoes.bin";
    write_echo_dump(dump, echoes);

    const std::string truth_csv = a.out_dir + "/truth.csv";
    {
        std::ofstream out(truth_csv);
        if (!out) throw Io("cannot write: " + truth_csv);
        out << "frame,scatterer,range_m,delay_samples,doppler_hz,azimuth_rad,elevation_rad,gain\n";
        out.precision(12);
        for (int m = 0; m < echoes.frame_count; ++m) {
            const FrameTruth& ft = echoes.truth[static_cast<std::size_t>(m)];
            for (std::size_t p = 0; p < ft.range_m.size(); ++p) {
                out << m << "," << p << "," << ft.range_m[p] << "," << ft.sampled_delay[p] << ","
                    << ft.doppler_hz[p] << "," << ft.azimuth[p] << "," << ft.elevation[p] << ","
                    << ft.gain[p] << "\n";
            }
        }
    }

    RunManifest man;
    man.command = "simulate";
    man.seed = cfg.seed;
    man.config_text = config_to_text(cfg);
    man.add(dump);
    man.add(truth_csv);
    man.write(a.out_dir + "/manifest.txt");
    std::cout << "simulate: " << echoes.frame_count << " frames, " << echoes.samples_per_frame
              << " samples/frame -> " << a.out_dir << "\n";
    return 0;
}

int cmd_pipeline(const CommonArgs& a, bool flip) {
    SceneConfig cfg = load_and_override(a);
    auto scatterers = scene_for_config(cfg);
    ensure_dir(a.out_dir);
    PipelineResult res = run_pipeline(cfg, scatterers, cfg.seed);

    const std::string report_path = a.out_dir + "/report.txt";
    write_text(report_path, res.report.to_text());
    const std::string prof_path = a.out_dir + "/range_profile.csv";
    write_range_profile_csv(prof_path, res.range_prof, res.geo);
    const std::string img_path = a.out_dir + "/image.pgm";
    const IsarImage& img = flip ? res.image_flipped : res.image;
    write_pgm(img_path, img);
    const std::string csv_path = a.out_dir + "/image.csv";
    write_image_csv(csv_path, img);

    RunManifest man;
    man.command = "pipeline";
    man.seed = cfg.seed;
    man.config_text = config_to_text(cfg);
    man.add(report_path);
    man.add(prof_path);
    man.add(img_path);
    man.add(img_path + ".meta");
    man.add(csv_path);
    man.write(a.out_dir + "/manifest.txt");
    std::cout << "pipeline: v_hat = " << res.report.velocity_mps << " m/s, "
              << res.delays0.count() << " delays, image " << img.rows << "x" << img.cols << " -> "
              << a.out_dir << "\n";
    return 0;
}

int cmd_nmse_diff(const CommonArgs& a, int gap_lo, int gap_hi, int trials) {
    SceneConfig cfg = load_and_override(a);
    auto scatterers = scene_for_config(cfg);
    ensure_dir(a.out_dir);
    auto pts = nmse_diff_experiment(cfg, scatterers, gap_lo, gap_hi, trials);
    const std::string csv = a.out_dir + "/nmse_diff.csv";
    {
        std::ofstream out(csv);
        if (!out) throw Io("cannot write: " + csv);
        out << "i,median_with_preprocessing,mean_with_preprocessing,"
               "median_without_preprocessing,mean_without_preprocessing\n";
        out.precision(9);
        for (const auto& p : pts)
            out << p.gap << "," << p.median_pre << "," << p.mean_pre << "," << p.median_raw << ","
                << p.mean_raw << "\n";
    }
    RunManifest man;
    man.command = "nmse-diff";
    man.seed = cfg.seed;
    man.config_text = config_to_text(cfg);
    man.add(csv);
    man.write(a.out_dir + "/manifest.txt");
    std::cout << "nmse-diff: " << pts.size() << " gaps x " << trials << " trials -> " << csv << "\n";
    return 0;
}

int cmd_nmse_doppler(const CommonArgs& a, int m_lo, int m_hi, int step, int trials) {
    SceneConfig cfg = load_and_override(a);
    auto scatterers = scene_for_config(cfg);
    ensure_dir(a.out_dir);
    if (m_hi < 0) m_hi = cfg.frame_count() - 1;
    if (m_lo < 0) m_lo = cfg.frame_gap + 1;
    auto pts = nmse_doppler_experiment(cfg, scatterers, m_lo, m_hi, step, trials);
    const std::string csv = a.out_dir + "/nmse_doppler.csv";
    {
        std::ofstream out(csv);
        if (!out) throw Io("cannot write: " + csv);
        out << "m_check,nmse\n";
        out.precision(9);
        for (const auto& p : pts) out << p.m_check << "," << p.nmse << "\n";
    }
    RunManifest man;
    man.command = "nmse-doppler";
    man.seed = cfg.seed;
    man.config_text = config_to_text(cfg);
    man.add(csv);
    man.write(a.out_dir + "/manifest.txt");
    std::cout << "nmse-doppler: " << pts.size() << " points x " << trials << " trials -> " << csv
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IEEE 802.11ad-waveform ISAR simulation and estimation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    bool flip = true;
    int gap_lo = 1, gap_hi = 20, trials = 100;
    int m_lo = -1, m_hi = -1, m_step = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "config file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed_override, "override run seed");
        sub->add_option("--m-check", args.m_check_override, "override m_check (-1 = auto)");
        sub->add_option("--i", args.gap_override, "override frame gap i");
    };

    CLI::App* sim = app.add_subcommand("simulate", "synthesize echoes and ground truth");
    add_common(sim);
    CLI::App* pipe = app.add_subcommand("pipeline", "full estimation + imaging run");
    add_common(pipe);
    pipe->add_flag("--flip,!--no-flip", flip, "flip the cross-range axis of the written image");
    CLI::App* ndiff = app.add_subcommand("nmse-diff", "doppler-difference NMSE vs frame gap");
    add_common(ndiff);
    ndiff->add_option("--i-lo", gap_lo, "first frame gap");
    ndiff->add_option("--i-hi", gap_hi, "last frame gap");
    ndiff->add_option("--trials", trials, "monte-carlo trials");
    CLI::App* ndop = app.add_subcommand("nmse-doppler", "doppler NMSE vs m_check");
    add_common(ndop);
    ndop->add_option("--m-lo", m_lo, "sweep start (default i+1)");
    ndop->add_option("--m-hi", m_hi, "sweep end (default M-1)");
    ndop->add_option("--m-step", m_step, "sweep step");
    ndop->add_option("--trials", trials, "monte-carlo trials");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (pipe->parsed()) return cmd_pipeline(args, flip);
        if (ndiff->parsed()) return cmd_nmse_diff(args, gap_lo, gap_hi, trials);
        if (ndop->parsed()) return cmd_nmse_doppler(args, m_lo, m_hi, m_step, trials);
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return 0;
}
