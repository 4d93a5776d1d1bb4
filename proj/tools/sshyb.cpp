// sshyb: command-line surface for the two-stage multichannel enhancement
// toolkit. Subcommands: simulate | atf-gen | build-dict | enhance | evaluate.
#include <CLI11.hpp>
#include <json.hpp>

#include "sshyb/config.hpp"
#include "sshyb/containers.hpp"
#include "sshyb/errors.hpp"
#include "sshyb/metrics.hpp"
#include "sshyb/noise_fields.hpp"
#include "sshyb/pipeline.hpp"
#include "sshyb/scene.hpp"
#include "sshyb/spatial.hpp"
#include "sshyb/wav.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sshyb;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<double> rfft_frequencies(const StftConfig& stft) {
    std::vector<double> f(static_cast<std::size_t>(stft.bands()));
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = static_cast<double>(k) * stft.sample_rate_hz / stft.fft_len;
    }
    return f;
}

// Missing-ATF errors get a dedicated exit code so scripts can tell a wrong
// path apart from a malformed file.
constexpr int kExitMissingAtf = 2;

int require_atf_exists(const std::string& path) {
    if (!fs::exists(path)) {
        std::cerr << "error: ATF file not found: " << path << "\n";
        return kExitMissingAtf;
    }
    return 0;
}

// Run fn(i) for i in [0, n) on up to `jobs` threads; exceptions are collected
// and the first one is rethrown after all workers join.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------
struct SimulateArgs {
    std::string scene_path;
    int preset_sources = 0;  // 1..3 selects the preset instead of --scene
    std::string geometry_path;
    std::uint64_t seed = 0;
    std::string atf_path;
    int n_phi = 60;
    int n_theta = 30;
    std::string out_dir;
};

int run_simulate(const SimulateArgs& a) {
    Scene scene;
    if (!a.scene_path.empty()) {
        scene = load_scene(a.scene_path);
    } else if (a.preset_sources >= 1) {
        if (a.geometry_path.empty()) {
            std::cerr << "error: --preset requires --geometry\n";
            return 1;
        }
        scene = cocktail_preset(a.preset_sources, a.seed, load_geometry(a.geometry_path));
    } else {
        std::cerr << "error: simulate needs --scene or --preset\n";
        return 1;
    }

    AtfSet atf;
    if (!a.atf_path.empty()) {
        if (int rc = require_atf_exists(a.atf_path)) return rc;
        atf = read_atf(a.atf_path);
    } else {
        atf = freefield_atf(scene.mic_positions_m, a.n_phi, a.n_theta,
                            rfft_frequencies(scene.stft),
                            static_cast<double>(scene.stft.sample_rate_hz));
    }

    const RenderedScene r = render(scene, atf);

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    write_wav((dir / "mixture.wav").string(), r.mixture, scene.stft.sample_rate_hz);
    write_wav((dir / "target_stem.wav").string(), r.target_stem, scene.stft.sample_rate_hz);
    write_wav((dir / "noise_stem.wav").string(), r.noise_stem, scene.stft.sample_rate_hz);

    json manifest;
    manifest["mixture"] = "mixture.wav";
    manifest["target_stem"] = "target_stem.wav";
    manifest["noise_stem"] = "noise_stem.wav";
    manifest["sample_rate_hz"] = scene.stft.sample_rate_hz;
    manifest["num_mics"] = static_cast<int>(r.mixture.rows());
    manifest["num_samples"] = static_cast<std::int64_t>(r.mixture.cols());
    manifest["duration_s"] = scene.duration_s;
    manifest["target_onset_s"] = scene.target_onset_s;
    manifest["target_azimuth_deg"] = scene.target.azimuth_rad / kDegToRad;
    manifest["target_inclination_deg"] = scene.target.inclination_rad / kDegToRad;
    manifest["target_node"] = r.target_node;
    manifest["num_interferers"] = static_cast<int>(scene.interferers.size());
    manifest["diffuse_enabled"] = scene.diffuse.enabled;
    if (scene.snr_db) {
        manifest["snr_db"] = *scene.snr_db;
    } else {
        manifest["snr_db"] = nullptr;
    }
    manifest["seed"] = scene.seed;
    std::ofstream mf(dir / "manifest.json");
    if (!mf) {
        std::cerr << "error: cannot write " << (dir / "manifest.json").string() << "\n";
        return 1;
    }
    mf << manifest.dump(2) << "\n";
    mf.close();

    std::cout << "wrote mixture + 2 stems + manifest to " << a.out_dir << " ("
              << r.mixture.rows() << " channels, " << r.mixture.cols()
              << " samples, target node " << r.target_node << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
struct AtfGenArgs {
    std::string geometry_path;
    int n_phi = 60;
    int n_theta = 30;
    int sample_rate_hz = 10000;
    int fft_len = 160;
    double speed_of_sound = 343.0;
    std::string out_path;
};

int run_atf_gen(const AtfGenArgs& a) {
    const Eigen::MatrixX3d mics = load_geometry(a.geometry_path);
    StftConfig stft;
    stft.sample_rate_hz = a.sample_rate_hz;
    stft.fft_len = a.fft_len;
    const AtfSet atf = freefield_atf(mics, a.n_phi, a.n_theta, rfft_frequencies(stft),
                                     static_cast<double>(a.sample_rate_hz),
                                     a.speed_of_sound);
    write_atf(a.out_path, atf);
    std::cout << "wrote " << a.out_path << " (" << atf.num_mics << " mics, "
              << atf.n_phi << "x" << atf.n_theta << " grid, " << atf.num_bands
              << " bands)\n";
    return 0;
}

// ---------------------------------------------------------------------------
struct BuildDictArgs {
    std::string atf_path;
    double azimuth_deg = 0.0;
    double inclination_deg = 90.0;
    std::string variant = "ss-hyb";
    double condition_cap = 100.0;
    std::string out_path;
};

int run_build_dict(const BuildDictArgs& a) {
    if (int rc = require_atf_exists(a.atf_path)) return rc;
    const AtfSet atf = read_atf(a.atf_path);
    DictionaryConfig cfg;
    cfg.variant = dictionary_variant_from_string(a.variant);
    cfg.pw_condition_cap = a.condition_cap;
    const Direction target{a.azimuth_deg * kDegToRad, a.inclination_deg * kDegToRad};
    const WeightDictionary dict = build_dictionary(atf, target, cfg);
    write_dictionary(a.out_path, dict);
    std::cout << "wrote " << a.out_path << " (M=" << dict.num_models()
              << " models, target node " << dict.target_node << ", " << dict.num_bands
              << " bands x " << dict.num_mics << " mics)\n";
    return 0;
}

// ---------------------------------------------------------------------------
struct EnhanceArgs {
    std::vector<std::string> in_paths;
    std::string atf_path;
    std::string config_path;
    std::string method;
    double azimuth_deg = std::numeric_limits<double>::quiet_NaN();
    double inclination_deg = std::numeric_limits<double>::quiet_NaN();
    std::string out_path;
    std::string out_dir;
    int jobs = 1;
};

int run_enhance(const EnhanceArgs& a) {
    if (int rc = require_atf_exists(a.atf_path)) return rc;
    const AtfSet atf = read_atf(a.atf_path);

    PipelineConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_pipeline_config(a.config_path);
    }
    if (!a.method.empty()) {
        cfg.method = method_from_string(a.method);
    }
    if (!std::isnan(a.azimuth_deg) || !std::isnan(a.inclination_deg)) {
        Direction dir;
        dir.azimuth_rad = (std::isnan(a.azimuth_deg) ? 0.0 : a.azimuth_deg) * kDegToRad;
        dir.inclination_rad =
            (std::isnan(a.inclination_deg) ? 90.0 : a.inclination_deg) * kDegToRad;
        cfg.target_track = {{0.0, dir}};
    }

    const int n = static_cast<int>(a.in_paths.size());
    if (n == 0) {
        std::cerr << "error: enhance needs at least one --in file\n";
        return 1;
    }
    if (n == 1 && a.out_path.empty() && a.out_dir.empty()) {
        std::cerr << "error: enhance needs --out (single input) or --out-dir\n";
        return 1;
    }
    if (n > 1 && a.out_dir.empty()) {
        std::cerr << "error: multiple --in files need --out-dir\n";
        return 1;
    }
    if (!a.out_dir.empty()) {
        fs::create_directories(a.out_dir);
    }

    std::vector<std::string> out_paths(static_cast<std::size_t>(n));
    std::map<std::string, int> stem_count;
    for (int i = 0; i < n; ++i) {
        if (n == 1 && !a.out_path.empty()) {
            out_paths[0] = a.out_path;
        } else {
            const fs::path in(a.in_paths[static_cast<std::size_t>(i)]);
            ++stem_count[in.stem().string()];
        }
    }
    // Inputs sharing a basename (e.g. several scene dirs, each "mixture.wav")
    // get a 1-based input index in the output name instead of clobbering
    // a single "<stem>.enhanced.wav".
    for (int i = 0; i < n; ++i) {
        if (!out_paths[static_cast<std::size_t>(i)].empty()) {
            continue;  // single input with explicit --out
        }
        const fs::path in(a.in_paths[static_cast<std::size_t>(i)]);
        const std::string stem = in.stem().string();
        std::string name = stem + ".enhanced.wav";
        if (stem_count[stem] > 1) {
            name = stem + "." + std::to_string(i + 1) + ".enhanced.wav";
        }
        out_paths[static_cast<std::size_t>(i)] =
            (fs::path(a.out_dir) / name).string();
    }

    std::vector<std::string> reports(static_cast<std::size_t>(n));
    parallel_for(n, a.jobs, [&](int i) {
        const std::string& in_path = a.in_paths[static_cast<std::size_t>(i)];
        const WavData wav = read_wav(in_path);
        if (wav.sample_rate_hz != cfg.stft.sample_rate_hz) {
            throw InvalidArgument("enhance: " + in_path + " has sample rate " +
                                  std::to_string(wav.sample_rate_hz) + ", config expects " +
                                  std::to_string(cfg.stft.sample_rate_hz));
        }
        const EnhancementResult res = enhance(wav.samples, atf, cfg);
        write_wav(out_paths[static_cast<std::size_t>(i)], res.audio_out,
                  cfg.stft.sample_rate_hz);
        reports[static_cast<std::size_t>(i)] =
            in_path + ": method=" + res.method_label +
            " models=" + std::to_string(res.dictionary_models) +
            " rebuilds=" + std::to_string(res.dictionary_rebuilds) + " -> " +
            out_paths[static_cast<std::size_t>(i)];
    });
    for (const auto& line : reports) {
        std::cout << line << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
struct EvaluateArgs {
    std::string reference_path;
    std::vector<std::string> estimates;  // name=path
    std::string baseline;
    std::string trial = "trial0";
    std::string out_csv;
    int jobs = 1;
};

int run_evaluate(const EvaluateArgs& a) {
    const WavData ref_wav = read_wav(a.reference_path);
    const Eigen::VectorXd ref = ref_wav.samples.row(0).transpose();

    const int n = static_cast<int>(a.estimates.size());
    if (n == 0) {
        std::cerr << "error: evaluate needs at least one --estimate name=path\n";
        return 1;
    }
    std::vector<std::string> names(static_cast<std::size_t>(n));
    std::vector<std::string> paths(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::string& spec = a.estimates[static_cast<std::size_t>(i)];
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
            std::cerr << "error: --estimate must be name=path, got: " << spec << "\n";
            return 1;
        }
        names[static_cast<std::size_t>(i)] = spec.substr(0, eq);
        paths[static_cast<std::size_t>(i)] = spec.substr(eq + 1);
    }
    const std::string baseline = a.baseline.empty() ? names[0] : a.baseline;
    int baseline_idx = -1;
    for (int i = 0; i < n; ++i) {
        if (names[static_cast<std::size_t>(i)] == baseline) baseline_idx = i;
    }
    if (baseline_idx < 0) {
        std::cerr << "error: baseline '" << baseline << "' is not one of the estimates\n";
        return 1;
    }

    const char* metric_names[3] = {"fw_seg_snr_db", "seg_snr_db", "si_sdr_db"};
    std::vector<std::array<double, 3>> values(static_cast<std::size_t>(n));
    parallel_for(n, a.jobs, [&](int i) {
        const WavData est_wav = read_wav(paths[static_cast<std::size_t>(i)]);
        if (est_wav.sample_rate_hz != ref_wav.sample_rate_hz) {
            throw InvalidArgument("evaluate: sample rate mismatch for " +
                                  paths[static_cast<std::size_t>(i)]);
        }
        const Eigen::VectorXd est_full = est_wav.samples.row(0).transpose();
        const Eigen::Index m = std::min(ref.size(), est_full.size());
        const Eigen::VectorXd r = ref.head(m);
        const Eigen::VectorXd e = est_full.head(m);
        values[static_cast<std::size_t>(i)] = {fw_seg_snr(r, e), seg_snr(r, e),
                                               si_sdr(r, e)};
    });

    std::ofstream csv(a.out_csv);
    if (!csv) {
        std::cerr << "error: cannot write " << a.out_csv << "\n";
        return 1;
    }
    csv << "trial,method,metric,value,delta_vs_baseline\n";
    char line[256];
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) {
            const double v = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            const double d = v - values[static_cast<std::size_t>(baseline_idx)]
                                      [static_cast<std::size_t>(k)];
            std::snprintf(line, sizeof(line), "%s,%s,%s,%.17g,%.17g\n", a.trial.c_str(),
                          names[static_cast<std::size_t>(i)].c_str(), metric_names[k], v, d);
            csv << line;
        }
    }
    csv.close();

    std::printf("%-14s %14s %14s %14s   (baseline: %s)\n", "method", metric_names[0],
                metric_names[1], metric_names[2], baseline.c_str());
    for (int i = 0; i < n; ++i) {
        std::printf("%-14s %14.4f %14.4f %14.4f\n", names[static_cast<std::size_t>(i)].c_str(),
                    values[static_cast<std::size_t>(i)][0],
                    values[static_cast<std::size_t>(i)][1],
                    values[static_cast<std::size_t>(i)][2]);
    }
    std::cout << "wrote " << a.out_csv << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sshyb: two-stage multichannel speech enhancement "
        "(hybrid minimum-power beamforming + spectral PCA denoising)"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand(
        "simulate", "Render a synthetic cocktail-party scene to wave files");
    c_sim->add_option("--scene", sim.scene_path, "Scene description JSON file");
    c_sim->add_option("--preset", sim.preset_sources,
                      "Use the built-in cocktail preset with this many sources (1-3) "
                      "instead of --scene")
        ->check(CLI::Range(1, 3));
    c_sim->add_option("--geometry", sim.geometry_path,
                      "Mic geometry JSON ({\"mics_m\": [[x,y,z], ...]}); required with "
                      "--preset");
    c_sim->add_option("--seed", sim.seed, "Scene seed for --preset (default 0)");
    c_sim->add_option("--atf", sim.atf_path,
                      "ATF container to render through (default: free-field ATFs "
                      "computed from the scene's mic geometry)");
    c_sim->add_option("--n-phi", sim.n_phi,
                      "Azimuth grid size for the computed ATF set (default 60)");
    c_sim->add_option("--n-theta", sim.n_theta,
                      "Inclination grid size for the computed ATF set (default 30)");
    c_sim->add_option("--out-dir", sim.out_dir,
                      "Output directory for mixture.wav, target_stem.wav, "
                      "noise_stem.wav, manifest.json")
        ->required();

    AtfGenArgs ag;
    CLI::App* c_atf = app.add_subcommand(
        "atf-gen", "Compute free-field array transfer functions on a spherical grid");
    c_atf->add_option("--geometry", ag.geometry_path,
                      "Mic geometry JSON ({\"mics_m\": [[x,y,z], ...]})")
        ->required();
    c_atf->add_option("--n-phi", ag.n_phi, "Azimuth grid size (default 60)");
    c_atf->add_option("--n-theta", ag.n_theta, "Inclination grid size, even (default 30)");
    c_atf->add_option("--sample-rate", ag.sample_rate_hz, "Sample rate in Hz (default 10000)");
    c_atf->add_option("--fft", ag.fft_len,
                      "FFT length defining the band grid (default 160 -> 81 bands)");
    c_atf->add_option("--speed-of-sound", ag.speed_of_sound,
                      "Speed of sound in m/s (default 343)");
    c_atf->add_option("--out", ag.out_path, "Output ATF container path")->required();

    BuildDictArgs bd;
    CLI::App* c_dict = app.add_subcommand(
        "build-dict", "Precompute the per-band beamformer weight dictionary for a "
                      "steering direction");
    c_dict->add_option("--atf", bd.atf_path, "ATF container")->required();
    c_dict->add_option("--azimuth-deg", bd.azimuth_deg,
                       "Target azimuth in degrees (default 0)");
    c_dict->add_option("--inclination-deg", bd.inclination_deg,
                       "Target inclination in degrees, 90 = horizontal (default 90)");
    c_dict->add_option("--variant", bd.variant,
                       "Dictionary variant: ss-hyb (302 models on a 60x30 grid) or "
                       "ss-hybx (adds one plane-wave model per grid direction)")
        ->check(CLI::IsMember({"ss-hyb", "ss-hybx"}));
    c_dict->add_option("--condition-cap", bd.condition_cap,
                       "Condition-number cap for plane-wave models (default 100)");
    c_dict->add_option("--out", bd.out_path, "Output dictionary container path")->required();

    EnhanceArgs en;
    CLI::App* c_enh = app.add_subcommand(
        "enhance", "Run the enhancement pipeline over one or more multichannel "
                   "wave files");
    c_enh->add_option("--in", en.in_paths, "Input multichannel wave file (repeatable)")
        ->required();
    c_enh->add_option("--atf", en.atf_path, "ATF container matching the recording array")
        ->required();
    c_enh->add_option("--config", en.config_path,
                      "Pipeline config JSON (defaults used when omitted)");
    c_enh->add_option("--method", en.method,
                      "Override the configured method: "
                      "passthrough|iso|mpdr|hyb|ss-hyb|ss-hybx")
        ->check(CLI::IsMember({"passthrough", "iso", "mpdr", "hyb", "ss-hyb", "ss-hybx"}));
    c_enh->add_option("--azimuth-deg", en.azimuth_deg,
                      "Override the target azimuth in degrees (fixed-direction track)");
    c_enh->add_option("--inclination-deg", en.inclination_deg,
                      "Override the target inclination in degrees (default 90 when "
                      "--azimuth-deg is given)");
    c_enh->add_option("--out", en.out_path, "Output wave file (single --in only)");
    c_enh->add_option("--out-dir", en.out_dir,
                      "Output directory for batch runs; files named "
                      "<input stem>.enhanced.wav (an input index is inserted "
                      "when stems collide)");
    c_enh->add_option("--jobs", en.jobs, "Parallel workers across input files (default 1)")
        ->check(CLI::PositiveNumber);

    EvaluateArgs ev;
    CLI::App* c_eval = app.add_subcommand(
        "evaluate", "Score enhanced files against a ground-truth reference and "
                    "write a CSV table");
    c_eval->add_option("--reference", ev.reference_path,
                       "Ground-truth reference wave file (channel 0 used)")
        ->required();
    c_eval->add_option("--estimate", ev.estimates,
                       "Estimate as name=path (repeatable); names label CSV rows")
        ->required();
    c_eval->add_option("--baseline", ev.baseline,
                       "Estimate name the delta column is relative to (default: the "
                       "first --estimate)");
    c_eval->add_option("--trial", ev.trial, "Trial label for the CSV (default trial0)");
    c_eval->add_option("--out", ev.out_csv, "Output CSV path")->required();
    c_eval->add_option("--jobs", ev.jobs, "Parallel workers across estimates (default 1)")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_atf->parsed()) return run_atf_gen(ag);
        if (c_dict->parsed()) return run_build_dict(bd);
        if (c_enh->parsed()) return run_enhance(en);
        if (c_eval->parsed()) return run_evaluate(ev);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
