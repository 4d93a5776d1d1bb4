#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sshyb/spatial.hpp"
#include "sshyb/stft.hpp"

namespace sshyb {

// Synthetic cocktail-party description. All signals are generated from the
// seed; levels are powers relative to the target stem at the reference mic
// over the target-active region.
struct SceneSource {
    Direction direction;
    double level_db = 0.0;  // relative to target (interferers only)
};

struct DiffuseSpec {
    double level_db = 0.0;
    int num_plane_waves = 64;  // >= 32 for the isotropic approximation
    bool enabled = true;
};

struct Scene {
    Eigen::MatrixX3d mic_positions_m;  // Q x 3, mic 0 = reference at origin
    // Default target: front of the array on the horizontal plane.
    Direction target{0.0, std::numbers::pi / 2.0};
    std::vector<SceneSource> interferers;
    DiffuseSpec diffuse;
    double duration_s = 6.0;
    double target_onset_s = 2.0;
    // Optional overall SNR: scale the summed noise stems so the reference-mic
    // SNR over the target-active region equals this value.
    std::optional<double> snr_db = 0.0;
    // Optional band limit applied to the dry target signal [lo_hz, hi_hz].
    std::optional<std::pair<double, double>> target_band_hz;
    std::uint64_t seed = 0;
    StftConfig stft;  // render-side analysis/synthesis geometry
};

struct RenderedScene {
    Eigen::MatrixXd mixture;       // Q x N (sum of all stems, exact)
    Eigen::VectorXd groundtruth;   // target stem at the reference mic
    Eigen::MatrixXd target_stem;   // Q x N
    Eigen::MatrixXd noise_stem;    // Q x N (interferers + diffuse, post-scaling)
    int target_node = -1;          // grid node the target was rendered from
};

// Deterministic white-ish noise with a syllabic envelope; zero before onset.
Eigen::VectorXd speechlike_signal(std::uint64_t seed, int num_samples, int onset_samples,
                                  int sample_rate_hz);

// Place a dry signal at a grid direction: per-band multiplication of the
// signal's STFT with the node's ATF gains, then synthesis per channel.
Eigen::MatrixXd render_plane_wave(const Eigen::VectorXd& dry, const AtfSet& atf,
                                  int dir_index, const StftConfig& cfg);

// Full scene render. Stems sum exactly to the mixture (mixture := sum).
RenderedScene render(const Scene& scene, const AtfSet& atf);

// Scene presets mirroring the nSources = 1..3 grouping.
Scene cocktail_preset(int n_sources, std::uint64_t seed, const Eigen::MatrixX3d& mics);

}  // namespace sshyb
