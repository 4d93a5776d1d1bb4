#include "sshyb/scene.hpp"

#include "sshyb/errors.hpp"
#include "sshyb/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sshyb {

namespace {

void check_direction(const Direction& d, const char* what) {
    if (!std::isfinite(d.azimuth_rad) || !std::isfinite(d.inclination_rad)) {
        throw InvalidArgument(std::string("render: unsteerable ") + what +
                              " direction (non-finite angles)");
    }
}

// Mean power of the reference-mic row over [begin, n).
double ref_power(const Eigen::MatrixXd& stem, Eigen::Index begin) {
    const Eigen::Index n = stem.cols();
    if (begin >= n) {
        return 0.0;
    }
    return stem.row(0).segment(begin, n - begin).squaredNorm() /
           static_cast<double>(n - begin);
}

// Brick-wall band limit via a full-length one-sided FFT.
Eigen::VectorXd band_limit(const Eigen::VectorXd& x, double lo_hz, double hi_hz,
                           double fs) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    Eigen::VectorXcd spec;
    fft.fwd(spec, x);
    const Eigen::Index n = x.size();
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        if (f < lo_hz || f > hi_hz) {
            spec[k] = 0.0;
        }
    }
    Eigen::VectorXd out(n);
    fft.inv(out, spec);
    return out;
}

}  // namespace

Eigen::VectorXd speechlike_signal(std::uint64_t seed, int num_samples, int onset_samples,
                                  int sample_rate_hz) {
    if (num_samples <= 0 || sample_rate_hz <= 0) {
        throw InvalidArgument("speechlike_signal: sizes must be positive");
    }
    GaussianRng rng(seed);

    // Mild low-pass tilt: x[i] = w[i+1] + 0.7 w[i].
    Eigen::VectorXd white(num_samples + 1);
    for (int i = 0; i <= num_samples; ++i) {
        white[i] = rng.normal();
    }
    Eigen::VectorXd x(num_samples);
    for (int i = 0; i < num_samples; ++i) {
        x[i] = white[i + 1] + 0.7 * white[i];
    }

    // Syllabic envelope: noise on a 40 ms grid, linear interpolation,
    // half-wave rectified and compressed, with a small floor.
    const double grid_s = 0.04;
    const int grid_samples = std::max(1, static_cast<int>(std::lround(grid_s * sample_rate_hz)));
    const int env_points = num_samples / grid_samples + 2;
    Eigen::VectorXd env_noise(env_points);
    for (int i = 0; i < env_points; ++i) {
        env_noise[i] = rng.normal();
    }
    for (int i = 0; i < num_samples; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        const double pos = t / grid_s;
        const int k = std::min(static_cast<int>(pos), env_points - 2);
        const double frac = std::min(pos - k, 1.0);
        const double e = env_noise[k] + frac * (env_noise[k + 1] - env_noise[k]);
        const double shaped = std::pow(std::max(e, 0.0), 1.2) + 0.05;
        x[i] *= shaped;
    }

    for (int i = 0; i < std::min(onset_samples, num_samples); ++i) {
        x[i] = 0.0;
    }
    return x;
}

Eigen::MatrixXd render_plane_wave(const Eigen::VectorXd& dry, const AtfSet& atf,
                                  int dir_index, const StftConfig& cfg) {
    if (dir_index < 0 || dir_index >= atf.num_directions()) {
        throw InvalidArgument("render_plane_wave: direction index out of range");
    }
    const MultichannelSpectrum spec = analyze(dry, cfg);
    const int num_frames = spec.num_frames();
    const int bands = spec.bands();
    if (bands != atf.num_bands) {
        throw DimensionMismatch("render_plane_wave: STFT bands do not match the ATF set");
    }

    const int q = atf.num_mics;
    Eigen::MatrixXd out;
    std::vector<Eigen::VectorXcd> frames(static_cast<std::size_t>(num_frames));
    for (int c = 0; c < q; ++c) {
        for (int t = 0; t < num_frames; ++t) {
            Eigen::VectorXcd fr(bands);
            for (int f = 0; f < bands; ++f) {
                fr[f] = spec.frames[t](0, f) * atf.gain(dir_index, f, c);
            }
            frames[t] = std::move(fr);
        }
        const Eigen::VectorXd ch = synthesize(frames, cfg);
        if (c == 0) {
            out.resize(q, ch.size());
        }
        out.row(c) = ch.transpose();
    }
    return out;
}

RenderedScene render(const Scene& scene, const AtfSet& atf) {
    atf.validate();
    scene.stft.validate();
    if (scene.mic_positions_m.rows() != atf.num_mics) {
        throw DimensionMismatch("render: scene geometry does not match the ATF set");
    }
    if (scene.stft.bands() != atf.num_bands) {
        throw DimensionMismatch("render: STFT bands do not match the ATF set");
    }
    if (!(scene.duration_s > 0.0) || scene.target_onset_s < 0.0 ||
        scene.target_onset_s >= scene.duration_s) {
        throw InvalidArgument("render: need 0 <= target onset < duration");
    }
    if (scene.diffuse.enabled && scene.diffuse.num_plane_waves < 32) {
        throw InvalidArgument("render: diffuse approximation needs >= 32 plane waves");
    }
    check_direction(scene.target, "target");
    for (const auto& src : scene.interferers) {
        check_direction(src.direction, "interferer");
        if (!std::isfinite(src.level_db)) {
            throw InvalidArgument("render: interferer level must be finite");
        }
    }
    if (!std::isfinite(scene.diffuse.level_db)) {
        throw InvalidArgument("render: diffuse level must be finite");
    }

    const int fs = scene.stft.sample_rate_hz;
    const int n = static_cast<int>(std::lround(scene.duration_s * fs));
    const int onset = static_cast<int>(std::lround(scene.target_onset_s * fs));

    RenderedScene out;
    out.target_node = snap_to_grid(atf, scene.target);

    // Target stem.
    Eigen::VectorXd dry = speechlike_signal(derive_seed(scene.seed, 0), n, onset, fs);
    if (scene.target_band_hz) {
        dry = band_limit(dry, scene.target_band_hz->first, scene.target_band_hz->second,
                         static_cast<double>(fs));
        for (int i = 0; i < std::min(onset, n); ++i) {
            dry[i] = 0.0;  // keep the onset exactly silent after filtering
        }
    }
    out.target_stem = render_plane_wave(dry, atf, out.target_node, scene.stft);
    const Eigen::Index n_out = out.target_stem.cols();
    const Eigen::Index active_begin = std::min<Eigen::Index>(onset, n_out - 1);
    const double p_target = ref_power(out.target_stem, active_begin);
    if (!(p_target > 0.0)) {
        throw InvalidArgument("render: target stem has no energy in the active region");
    }

    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(atf.num_mics, n_out);

    // Point interferers, each scaled to its level relative to the target.
    for (std::size_t i = 0; i < scene.interferers.size(); ++i) {
        const SceneSource& src = scene.interferers[i];
        const int node = snap_to_grid(atf, src.direction);
        const Eigen::VectorXd dry_i =
            speechlike_signal(derive_seed(scene.seed, 1 + i), n, 0, fs);
        Eigen::MatrixXd stem = render_plane_wave(dry_i, atf, node, scene.stft);
        const double p_i = ref_power(stem, active_begin);
        if (p_i > 0.0) {
            stem *= std::sqrt(p_target * std::pow(10.0, src.level_db / 10.0) / p_i);
        }
        noise += stem;
    }

    // Diffuse field: equal-power plane waves at directions drawn by stratified
    // sampling of the cumulative quadrature weight, accumulated spectrally.
    if (scene.diffuse.enabled) {
        const int d_waves = scene.diffuse.num_plane_waves;
        const std::vector<double> quad = quadrature_weights(atf.n_phi, atf.n_theta);
        std::vector<double> cum(quad.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < quad.size(); ++i) {
            acc += quad[i];
            cum[i] = acc;
        }
        const double total = acc;

        GaussianRng dir_rng(derive_seed(scene.seed, 500));
        const double amp = std::sqrt(total / d_waves);

        std::vector<std::vector<Eigen::VectorXcd>> acc_frames;  // [q][t]
        int num_frames = 0;
        for (int k = 0; k < d_waves; ++k) {
            const double u = (k + dir_rng.uniform01()) / d_waves * total;
            const int dir = static_cast<int>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            const int dir_clamped = std::min<int>(dir, static_cast<int>(cum.size()) - 1);

            GaussianRng wave_rng(derive_seed(scene.seed, 1000 + k));
            Eigen::VectorXd white(n);
            for (int i = 0; i < n; ++i) {
                white[i] = amp * wave_rng.normal();
            }
            const MultichannelSpectrum spec = analyze(white, scene.stft);
            if (acc_frames.empty()) {
                num_frames = spec.num_frames();
                acc_frames.assign(
                    atf.num_mics,
                    std::vector<Eigen::VectorXcd>(
                        num_frames, Eigen::VectorXcd::Zero(atf.num_bands)));
            }
            for (int q = 0; q < atf.num_mics; ++q) {
                for (int t = 0; t < num_frames; ++t) {
                    for (int f = 0; f < atf.num_bands; ++f) {
                        acc_frames[q][t][f] +=
                            spec.frames[t](0, f) * atf.gain(dir_clamped, f, q);
                    }
                }
            }
        }
        Eigen::MatrixXd diffuse(atf.num_mics, n_out);
        for (int q = 0; q < atf.num_mics; ++q) {
            diffuse.row(q) = synthesize(acc_frames[q], scene.stft).transpose();
        }
        const double p_d = ref_power(diffuse, active_begin);
        if (p_d > 0.0) {
            diffuse *= std::sqrt(p_target * std::pow(10.0, scene.diffuse.level_db / 10.0) / p_d);
        }
        noise += diffuse;
    }

    // Overall SNR calibration on the summed noise.
    if (scene.snr_db) {
        const double p_n = ref_power(noise, active_begin);
        if (p_n > 0.0) {
            noise *= std::sqrt(p_target / p_n * std::pow(10.0, -*scene.snr_db / 10.0));
        }
    }

    out.noise_stem = noise;
    out.mixture = out.target_stem + noise;
    out.groundtruth = out.target_stem.row(0).transpose();
    return out;
}

Scene cocktail_preset(int n_sources, std::uint64_t seed, const Eigen::MatrixX3d& mics) {
    if (n_sources < 1 || n_sources > 3) {
        throw InvalidArgument("cocktail_preset: n_sources must be 1, 2, or 3");
    }
    Scene scene;
    scene.mic_positions_m = mics;
    scene.seed = seed;
    scene.duration_s = 6.0;
    scene.target_onset_s = 2.0;
    scene.snr_db = 0.0;

    // Target straight ahead on the horizontal ring (a grid node at 60 x 30).
    scene.target = Direction{0.0, std::numbers::pi / 2.0};

    // Interferers at seeded random grid nodes; levels match the target.
    GaussianRng rng(derive_seed(seed, 42));
    const int n_phi = 60;
    const int n_theta = 30;
    for (int i = 0; i < n_sources - 1; ++i) {
        const int iphi = static_cast<int>(rng.raw() % n_phi);
        const int itheta = static_cast<int>(rng.raw() % n_theta);
        Direction dir{2.0 * std::numbers::pi * iphi / n_phi,
                      std::numbers::pi * itheta / n_theta};
        scene.interferers.push_back({dir, 0.0});
    }

    // Diffuse bed a little above the talkers, mirroring a busy room.
    scene.diffuse.enabled = true;
    scene.diffuse.num_plane_waves = 64;
    scene.diffuse.level_db = 1.5;
    return scene;
}

}  // namespace sshyb
