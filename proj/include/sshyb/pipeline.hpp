#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sshyb/noise_fields.hpp"
#include "sshyb/spatial.hpp"
#include "sshyb/stft.hpp"

namespace sshyb {

enum class Method { Passthrough, Iso, MPDR, Hyb, SSHyb, SSHybX };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct PipelineConfig {
    StftConfig stft;                 // defaults: 10 kHz / 16 ms / 8 ms
    double T_mpdr_seconds = 0.050;
    double T_pca_seconds = 0.080;
    DictionaryVariant dict_variant = DictionaryVariant::SSHyb;  // for method Hyb
    double pw_condition_cap = 100.0;
    Method method = Method::SSHyb;
    // Piecewise-constant target DOA track: (time_s, direction), sorted by
    // time; the entry with the largest time <= frame start applies.  Default:
    // front of the array on the horizontal plane (azimuth 0, inclination 90).
    std::vector<std::pair<double, Direction>> target_track = {
        {0.0, Direction{0.0, std::numbers::pi / 2.0}}};
};

struct EnhancementResult {
    Eigen::VectorXd audio_out;               // (frames-1)*hop + frame_len samples
    std::string method_label;
    int dictionary_models = 0;               // M (0 for methods without a dictionary)
    int dictionary_rebuilds = 0;             // target-node changes during the run
    std::vector<std::vector<int>> selections;         // per frame, per band (Hyb/SS-Hyb*)
    std::vector<std::pair<double, double>> eigvals;   // per frame (l1, l2) (SS-Hyb*)
};

// Fig-style two-stage chain: STFT -> {Hybrid, Iso} per bin -> frame-wise PCA
// -> inverse STFT; baselines (passthrough / iso / MPDR / Hyb-only) run through
// the identical STFT chain.
EnhancementResult enhance(const Eigen::MatrixXd& audio, const AtfSet& atf,
                          const PipelineConfig& cfg);

}  // namespace sshyb
