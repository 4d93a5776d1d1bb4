#pragma once

#include <Eigen/Dense>
#include <string>

namespace sshyb {

struct WavData {
    Eigen::MatrixXd samples;  // channels x N, in [-1, 1] nominal range
    int sample_rate_hz = 0;
};

// Reads PCM16 or IEEE float32 RIFF/WAVE files.
WavData read_wav(const std::string& path);

// Writes IEEE float32 (format 3) — exact round-trip for rendered stems, so
// repeated runs with one seed produce byte-identical files.
void write_wav(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate_hz);
void write_wav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate_hz);

}  // namespace sshyb
