#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sshyb {

// Frame/hop/FFT geometry of the analysis-synthesis chain.
// 50% overlap is required: the sqrt-Hann pair satisfies COLA exactly only
// when frame_len_samples == 2 * hop_samples.
struct StftConfig {
    int sample_rate_hz = 10000;
    int frame_len_samples = 160;  // 16 ms at 10 kHz
    int hop_samples = 80;         // 8 ms
    int fft_len = 160;            // == frame_len -> F = 81, no zero-pad

    int bands() const { return fft_len / 2 + 1; }
    void validate() const;  // throws InvalidArgument on a broken invariant
};

// TF-domain signal: one Q x F complex matrix per frame.
struct MultichannelSpectrum {
    StftConfig config;
    std::vector<Eigen::MatrixXcd> frames;  // each Q x F

    int num_frames() const { return static_cast<int>(frames.size()); }
    int channels() const { return frames.empty() ? 0 : static_cast<int>(frames[0].rows()); }
    int bands() const { return frames.empty() ? 0 : static_cast<int>(frames[0].cols()); }
};

// Analysis window a[n] = sin(pi*n/frame_len); used for synthesis as well,
// so the combined response is Hann and overlap-add reconstructs exactly.
Eigen::VectorXd stft_window(int frame_len);

// audio: Q x N real samples. Frames = floor((N - frame_len)/hop) + 1.
MultichannelSpectrum analyze(const Eigen::MatrixXd& audio, const StftConfig& cfg);

// Single-channel synthesis: frames are 1 x F (or F-length rows of a matrix).
// Output length (num_frames - 1)*hop + frame_len; only the interior
// (one frame trimmed at each edge) is declared valid.
Eigen::VectorXd synthesize(const std::vector<Eigen::VectorXcd>& frames, const StftConfig& cfg);

// Convenience: analyze one channel / collect channel c of a spectrum.
MultichannelSpectrum analyze(const Eigen::VectorXd& audio, const StftConfig& cfg);
// Channel list form; throws DimensionMismatch if channel lengths differ.
MultichannelSpectrum analyze(const std::vector<Eigen::VectorXd>& channels,
                             const StftConfig& cfg);
std::vector<Eigen::VectorXcd> channel_frames(const MultichannelSpectrum& spec, int c);

}  // namespace sshyb
