#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sshyb {

struct SegSnrConfig {
    int sample_rate_hz = 10000;
    double frame_ms = 16.0;
    double clip_floor_db = -10.0;
    double clip_ceil_db = 35.0;
    double activity_threshold_db = 40.0;  // frames above (peak - 40 dB) count
    int num_bands = 25;                   // fw_seg_snr only
    double weight_exponent = 0.2;         // fw_seg_snr only: W = X_ref^0.2
};

// 25 triangular mel-spaced bands evaluated on the one-sided bin grid
// (num_bins = fft_len/2 + 1). Row j = band j's bin weights.
Eigen::MatrixXd mel_filterbank(int num_bands, int fft_len, int sample_rate_hz);

// Frequency-weighted segmental SNR: per 16 ms Hann frame, 25 mel bands,
// band signal power P_j = sum_k tri_j(k) |X_ref(k)|^2, band error power
// D_j = sum_k tri_j(k) |X_ref(k) - X_est(k)|^2, weights W_j = sqrt(P_j)^0.2,
// frame SNR = sum_j W_j 10log10(P_j/D_j) / sum_j W_j, clipped to [-10, 35] dB,
// averaged over reference-active frames.
double fw_seg_snr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate,
                  const SegSnrConfig& cfg = {});

// Plain segmental SNR: per-frame 10log10(sum ref^2 / sum (ref-est)^2),
// same clipping and activity rule, no band weighting.
double seg_snr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate,
               const SegSnrConfig& cfg = {});

// Scale-invariant SDR: project estimate onto reference,
// 10log10(|target|^2/|residual|^2), clamped to [-60, 60] dB.
double si_sdr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate);

// Musical-noise proxy: mean frame-to-frame magnitude-spectrum flux
// normalized by mean frame energy (STFT with the given frame/hop geometry).
double spectral_flux(const Eigen::VectorXd& audio, int sample_rate_hz = 10000,
                     int frame_len = 160, int hop = 80);

}  // namespace sshyb
