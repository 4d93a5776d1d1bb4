#include "sshyb/metrics.hpp"

#include "sshyb/errors.hpp"
#include "sshyb/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace sshyb {

namespace {

constexpr double kTiny = 1e-300;

double mel_of_hz(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double hz_of_mel(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

struct FramePair {
    Eigen::MatrixXd ref;  // frames x frame_len
    Eigen::MatrixXd est;
};

// 50%-overlapped frames of both signals, truncated to the common length.
FramePair make_frames(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate,
                      const SegSnrConfig& cfg, int* frame_len_out) {
    if (reference.size() != estimate.size()) {
        throw DimensionMismatch("segmental SNR: reference/estimate length mismatch");
    }
    const int frame = static_cast<int>(std::lround(cfg.frame_ms * cfg.sample_rate_hz / 1000.0));
    if (frame <= 1) {
        throw InvalidArgument("segmental SNR: frame too short");
    }
    const int hop = frame / 2;
    const Eigen::Index n = reference.size();
    if (n < frame) {
        throw InvalidArgument("segmental SNR: signal shorter than one frame");
    }
    const Eigen::Index num = (n - frame) / hop + 1;
    FramePair out;
    out.ref.resize(num, frame);
    out.est.resize(num, frame);
    for (Eigen::Index t = 0; t < num; ++t) {
        out.ref.row(t) = reference.segment(t * hop, frame).transpose();
        out.est.row(t) = estimate.segment(t * hop, frame).transpose();
    }
    *frame_len_out = frame;
    return out;
}

// Activity mask: reference frame energy above (peak - threshold) dB.
Eigen::Array<bool, Eigen::Dynamic, 1> activity_mask(const Eigen::MatrixXd& ref_frames,
                                                    const SegSnrConfig& cfg) {
    Eigen::VectorXd energy = ref_frames.rowwise().squaredNorm();
    const double peak = energy.maxCoeff();
    if (!(peak > 0.0)) {
        throw InvalidArgument("segmental SNR: silent reference");
    }
    const double threshold = peak * std::pow(10.0, -cfg.activity_threshold_db / 10.0);
    return energy.array() > threshold;
}

}  // namespace

Eigen::MatrixXd mel_filterbank(int num_bands, int fft_len, int sample_rate_hz) {
    if (num_bands < 1 || fft_len < 2 || sample_rate_hz <= 0) {
        throw InvalidArgument("mel_filterbank: invalid geometry");
    }
    const int bins = fft_len / 2 + 1;
    const double mel_hi = mel_of_hz(sample_rate_hz / 2.0);
    Eigen::VectorXd edges(num_bands + 2);
    for (int j = 0; j < num_bands + 2; ++j) {
        edges[j] = hz_of_mel(mel_hi * j / (num_bands + 1));
    }
    Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(num_bands, bins);
    for (int j = 0; j < num_bands; ++j) {
        const double lo = edges[j];
        const double ce = edges[j + 1];
        const double hi = edges[j + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate_hz / fft_len;
            const double up = (f - lo) / std::max(ce - lo, kTiny);
            const double dn = (hi - f) / std::max(hi - ce, kTiny);
            bank(j, k) = std::max(0.0, std::min(up, dn));
        }
    }
    return bank;
}

double fw_seg_snr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate,
                  const SegSnrConfig& cfg) {
    int frame = 0;
    const FramePair fp = make_frames(reference, estimate, cfg, &frame);
    const auto active = activity_mask(fp.ref, cfg);

    const Eigen::MatrixXd bank = mel_filterbank(cfg.num_bands, frame, cfg.sample_rate_hz);
    const int bins = frame / 2 + 1;

    // Hann window inside each metric frame (periodic, = analysis window squared).
    Eigen::VectorXd window(frame);
    for (int i = 0; i < frame; ++i) {
        const double s = std::sin(std::numbers::pi * i / frame);
        window[i] = s * s;
    }

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    Eigen::VectorXcd spec_r(bins), spec_e(bins);
    Eigen::VectorXd buf(frame);

    double total = 0.0;
    int count = 0;
    for (Eigen::Index t = 0; t < fp.ref.rows(); ++t) {
        if (!active[t]) {
            continue;
        }
        buf = fp.ref.row(t).transpose().cwiseProduct(window);
        fft.fwd(spec_r, buf);
        buf = fp.est.row(t).transpose().cwiseProduct(window);
        fft.fwd(spec_e, buf);
        // Band powers of the reference and of the error spectrum. Using the
        // complex difference keeps the band SNR equal to the true in-band
        // signal-to-error power ratio (additive -20 dB noise scores ~20 dB).
        const Eigen::VectorXd pr = bank * spec_r.cwiseAbs2();
        const Eigen::VectorXd pd = bank * (spec_r - spec_e).cwiseAbs2();
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < cfg.num_bands; ++j) {
            const double w = std::pow(std::sqrt(pr[j]), cfg.weight_exponent);
            const double ratio = pr[j] / std::max(pd[j], kTiny);
            num += w * 10.0 * std::log10(std::max(ratio, kTiny));
            den += w;
        }
        const double snr = num / std::max(den, kTiny);
        total += std::clamp(snr, cfg.clip_floor_db, cfg.clip_ceil_db);
        ++count;
    }
    if (count == 0) {
        throw InvalidArgument("fw_seg_snr: no active reference frames");
    }
    return total / count;
}

double seg_snr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate,
               const SegSnrConfig& cfg) {
    int frame = 0;
    const FramePair fp = make_frames(reference, estimate, cfg, &frame);
    const auto active = activity_mask(fp.ref, cfg);

    double total = 0.0;
    int count = 0;
    for (Eigen::Index t = 0; t < fp.ref.rows(); ++t) {
        if (!active[t]) {
            continue;
        }
        const double num = fp.ref.row(t).squaredNorm();
        const double den = (fp.ref.row(t) - fp.est.row(t)).squaredNorm();
        const double snr = 10.0 * std::log10(num / std::max(den, kTiny));
        total += std::clamp(snr, cfg.clip_floor_db, cfg.clip_ceil_db);
        ++count;
    }
    if (count == 0) {
        throw InvalidArgument("seg_snr: no active reference frames");
    }
    return total / count;
}

double si_sdr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate) {
    if (reference.size() != estimate.size()) {
        throw DimensionMismatch("si_sdr: reference/estimate length mismatch");
    }
    const double ref_power = reference.squaredNorm();
    if (!(ref_power > 0.0)) {
        return -60.0;
    }
    const double alpha = estimate.dot(reference) / ref_power;
    const Eigen::VectorXd target = alpha * reference;
    const double num = target.squaredNorm();
    const double den = (estimate - target).squaredNorm();
    if (den <= num * 1e-12) {
        return 60.0;
    }
    if (!(num > 0.0)) {
        return -60.0;
    }
    return std::clamp(10.0 * std::log10(num / den), -60.0, 60.0);
}

double spectral_flux(const Eigen::VectorXd& audio, int sample_rate_hz, int frame_len,
                     int hop) {
    StftConfig cfg;
    cfg.sample_rate_hz = sample_rate_hz;
    cfg.frame_len_samples = frame_len;
    cfg.hop_samples = hop;
    cfg.fft_len = frame_len;
    const MultichannelSpectrum spec = analyze(audio, cfg);
    const int num_frames = spec.num_frames();
    const int bands = spec.bands();

    double flux = 0.0;
    double energy = 0.0;
    Eigen::VectorXd prev(bands), cur(bands);
    for (int t = 0; t < num_frames; ++t) {
        cur = spec.frames[t].row(0).cwiseAbs().transpose();
        energy += cur.squaredNorm();
        if (t > 0) {
            flux += (cur - prev).squaredNorm();
        }
        prev.swap(cur);
    }
    if (!(energy > 0.0) || num_frames < 2) {
        return 0.0;
    }
    return (flux / (num_frames - 1)) / (energy / num_frames);
}

}  // namespace sshyb
