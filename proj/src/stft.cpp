#include "sshyb/stft.hpp"

#include "sshyb/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace sshyb {

void StftConfig::validate() const {
    if (sample_rate_hz <= 0.0) {
        throw InvalidArgument("StftConfig: sample_rate_hz must be positive");
    }
    if (frame_len_samples <= 0 || hop_samples <= 0 || fft_len <= 0) {
        throw InvalidArgument("StftConfig: frame/hop/fft lengths must be positive");
    }
    if (fft_len < frame_len_samples) {
        throw InvalidArgument("StftConfig: fft_len must be >= frame_len_samples");
    }
    if (frame_len_samples != 2 * hop_samples) {
        throw InvalidArgument(
            "StftConfig: square-root-Hann overlap-add requires hop = frame_len/2");
    }
}

Eigen::VectorXd stft_window(int frame_len) {
    if (frame_len <= 0) {
        throw InvalidArgument("stft_window: frame_len must be positive");
    }
    Eigen::VectorXd w(frame_len);
    for (int n = 0; n < frame_len; ++n) {
        w[n] = std::sin(std::numbers::pi * n / frame_len);
    }
    return w;
}

MultichannelSpectrum analyze(const Eigen::MatrixXd& audio, const StftConfig& cfg) {
    cfg.validate();
    const Eigen::Index q = audio.rows();
    const Eigen::Index n = audio.cols();
    if (q == 0 || n == 0) {
        throw InvalidArgument("analyze: empty audio");
    }
    if (n < cfg.frame_len_samples) {
        throw InvalidArgument("analyze: signal shorter than one frame");
    }

    const int frame = cfg.frame_len_samples;
    const int hop = cfg.hop_samples;
    const int bands = cfg.bands();
    const Eigen::Index num_frames = (n - frame) / hop + 1;
    const Eigen::VectorXd window = stft_window(frame);

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

    MultichannelSpectrum spec;
    spec.config = cfg;
    spec.frames.resize(static_cast<std::size_t>(num_frames));

    Eigen::VectorXd buf = Eigen::VectorXd::Zero(cfg.fft_len);
    Eigen::VectorXcd out(bands);
    for (Eigen::Index t = 0; t < num_frames; ++t) {
        Eigen::MatrixXcd& fr = spec.frames[static_cast<std::size_t>(t)];
        fr.resize(q, bands);
        for (Eigen::Index c = 0; c < q; ++c) {
            buf.head(frame) =
                audio.row(c).segment(t * hop, frame).transpose().cwiseProduct(window);
            fft.fwd(out, buf);
            fr.row(c) = out.transpose();
        }
    }
    return spec;
}

MultichannelSpectrum analyze(const Eigen::VectorXd& audio, const StftConfig& cfg) {
    Eigen::MatrixXd mono(1, audio.size());
    mono.row(0) = audio.transpose();
    return analyze(mono, cfg);
}

MultichannelSpectrum analyze(const std::vector<Eigen::VectorXd>& channels,
                             const StftConfig& cfg) {
    if (channels.empty()) {
        throw InvalidArgument("analyze: empty audio");
    }
    const Eigen::Index n = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != n) {
            throw DimensionMismatch("analyze: channel length mismatch");
        }
    }
    Eigen::MatrixXd audio(static_cast<Eigen::Index>(channels.size()), n);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        audio.row(static_cast<Eigen::Index>(c)) = channels[c].transpose();
    }
    return analyze(audio, cfg);
}

Eigen::VectorXd synthesize(const std::vector<Eigen::VectorXcd>& frames,
                           const StftConfig& cfg) {
    cfg.validate();
    if (frames.empty()) {
        throw InvalidArgument("synthesize: no frames");
    }
    const int frame = cfg.frame_len_samples;
    const int hop = cfg.hop_samples;
    const int bands = cfg.bands();
    for (const auto& fr : frames) {
        if (fr.size() != bands) {
            throw DimensionMismatch("synthesize: spectrum band count mismatch");
        }
    }

    const Eigen::Index num_frames = static_cast<Eigen::Index>(frames.size());
    const Eigen::Index out_len = (num_frames - 1) * hop + frame;
    const Eigen::VectorXd window = stft_window(frame);

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(out_len);
    Eigen::VectorXcd spec(bands);
    Eigen::VectorXd time(cfg.fft_len);
    const bool even_fft = (cfg.fft_len % 2) == 0;
    for (Eigen::Index t = 0; t < num_frames; ++t) {
        spec = frames[static_cast<std::size_t>(t)];
        // A one-sided spectrum of a real signal has real DC (and Nyquist for
        // even lengths); enforce that so the inverse transform stays real.
        spec[0] = std::complex<double>(spec[0].real(), 0.0);
        if (even_fft) {
            spec[bands - 1] = std::complex<double>(spec[bands - 1].real(), 0.0);
        }
        fft.inv(time, spec);
        out.segment(t * hop, frame) += time.head(frame).cwiseProduct(window);
    }
    return out;
}

std::vector<Eigen::VectorXcd> channel_frames(const MultichannelSpectrum& spec, int channel) {
    if (channel < 0 || channel >= spec.channels()) {
        throw InvalidArgument("channel_frames: channel index out of range");
    }
    std::vector<Eigen::VectorXcd> out(spec.frames.size());
    for (std::size_t t = 0; t < spec.frames.size(); ++t) {
        out[t] = spec.frames[t].row(channel).transpose();
    }
    return out;
}

}  // namespace sshyb
