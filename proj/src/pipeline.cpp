#include "sshyb/pipeline.hpp"

#include "sshyb/beamform.hpp"
#include "sshyb/errors.hpp"
#include "sshyb/hybrid.hpp"
#include "sshyb/subspace.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <unordered_map>

namespace sshyb {

std::string to_string(Method m) {
    switch (m) {
        case Method::Passthrough: return "passthrough";
        case Method::Iso:         return "iso";
        case Method::MPDR:        return "mpdr";
        case Method::Hyb:         return "hyb";
        case Method::SSHyb:       return "ss-hyb";
        case Method::SSHybX:      return "ss-hybx";
    }
    throw InvalidArgument("to_string(Method): unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "passthrough") return Method::Passthrough;
    if (s == "iso")         return Method::Iso;
    if (s == "mpdr")        return Method::MPDR;
    if (s == "hyb")         return Method::Hyb;
    if (s == "ss-hyb")      return Method::SSHyb;
    if (s == "ss-hybx")     return Method::SSHybX;
    throw InvalidArgument("unknown method: " + s +
                          " (expected passthrough|iso|mpdr|hyb|ss-hyb|ss-hybx)");
}

namespace {

// Small LRU of built dictionaries so a rotating target that revisits nodes
// does not pay the build cost again.
class DictionaryCache {
  public:
    DictionaryCache(const AtfSet& atf, DictionaryConfig cfg, std::size_t capacity = 8)
        : atf_(atf), cfg_(std::move(cfg)), capacity_(capacity) {}

    const WeightDictionary& get(int node, int* builds) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].first == node) {
                if (i != 0) {
                    std::rotate(entries_.begin(), entries_.begin() + i,
                                entries_.begin() + i + 1);
                }
                return *entries_.front().second;
            }
        }
        Direction dir = atf_.direction(node);
        auto dict = std::make_shared<WeightDictionary>(build_dictionary(atf_, dir, cfg_));
        ++*builds;
        entries_.emplace_front(node, std::move(dict));
        if (entries_.size() > capacity_) {
            entries_.pop_back();
        }
        return *entries_.front().second;
    }

  private:
    const AtfSet& atf_;
    DictionaryConfig cfg_;
    std::size_t capacity_;
    std::deque<std::pair<int, std::shared_ptr<WeightDictionary>>> entries_;
};

int node_at_time(const AtfSet& atf, const std::vector<std::pair<double, Direction>>& track,
                 double t) {
    std::size_t k = 0;
    while (k + 1 < track.size() && track[k + 1].first <= t) {
        ++k;
    }
    return snap_to_grid(atf, track[k].second);
}

}  // namespace

EnhancementResult enhance(const Eigen::MatrixXd& audio, const AtfSet& atf,
                          const PipelineConfig& cfg) {
    cfg.stft.validate();
    atf.validate();
    if (audio.rows() != atf.num_mics) {
        throw DimensionMismatch("enhance: channel count does not match the ATF set");
    }
    if (cfg.stft.bands() != atf.num_bands) {
        throw DimensionMismatch("enhance: STFT band count does not match the ATF set");
    }
    if (cfg.target_track.empty()) {
        throw InvalidArgument("enhance: empty target track");
    }
    if (cfg.target_track.front().first > 0.0) {
        throw InvalidArgument("enhance: target track must cover the signal start");
    }
    for (std::size_t k = 1; k < cfg.target_track.size(); ++k) {
        if (!(cfg.target_track[k].first > cfg.target_track[k - 1].first)) {
            throw InvalidArgument("enhance: target track times must be increasing");
        }
    }

    const MultichannelSpectrum spec = analyze(audio, cfg.stft);
    const int num_frames = spec.num_frames();
    const int bands = spec.bands();
    const double fs = static_cast<double>(cfg.stft.sample_rate_hz);
    const double hop_s = cfg.stft.hop_samples / fs;

    EnhancementResult result;
    result.method_label = to_string(cfg.method);

    std::vector<Eigen::VectorXcd> out_frames(static_cast<std::size_t>(num_frames));

    if (cfg.method == Method::Passthrough) {
        for (int t = 0; t < num_frames; ++t) {
            out_frames[t] = spec.frames[t].row(0).transpose();
        }
        result.audio_out = synthesize(out_frames, cfg.stft);
        return result;
    }

    // Per-frame target node (piecewise-constant DOA track).
    std::vector<int> nodes(static_cast<std::size_t>(num_frames));
    for (int t = 0; t < num_frames; ++t) {
        nodes[t] = node_at_time(atf, cfg.target_track, t * hop_s);
    }

    int builds = 0;

    if (cfg.method == Method::Iso) {
        std::unordered_map<int, std::vector<Eigen::VectorXcd>> per_node;
        for (int t = 0; t < num_frames; ++t) {
            auto it = per_node.find(nodes[t]);
            if (it == per_node.end()) {
                std::vector<Eigen::VectorXcd> w(bands);
                for (int f = 0; f < bands; ++f) {
                    w[f] = mvdr_weights(ncm_isotropic(atf, f).m,
                                        steer_node(atf, nodes[t], f));
                }
                it = per_node.emplace(nodes[t], std::move(w)).first;
                ++builds;
            }
            Eigen::VectorXcd y(bands);
            for (int f = 0; f < bands; ++f) {
                y[f] = it->second[f].dot(spec.frames[t].col(f));
            }
            out_frames[t] = std::move(y);
        }
        result.dictionary_rebuilds = std::max(0, builds - 1);
        result.audio_out = synthesize(out_frames, cfg.stft);
        return result;
    }

    if (cfg.method == Method::MPDR) {
        std::vector<EmaCovTracker> trackers;
        trackers.reserve(bands);
        for (int f = 0; f < bands; ++f) {
            trackers.emplace_back(atf.num_mics, hop_s, cfg.T_mpdr_seconds);
        }
        std::unordered_map<int, std::vector<Eigen::VectorXcd>> steer_per_node;
        for (int t = 0; t < num_frames; ++t) {
            auto it = steer_per_node.find(nodes[t]);
            if (it == steer_per_node.end()) {
                std::vector<Eigen::VectorXcd> d(bands);
                for (int f = 0; f < bands; ++f) {
                    d[f] = steer_node(atf, nodes[t], f);
                }
                it = steer_per_node.emplace(nodes[t], std::move(d)).first;
            }
            Eigen::VectorXcd y(bands);
            for (int f = 0; f < bands; ++f) {
                y[f] = mpdr_step(trackers[f], spec.frames[t].col(f), it->second[f]).y;
            }
            out_frames[t] = std::move(y);
        }
        result.audio_out = synthesize(out_frames, cfg.stft);
        return result;
    }

    // Dictionary-based methods.
    DictionaryConfig dcfg;
    dcfg.pw_condition_cap = cfg.pw_condition_cap;
    switch (cfg.method) {
        case Method::Hyb:    dcfg.variant = cfg.dict_variant; break;
        case Method::SSHyb:  dcfg.variant = DictionaryVariant::SSHyb; break;
        case Method::SSHybX: dcfg.variant = DictionaryVariant::SSHybX; break;
        default: break;
    }
    DictionaryCache cache(atf, dcfg);

    const bool pca = cfg.method == Method::SSHyb || cfg.method == Method::SSHybX;
    PcaTracker pca_tracker(hop_s, cfg.T_pca_seconds);
    result.selections.resize(static_cast<std::size_t>(num_frames));
    if (pca) {
        result.eigvals.resize(static_cast<std::size_t>(num_frames));
    }

    for (int t = 0; t < num_frames; ++t) {
        const WeightDictionary& dict = cache.get(nodes[t], &builds);
        result.dictionary_models = dict.num_models();

        const HybridFrame hyb = hybrid_frame(dict, spec.frames[t]);
        result.selections[t] = hyb.selections;

        if (!pca) {
            out_frames[t] = hyb.y;
            continue;
        }

        // Iso reference from the same dictionary entry (model index 1), so the
        // pair fed to the PCA stage is exactly the Hybrid's candidate set.
        Eigen::MatrixX2cd z(bands, 2);
        z.col(0) = hyb.y;
        for (int f = 0; f < bands; ++f) {
            std::complex<double> y_iso(0.0, 0.0);
            const std::size_t base =
                (static_cast<std::size_t>(1) * dict.num_bands + f) * dict.num_mics;
            for (int q = 0; q < dict.num_mics; ++q) {
                y_iso += std::conj(dict.weights[base + q]) * spec.frames[t](q, f);
            }
            z(f, 1) = y_iso;
        }
        const SubspaceResult ss = pca_step(pca_tracker, z);
        result.eigvals[t] = {ss.lambda1, ss.lambda2};
        out_frames[t] = ss.y_out;
    }

    result.dictionary_rebuilds = std::max(0, builds - 1);
    result.audio_out = synthesize(out_frames, cfg.stft);
    return result;
}

}  // namespace sshyb
