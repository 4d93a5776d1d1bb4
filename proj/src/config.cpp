#include "sshyb/config.hpp"

#include "sshyb/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <numbers>
#include <set>
#include <string>

namespace sshyb {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("config: cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("config: " + path + " is not valid JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) {
        throw FormatError("config: " + where + " must be a JSON object");
    }
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw FormatError("config: unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

double number_at(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        throw FormatError("config: " + where + "." + key + " must be a number");
    }
    return obj[key].get<double>();
}

int int_at(const json& obj, const std::string& key, int fallback,
           const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number_integer()) {
        throw FormatError("config: " + where + "." + key + " must be an integer");
    }
    return obj[key].get<int>();
}

StftConfig parse_stft(const json& obj, const std::string& where) {
    reject_unknown_keys(
        obj, {"sample_rate_hz", "frame_len_samples", "hop_samples", "fft_len"}, where);
    StftConfig cfg;
    cfg.sample_rate_hz = int_at(obj, "sample_rate_hz", cfg.sample_rate_hz, where);
    cfg.frame_len_samples = int_at(obj, "frame_len_samples", cfg.frame_len_samples, where);
    cfg.hop_samples = int_at(obj, "hop_samples", cfg.hop_samples, where);
    cfg.fft_len = int_at(obj, "fft_len", cfg.fft_len, where);
    cfg.validate();
    return cfg;
}

Direction parse_direction(const json& obj, const std::string& where) {
    if (!obj.contains("azimuth_deg") || !obj.contains("inclination_deg")) {
        throw FormatError("config: " + where +
                          " needs both azimuth_deg and inclination_deg");
    }
    Direction d;
    d.azimuth_rad = number_at(obj, "azimuth_deg", 0.0, where) * kDegToRad;
    d.inclination_rad = number_at(obj, "inclination_deg", 0.0, where) * kDegToRad;
    return d;
}

Eigen::MatrixX3d parse_mics(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) {
        throw FormatError("config: " + where + " must be a non-empty array of [x,y,z]");
    }
    Eigen::MatrixX3d mics(static_cast<Eigen::Index>(arr.size()), 3);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_array() || arr[i].size() != 3) {
            throw FormatError("config: " + where + " entries must be [x,y,z] triples");
        }
        for (int k = 0; k < 3; ++k) {
            if (!arr[i][k].is_number()) {
                throw FormatError("config: " + where + " coordinates must be numbers");
            }
            mics(static_cast<Eigen::Index>(i), k) = arr[i][k].get<double>();
        }
    }
    return mics;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    const json root = load_json(path);
    reject_unknown_keys(root,
                        {"method", "stft", "T_mpdr_seconds", "T_pca_seconds",
                         "dict_variant", "pw_condition_cap", "target_track"},
                        "pipeline config");
    PipelineConfig cfg;
    if (root.contains("method")) {
        cfg.method = method_from_string(root["method"].get<std::string>());
    }
    if (root.contains("stft")) {
        cfg.stft = parse_stft(root["stft"], "stft");
    }
    cfg.T_mpdr_seconds =
        number_at(root, "T_mpdr_seconds", cfg.T_mpdr_seconds, "pipeline config");
    cfg.T_pca_seconds =
        number_at(root, "T_pca_seconds", cfg.T_pca_seconds, "pipeline config");
    if (root.contains("dict_variant")) {
        cfg.dict_variant =
            dictionary_variant_from_string(root["dict_variant"].get<std::string>());
    }
    cfg.pw_condition_cap =
        number_at(root, "pw_condition_cap", cfg.pw_condition_cap, "pipeline config");
    if (root.contains("target_track")) {
        const json& track = root["target_track"];
        if (!track.is_array() || track.empty()) {
            throw FormatError("config: target_track must be a non-empty array");
        }
        cfg.target_track.clear();
        for (const auto& entry : track) {
            reject_unknown_keys(entry, {"time_s", "azimuth_deg", "inclination_deg"},
                                "target_track entry");
            const double t = number_at(entry, "time_s", 0.0, "target_track entry");
            cfg.target_track.emplace_back(t, parse_direction(entry, "target_track entry"));
        }
    }
    return cfg;
}

Scene load_scene(const std::string& path) {
    const json root = load_json(path);
    reject_unknown_keys(root,
                        {"mics_m", "target", "interferers", "diffuse", "duration_s",
                         "target_onset_s", "snr_db", "target_band_hz", "seed", "stft"},
                        "scene");
    Scene scene;
    if (!root.contains("mics_m") || !root.contains("target")) {
        throw FormatError("config: scene needs mics_m and target");
    }
    scene.mic_positions_m = parse_mics(root["mics_m"], "mics_m");
    reject_unknown_keys(root["target"], {"azimuth_deg", "inclination_deg"}, "target");
    scene.target = parse_direction(root["target"], "target");

    if (root.contains("interferers")) {
        if (!root["interferers"].is_array()) {
            throw FormatError("config: interferers must be an array");
        }
        for (const auto& entry : root["interferers"]) {
            reject_unknown_keys(entry, {"azimuth_deg", "inclination_deg", "level_db"},
                                "interferer");
            SceneSource src;
            src.direction = parse_direction(entry, "interferer");
            src.level_db = number_at(entry, "level_db", 0.0, "interferer");
            scene.interferers.push_back(src);
        }
    }

    if (root.contains("diffuse")) {
        const json& d = root["diffuse"];
        reject_unknown_keys(d, {"enabled", "level_db", "num_plane_waves"}, "diffuse");
        if (d.contains("enabled")) {
            if (!d["enabled"].is_boolean()) {
                throw FormatError("config: diffuse.enabled must be a boolean");
            }
            scene.diffuse.enabled = d["enabled"].get<bool>();
        }
        scene.diffuse.level_db = number_at(d, "level_db", scene.diffuse.level_db, "diffuse");
        scene.diffuse.num_plane_waves =
            int_at(d, "num_plane_waves", scene.diffuse.num_plane_waves, "diffuse");
    } else {
        scene.diffuse.enabled = false;
    }

    scene.duration_s = number_at(root, "duration_s", scene.duration_s, "scene");
    scene.target_onset_s = number_at(root, "target_onset_s", scene.target_onset_s, "scene");
    if (root.contains("snr_db")) {
        if (root["snr_db"].is_null()) {
            scene.snr_db.reset();
        } else if (root["snr_db"].is_number()) {
            scene.snr_db = root["snr_db"].get<double>();
        } else {
            throw FormatError("config: snr_db must be a number or null");
        }
    }
    if (root.contains("target_band_hz")) {
        const json& band = root["target_band_hz"];
        if (!band.is_array() || band.size() != 2 || !band[0].is_number() ||
            !band[1].is_number()) {
            throw FormatError("config: target_band_hz must be [lo_hz, hi_hz]");
        }
        scene.target_band_hz = std::make_pair(band[0].get<double>(), band[1].get<double>());
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) {
            throw FormatError("config: seed must be a non-negative integer");
        }
        scene.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("stft")) {
        scene.stft = parse_stft(root["stft"], "stft");
    }
    return scene;
}

Eigen::MatrixX3d load_geometry(const std::string& path) {
    const json root = load_json(path);
    reject_unknown_keys(root, {"mics_m"}, "geometry");
    if (!root.contains("mics_m")) {
        throw FormatError("config: geometry needs mics_m");
    }
    return parse_mics(root["mics_m"], "mics_m");
}

}  // namespace sshyb
