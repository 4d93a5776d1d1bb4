// Python bindings for the core operations: ATF generation, scene simulation,
// enhancement, and metrics. Numpy arrays map to Eigen types directly.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sshyb/containers.hpp"
#include "sshyb/errors.hpp"
#include "sshyb/metrics.hpp"
#include "sshyb/noise_fields.hpp"
#include "sshyb/pipeline.hpp"
#include "sshyb/scene.hpp"
#include "sshyb/spatial.hpp"
#include "sshyb/stft.hpp"
#include "sshyb/wav.hpp"

#include <numbers>
#include <optional>
#include <utility>

namespace py = pybind11;
using namespace sshyb;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<double> rfft_frequencies(int fft_len, double fs) {
    std::vector<double> f(static_cast<std::size_t>(fft_len / 2 + 1));
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = static_cast<double>(k) * fs / fft_len;
    }
    return f;
}

AtfSet make_freefield_atf(const Eigen::MatrixX3d& mics, int n_phi, int n_theta,
                          int sample_rate_hz, int fft_len, double speed_of_sound) {
    return freefield_atf(mics, n_phi, n_theta,
                         rfft_frequencies(fft_len, static_cast<double>(sample_rate_hz)),
                         static_cast<double>(sample_rate_hz), speed_of_sound);
}

py::dict enhance_py(const Eigen::MatrixXd& audio, const AtfSet& atf,
                    const std::string& method, double azimuth_deg, double inclination_deg,
                    double pw_condition_cap, double T_mpdr_seconds, double T_pca_seconds) {
    PipelineConfig cfg;
    cfg.method = method_from_string(method);
    cfg.pw_condition_cap = pw_condition_cap;
    cfg.T_mpdr_seconds = T_mpdr_seconds;
    cfg.T_pca_seconds = T_pca_seconds;
    cfg.target_track = {
        {0.0, Direction{azimuth_deg * kDegToRad, inclination_deg * kDegToRad}}};
    const EnhancementResult res = enhance(audio, atf, cfg);
    py::dict out;
    out["audio"] = res.audio_out;
    out["method"] = res.method_label;
    out["models"] = res.dictionary_models;
    out["rebuilds"] = res.dictionary_rebuilds;
    return out;
}

py::dict render_preset_py(int n_sources, std::uint64_t seed, const Eigen::MatrixX3d& mics,
                          const AtfSet& atf) {
    const Scene scene = cocktail_preset(n_sources, seed, mics);
    const RenderedScene r = render(scene, atf);
    py::dict out;
    out["mixture"] = r.mixture;
    out["groundtruth"] = r.groundtruth;
    out["target_stem"] = r.target_stem;
    out["noise_stem"] = r.noise_stem;
    out["target_node"] = r.target_node;
    out["target_azimuth_deg"] = scene.target.azimuth_rad / kDegToRad;
    out["target_inclination_deg"] = scene.target.inclination_rad / kDegToRad;
    out["sample_rate_hz"] = scene.stft.sample_rate_hz;
    return out;
}

py::tuple read_wav_py(const std::string& path) {
    const WavData wav = read_wav(path);
    return py::make_tuple(wav.samples, wav.sample_rate_hz);
}

}  // namespace

PYBIND11_MODULE(_sshyb, m) {
    m.doc() = "Two-stage multichannel speech enhancement: hybrid minimum-power "
              "beamforming followed by spectral PCA denoising.";

    py::register_exception<Error>(m, "SshybError");

    py::class_<AtfSet>(m, "AtfSet", "Array transfer functions on a spherical grid")
        .def_readonly("n_phi", &AtfSet::n_phi)
        .def_readonly("n_theta", &AtfSet::n_theta)
        .def_readonly("num_mics", &AtfSet::num_mics)
        .def_readonly("num_bands", &AtfSet::num_bands)
        .def_readonly("sample_rate_hz", &AtfSet::sample_rate_hz)
        .def("__repr__", [](const AtfSet& a) {
            return "AtfSet(" + std::to_string(a.num_mics) + " mics, " +
                   std::to_string(a.n_phi) + "x" + std::to_string(a.n_theta) +
                   " grid, " + std::to_string(a.num_bands) + " bands)";
        });

    m.def("freefield_atf", &make_freefield_atf, py::arg("mic_positions_m"),
          py::arg("n_phi") = 60, py::arg("n_theta") = 30,
          py::arg("sample_rate_hz") = 10000, py::arg("fft_len") = 160,
          py::arg("speed_of_sound") = 343.0,
          "Free-field plane-wave ATFs for a mic array (rows = [x, y, z] in meters).");
    m.def("read_atf", &read_atf, py::arg("path"), "Load an ATF container.");
    m.def("write_atf", &write_atf, py::arg("path"), py::arg("atf"),
          "Write an ATF container.");

    m.def("enhance", &enhance_py, py::arg("audio"), py::arg("atf"),
          py::arg("method") = "ss-hyb", py::arg("azimuth_deg") = 0.0,
          py::arg("inclination_deg") = 90.0, py::arg("pw_condition_cap") = 100.0,
          py::arg("T_mpdr_seconds") = 0.050, py::arg("T_pca_seconds") = 0.080,
          "Run the enhancement pipeline on a (channels x samples) array; returns a "
          "dict with keys audio, method, models, rebuilds.");

    m.def("render_preset", &render_preset_py, py::arg("n_sources"), py::arg("seed"),
          py::arg("mic_positions_m"), py::arg("atf"),
          "Render the built-in cocktail-party preset (1-3 sources) through an ATF "
          "set; returns mixture, groundtruth, stems, and the target grid node.");

    m.def("fw_seg_snr",
          [](const Eigen::VectorXd& ref, const Eigen::VectorXd& est) {
              return fw_seg_snr(ref, est);
          },
          py::arg("reference"), py::arg("estimate"),
          "Frequency-weighted segmental SNR in dB (clipped to [-10, 35]).");
    m.def("seg_snr",
          [](const Eigen::VectorXd& ref, const Eigen::VectorXd& est) {
              return seg_snr(ref, est);
          },
          py::arg("reference"), py::arg("estimate"),
          "Segmental SNR in dB (clipped to [-10, 35]).");
    m.def("si_sdr", &si_sdr, py::arg("reference"), py::arg("estimate"),
          "Scale-invariant SDR in dB (clamped to [-60, 60]).");
    m.def("spectral_flux",
          [](const Eigen::VectorXd& audio, int sample_rate_hz) {
              return spectral_flux(audio, sample_rate_hz);
          },
          py::arg("audio"), py::arg("sample_rate_hz") = 10000,
          "Normalized frame-to-frame magnitude-spectrum flux (musical-noise proxy).");

    m.def("read_wav", &read_wav_py, py::arg("path"),
          "Read a PCM16/float32 wave file; returns (samples, sample_rate_hz).");
    m.def("write_wav",
          [](const std::string& path, const Eigen::MatrixXd& samples, int rate) {
              write_wav(path, samples, rate);
          },
          py::arg("path"), py::arg("samples"), py::arg("sample_rate_hz"),
          "Write a float32 wave file from a (channels x samples) array.");
}
