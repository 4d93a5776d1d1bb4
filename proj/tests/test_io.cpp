#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sshyb/config.hpp"
#include "sshyb/containers.hpp"
#include "sshyb/errors.hpp"
#include "sshyb/noise_fields.hpp"
#include "sshyb/spatial.hpp"
#include "sshyb/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

using namespace sshyb;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Scratch file that cleans up after itself.
struct TmpFile {
    fs::path path;
    explicit TmpFile(const std::string& name)
        : path(fs::temp_directory_path() / ("sshyb_test_" + name)) {
        fs::remove(path);
    }
    ~TmpFile() { fs::remove(path); }
    std::string str() const { return path.string(); }
};

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(static_cast<bool>(out));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void push_u16(std::vector<char>& v, std::uint16_t x) {
    v.push_back(static_cast<char>(x & 0xff));
    v.push_back(static_cast<char>((x >> 8) & 0xff));
}

void push_u32(std::vector<char>& v, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) {
        v.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
    }
}

void push_tag(std::vector<char>& v, const char* tag) {
    v.insert(v.end(), tag, tag + 4);
}

std::vector<char> pcm16_file(const std::vector<std::int16_t>& interleaved, int channels,
                             int rate) {
    std::vector<char> v;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(2 * interleaved.size());
    push_tag(v, "RIFF");
    push_u32(v, 36 + data_bytes);
    push_tag(v, "WAVE");
    push_tag(v, "fmt ");
    push_u32(v, 16);
    push_u16(v, 1);  // PCM
    push_u16(v, static_cast<std::uint16_t>(channels));
    push_u32(v, static_cast<std::uint32_t>(rate));
    push_u32(v, static_cast<std::uint32_t>(rate * channels * 2));
    push_u16(v, static_cast<std::uint16_t>(channels * 2));
    push_u16(v, 16);
    push_tag(v, "data");
    push_u32(v, data_bytes);
    for (std::int16_t s : interleaved) {
        push_u16(v, static_cast<std::uint16_t>(s));
    }
    return v;
}

std::vector<double> rfft_frequencies(int fft_len, double fs) {
    std::vector<double> f(fft_len / 2 + 1);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = static_cast<double>(k) * fs / fft_len;
    }
    return f;
}

AtfSet small_atf() {
    Eigen::MatrixX3d mics(2, 3);
    mics << 0.0, 0.0, 0.0, 0.0, -0.08, 0.0;
    return freefield_atf(mics, 12, 6, rfft_frequencies(160, 10000.0), 10000.0);
}

}  // namespace

TEST_CASE("wav: float32 round trip is float-exact and byte-deterministic") {
    TmpFile f1("rt1.wav");
    TmpFile f2("rt2.wav");
    Eigen::MatrixXd x(3, 500);
    for (int q = 0; q < 3; ++q) {
        for (int i = 0; i < 500; ++i) {
            x(q, i) = std::sin(0.37 * i + q) * 0.9;
        }
    }
    write_wav(f1.str(), x, 10000);
    const WavData r1 = read_wav(f1.str());
    CHECK(r1.sample_rate_hz == 10000);
    REQUIRE(r1.samples.rows() == 3);
    REQUIRE(r1.samples.cols() == 500);
    // Quantization only to float32.
    CHECK((r1.samples - x).cwiseAbs().maxCoeff() < 1.0e-7);
    // A second trip through float32 changes nothing.
    write_wav(f2.str(), r1.samples, 10000);
    const WavData r2 = read_wav(f2.str());
    CHECK((r2.samples - r1.samples).norm() == 0.0);

    // Byte-identical output for identical input.
    TmpFile f3("rt3.wav");
    write_wav(f3.str(), x, 10000);
    CHECK(slurp(f1.str()) == slurp(f3.str()));

    // Vector overload writes one channel.
    TmpFile f4("rt4.wav");
    write_wav(f4.str(), Eigen::VectorXd(x.row(0).transpose()), 16000);
    const WavData r4 = read_wav(f4.str());
    CHECK(r4.sample_rate_hz == 16000);
    CHECK(r4.samples.rows() == 1);
    CHECK((r4.samples.row(0) - r1.samples.row(0)).norm() == 0.0);
}

TEST_CASE("wav: PCM16 stereo decoding") {
    TmpFile f("pcm16.wav");
    // Interleaved L/R frames: (0, 16384), (-32768, 32767), (8192, -16384).
    spit(f.str(), pcm16_file({0, 16384, -32768, 32767, 8192, -16384}, 2, 8000));
    const WavData r = read_wav(f.str());
    CHECK(r.sample_rate_hz == 8000);
    REQUIRE(r.samples.rows() == 2);
    REQUIRE(r.samples.cols() == 3);
    CHECK(r.samples(0, 0) == 0.0);
    CHECK(r.samples(1, 0) == doctest::Approx(0.5));
    CHECK(r.samples(0, 1) == doctest::Approx(-1.0));
    CHECK(r.samples(1, 1) == doctest::Approx(32767.0 / 32768.0));
    CHECK(r.samples(0, 2) == doctest::Approx(0.25));
    CHECK(r.samples(1, 2) == doctest::Approx(-0.5));
}

TEST_CASE("wav: malformed files are rejected") {
    CHECK_THROWS_AS(read_wav("/nonexistent/missing.wav"), FormatError);

    TmpFile f("bad.wav");
    SUBCASE("bad magic") {
        auto bytes = pcm16_file({0, 0}, 1, 8000);
        bytes[0] = 'X';
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_wav(f.str()), FormatError);
    }
    SUBCASE("truncated data chunk") {
        auto bytes = pcm16_file({100, 200, 300, 400}, 1, 8000);
        bytes.resize(bytes.size() - 3);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_wav(f.str()), FormatError);
    }
    SUBCASE("unsupported bit depth") {
        auto bytes = pcm16_file({0, 0}, 1, 8000);
        bytes[34] = 24;  // bits-per-sample field
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_wav(f.str()), FormatError);
    }
    SUBCASE("no data chunk") {
        std::vector<char> v;
        push_tag(v, "RIFF");
        push_u32(v, 4);
        push_tag(v, "WAVE");
        spit(f.str(), v);
        CHECK_THROWS_AS(read_wav(f.str()), FormatError);
    }
}

TEST_CASE("atf container: bitwise round trip") {
    const AtfSet atf = small_atf();
    TmpFile f("roundtrip.atf");
    write_atf(f.str(), atf);
    const AtfSet back = read_atf(f.str());
    CHECK(back.num_mics == atf.num_mics);
    CHECK(back.n_phi == atf.n_phi);
    CHECK(back.n_theta == atf.n_theta);
    CHECK(back.num_bands == atf.num_bands);
    CHECK(back.sample_rate_hz == atf.sample_rate_hz);
    REQUIRE(back.frequencies_hz == atf.frequencies_hz);
    REQUIRE(back.gains.size() == atf.gains.size());
    bool same = true;
    for (std::size_t i = 0; i < atf.gains.size(); ++i) {
        same = same && back.gains[i] == atf.gains[i];
    }
    CHECK(same);

    // Writing twice produces identical bytes.
    TmpFile f2("roundtrip2.atf");
    write_atf(f2.str(), atf);
    CHECK(slurp(f.str()) == slurp(f2.str()));
}

TEST_CASE("atf container: malformed files are rejected") {
    const AtfSet atf = small_atf();
    TmpFile f("bad.atf");
    write_atf(f.str(), atf);
    const std::vector<char> good = slurp(f.str());

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_atf("/nonexistent/missing.atf"), FormatError);
    }
    SUBCASE("bad magic") {
        auto bytes = good;
        bytes[0] = 'Z';
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_atf(f.str()), FormatError);
    }
    SUBCASE("truncated") {
        auto bytes = good;
        bytes.resize(bytes.size() / 2);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_atf(f.str()), FormatError);
    }
    SUBCASE("trailing garbage") {
        auto bytes = good;
        bytes.push_back(0);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_atf(f.str()), FormatError);
    }
    SUBCASE("non-finite gain") {
        auto bytes = good;
        // Overwrite the last 8 bytes (an imaginary part) with a NaN pattern.
        const double nan_val = std::nan("");
        std::memcpy(bytes.data() + bytes.size() - 8, &nan_val, 8);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_atf(f.str()), FormatError);
    }
}

TEST_CASE("dictionary container: bitwise round trip including descriptors") {
    const AtfSet atf = small_atf();
    DictionaryConfig dcfg;
    dcfg.variant = DictionaryVariant::SSHybX;  // exercises plane-wave entries
    const WeightDictionary dict =
        build_dictionary(atf, Direction{kPi / 6.0, kPi / 2.0}, dcfg);
    REQUIRE(dict.num_models() == 2 + 5 * 12 + 72);

    TmpFile f("roundtrip.wdc");
    write_dictionary(f.str(), dict);
    const WeightDictionary back = read_dictionary(f.str());

    CHECK(back.num_bands == dict.num_bands);
    CHECK(back.num_mics == dict.num_mics);
    CHECK(back.target.azimuth_rad == dict.target.azimuth_rad);
    CHECK(back.target.inclination_rad == dict.target.inclination_rad);
    CHECK(back.target_node == dict.target_node);
    REQUIRE(back.models.size() == dict.models.size());
    bool descriptors_same = true;
    for (std::size_t m = 0; m < dict.models.size(); ++m) {
        descriptors_same = descriptors_same &&
                           back.models[m].kind == dict.models[m].kind &&
                           back.models[m].peak_azimuth_rad == dict.models[m].peak_azimuth_rad &&
                           back.models[m].dynamic_range_db == dict.models[m].dynamic_range_db &&
                           back.models[m].direction_index == dict.models[m].direction_index;
    }
    CHECK(descriptors_same);
    CHECK(back.models[0].direction_index == -1);  // identity model survives as -1
    REQUIRE(back.weights.size() == dict.weights.size());
    bool weights_same = true;
    for (std::size_t i = 0; i < dict.weights.size(); ++i) {
        weights_same = weights_same && back.weights[i] == dict.weights[i];
    }
    CHECK(weights_same);
}

TEST_CASE("dictionary container: malformed files are rejected") {
    const AtfSet atf = small_atf();
    const WeightDictionary dict =
        build_dictionary(atf, Direction{0.0, kPi / 2.0}, DictionaryConfig{});
    TmpFile f("bad.wdc");
    write_dictionary(f.str(), dict);
    const std::vector<char> good = slurp(f.str());

    SUBCASE("bad magic") {
        auto bytes = good;
        bytes[3] = '9';
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_dictionary(f.str()), FormatError);
    }
    SUBCASE("truncated") {
        auto bytes = good;
        bytes.resize(bytes.size() - 5);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_dictionary(f.str()), FormatError);
    }
    SUBCASE("descriptor kind out of range") {
        auto bytes = good;
        // First descriptor starts after magic + 3*u32 + 2*f64 + u32 = 36 bytes.
        bytes[36] = 9;
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_dictionary(f.str()), FormatError);
    }
    SUBCASE("non-finite weight") {
        auto bytes = good;
        const double nan_val = std::nan("");
        std::memcpy(bytes.data() + bytes.size() - 16, &nan_val, 8);
        spit(f.str(), bytes);
        CHECK_THROWS_AS(read_dictionary(f.str()), FormatError);
    }
}

TEST_CASE("pipeline config: full schema with degree-to-radian conversion") {
    TmpFile f("pipe.json");
    std::ofstream(f.str()) << R"({
        "method": "ss-hybx",
        "stft": {"sample_rate_hz": 10000, "frame_len_samples": 160,
                 "hop_samples": 80, "fft_len": 160},
        "T_mpdr_seconds": 0.04,
        "T_pca_seconds": 0.12,
        "dict_variant": "ss-hybx",
        "pw_condition_cap": 80.0,
        "target_track": [
            {"time_s": 0.0, "azimuth_deg": 30.0, "inclination_deg": 90.0},
            {"time_s": 2.5, "azimuth_deg": 60.0, "inclination_deg": 90.0}
        ]
    })";
    const PipelineConfig cfg = load_pipeline_config(f.str());
    CHECK(cfg.method == Method::SSHybX);
    CHECK(cfg.stft.sample_rate_hz == 10000);
    CHECK(cfg.stft.frame_len_samples == 160);
    CHECK(cfg.stft.hop_samples == 80);
    CHECK(cfg.stft.fft_len == 160);
    CHECK(cfg.T_mpdr_seconds == 0.04);
    CHECK(cfg.T_pca_seconds == 0.12);
    CHECK(cfg.dict_variant == DictionaryVariant::SSHybX);
    CHECK(cfg.pw_condition_cap == 80.0);
    REQUIRE(cfg.target_track.size() == 2);
    CHECK(cfg.target_track[0].first == 0.0);
    CHECK(cfg.target_track[0].second.azimuth_rad == doctest::Approx(kPi / 6.0));
    CHECK(cfg.target_track[1].first == 2.5);
    CHECK(cfg.target_track[1].second.azimuth_rad == doctest::Approx(kPi / 3.0));
    CHECK(cfg.target_track[1].second.inclination_rad == doctest::Approx(kPi / 2.0));
}

TEST_CASE("pipeline config: defaults and rejection") {
    TmpFile f("pipe2.json");
    SUBCASE("empty object keeps defaults") {
        std::ofstream(f.str()) << "{}";
        const PipelineConfig cfg = load_pipeline_config(f.str());
        CHECK(cfg.method == Method::SSHyb);
        CHECK(cfg.stft.frame_len_samples == 160);
        CHECK(cfg.T_pca_seconds == 0.08);
        REQUIRE(cfg.target_track.size() == 1);
    }
    SUBCASE("unknown key is rejected") {
        std::ofstream(f.str()) << R"({"methd": "iso"})";
        CHECK_THROWS_AS(load_pipeline_config(f.str()), FormatError);
    }
    SUBCASE("unknown nested stft key is rejected") {
        std::ofstream(f.str()) << R"({"stft": {"samplerate": 10000}})";
        CHECK_THROWS_AS(load_pipeline_config(f.str()), FormatError);
    }
    SUBCASE("unknown method name") {
        std::ofstream(f.str()) << R"({"method": "superbeam"})";
        CHECK_THROWS(load_pipeline_config(f.str()));
    }
    SUBCASE("invalid JSON") {
        std::ofstream(f.str()) << "{not json";
        CHECK_THROWS_AS(load_pipeline_config(f.str()), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_pipeline_config("/nonexistent/cfg.json"), FormatError);
    }
}

TEST_CASE("scene config: full schema") {
    TmpFile f("scene.json");
    std::ofstream(f.str()) << R"({
        "mics_m": [[0,0,0],[0,-0.08,0]],
        "target": {"azimuth_deg": 0.0, "inclination_deg": 90.0},
        "interferers": [
            {"azimuth_deg": 90.0, "inclination_deg": 90.0, "level_db": -3.0}
        ],
        "diffuse": {"enabled": true, "level_db": 4.0, "num_plane_waves": 48},
        "duration_s": 4.0,
        "target_onset_s": 1.5,
        "snr_db": 2.0,
        "target_band_hz": [800.0, 3400.0],
        "seed": 17
    })";
    const Scene s = load_scene(f.str());
    CHECK(s.mic_positions_m.rows() == 2);
    CHECK(s.mic_positions_m(1, 1) == -0.08);
    CHECK(s.target.inclination_rad == doctest::Approx(kPi / 2.0));
    REQUIRE(s.interferers.size() == 1);
    CHECK(s.interferers[0].direction.azimuth_rad == doctest::Approx(kPi / 2.0));
    CHECK(s.interferers[0].level_db == -3.0);
    CHECK(s.diffuse.enabled);
    CHECK(s.diffuse.level_db == 4.0);
    CHECK(s.diffuse.num_plane_waves == 48);
    CHECK(s.duration_s == 4.0);
    CHECK(s.target_onset_s == 1.5);
    REQUIRE(s.snr_db.has_value());
    CHECK(*s.snr_db == 2.0);
    REQUIRE(s.target_band_hz.has_value());
    CHECK(s.target_band_hz->first == 800.0);
    CHECK(s.target_band_hz->second == 3400.0);
    CHECK(s.seed == 17);
}

TEST_CASE("scene config: defaults, null snr, and rejection") {
    TmpFile f("scene2.json");
    SUBCASE("minimal scene: diffuse off, defaults intact") {
        std::ofstream(f.str()) << R"({
            "mics_m": [[0,0,0],[0,-0.08,0]],
            "target": {"azimuth_deg": 0, "inclination_deg": 90}
        })";
        const Scene s = load_scene(f.str());
        CHECK_FALSE(s.diffuse.enabled);
        CHECK(s.duration_s == 6.0);
        CHECK(s.target_onset_s == 2.0);
        REQUIRE(s.snr_db.has_value());
        CHECK(*s.snr_db == 0.0);
        CHECK_FALSE(s.target_band_hz.has_value());
        CHECK(s.seed == 0);
    }
    SUBCASE("snr_db null disables SNR scaling") {
        std::ofstream(f.str()) << R"({
            "mics_m": [[0,0,0]],
            "target": {"azimuth_deg": 0, "inclination_deg": 90},
            "snr_db": null
        })";
        CHECK_FALSE(load_scene(f.str()).snr_db.has_value());
    }
    SUBCASE("missing target") {
        std::ofstream(f.str()) << R"({"mics_m": [[0,0,0]]})";
        CHECK_THROWS_AS(load_scene(f.str()), FormatError);
    }
    SUBCASE("unknown interferer key") {
        std::ofstream(f.str()) << R"({
            "mics_m": [[0,0,0]],
            "target": {"azimuth_deg": 0, "inclination_deg": 90},
            "interferers": [{"azimuth_deg": 0, "inclination_deg": 90, "gain": 1}]
        })";
        CHECK_THROWS_AS(load_scene(f.str()), FormatError);
    }
    SUBCASE("negative seed") {
        std::ofstream(f.str()) << R"({
            "mics_m": [[0,0,0]],
            "target": {"azimuth_deg": 0, "inclination_deg": 90},
            "seed": -5
        })";
        CHECK_THROWS_AS(load_scene(f.str()), FormatError);
    }
    SUBCASE("malformed band") {
        std::ofstream(f.str()) << R"({
            "mics_m": [[0,0,0]],
            "target": {"azimuth_deg": 0, "inclination_deg": 90},
            "target_band_hz": [800.0]
        })";
        CHECK_THROWS_AS(load_scene(f.str()), FormatError);
    }
}

TEST_CASE("geometry config") {
    TmpFile f("geom.json");
    SUBCASE("valid") {
        std::ofstream(f.str()) << R"({"mics_m": [[0,0,0],[0.01,-0.02,0.03]]})";
        const Eigen::MatrixX3d mics = load_geometry(f.str());
        REQUIRE(mics.rows() == 2);
        CHECK(mics(1, 0) == 0.01);
        CHECK(mics(1, 1) == -0.02);
        CHECK(mics(1, 2) == 0.03);
    }
    SUBCASE("missing mics_m") {
        std::ofstream(f.str()) << "{}";
        CHECK_THROWS_AS(load_geometry(f.str()), FormatError);
    }
    SUBCASE("bad triple") {
        std::ofstream(f.str()) << R"({"mics_m": [[0,0]]})";
        CHECK_THROWS_AS(load_geometry(f.str()), FormatError);
    }
    SUBCASE("unknown key") {
        std::ofstream(f.str()) << R"({"mics_m": [[0,0,0]], "units": "m"})";
        CHECK_THROWS_AS(load_geometry(f.str()), FormatError);
    }
}
