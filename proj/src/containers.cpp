#include "sshyb/containers.hpp"

#include "sshyb/errors.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace sshyb {

namespace {

class BinWriter {
  public:
    explicit BinWriter(const std::string& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) {
            throw FormatError("container: cannot write " + path);
        }
    }
    void magic(const char* m) { out_.write(m, 4); }
    void u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), 4); }
    void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), 8); }
    void cpx(const std::complex<double>& v) {
        f64(v.real());
        f64(v.imag());
    }
    void close() {
        out_.flush();
        if (!out_) {
            throw FormatError("container: short write to " + path_);
        }
    }

  private:
    std::string path_;
    std::ofstream out_;
};

class BinReader {
  public:
    explicit BinReader(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw FormatError("container: cannot open " + path);
        }
        data_.assign((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    }
    void magic(const char* expected) {
        need(4, "magic");
        if (std::memcmp(data_.data() + pos_, expected, 4) != 0) {
            throw FormatError("container: bad magic in " + path_ + " (expected " +
                              expected + ")");
        }
        pos_ += 4;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, data_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        double v;
        std::memcpy(&v, data_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }
    std::complex<double> cpx(const char* what) {
        const double re = f64(what);
        const double im = f64(what);
        return {re, im};
    }
    void done() const {
        if (pos_ != data_.size()) {
            throw FormatError("container: trailing bytes in " + path_);
        }
    }

  private:
    void need(std::size_t n, const char* what) const {
        if (pos_ + n > data_.size()) {
            throw FormatError(std::string("container: truncated ") + path_ +
                              " while reading " + what);
        }
    }
    std::string path_;
    std::vector<char> data_;
    std::size_t pos_ = 0;
};

constexpr std::uint32_t kMaxCount = 1u << 24;  // sanity bound on header counts

std::uint32_t checked(std::uint32_t v, const char* what, const std::string& path) {
    if (v == 0 || v > kMaxCount) {
        throw FormatError(std::string("container: implausible ") + what + " in " + path);
    }
    return v;
}

}  // namespace

void write_atf(const std::string& path, const AtfSet& atf) {
    atf.validate();
    BinWriter w(path);
    w.magic("ATF1");
    w.u32(static_cast<std::uint32_t>(atf.num_mics));
    w.u32(static_cast<std::uint32_t>(atf.n_phi));
    w.u32(static_cast<std::uint32_t>(atf.n_theta));
    w.u32(static_cast<std::uint32_t>(atf.num_bands));
    w.f64(atf.sample_rate_hz);
    for (double f : atf.frequencies_hz) {
        w.f64(f);
    }
    for (const auto& g : atf.gains) {
        w.cpx(g);
    }
    w.close();
}

AtfSet read_atf(const std::string& path) {
    BinReader r(path);
    r.magic("ATF1");
    AtfSet atf;
    atf.num_mics = static_cast<int>(checked(r.u32("mic count"), "mic count", path));
    atf.n_phi = static_cast<int>(checked(r.u32("n_phi"), "n_phi", path));
    atf.n_theta = static_cast<int>(checked(r.u32("n_theta"), "n_theta", path));
    atf.num_bands = static_cast<int>(checked(r.u32("band count"), "band count", path));
    atf.sample_rate_hz = r.f64("sample rate");
    atf.frequencies_hz.resize(atf.num_bands);
    for (int f = 0; f < atf.num_bands; ++f) {
        atf.frequencies_hz[f] = r.f64("frequency");
    }
    const std::size_t count = static_cast<std::size_t>(atf.num_directions()) *
                              atf.num_bands * atf.num_mics;
    atf.gains.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        atf.gains[i] = r.cpx("gain");
    }
    r.done();
    try {
        atf.validate();
    } catch (const Error& e) {
        throw FormatError("container: invalid ATF content in " + path + ": " + e.what());
    }
    return atf;
}

void write_dictionary(const std::string& path, const WeightDictionary& dict) {
    if (dict.num_models() == 0 || dict.num_bands <= 0 || dict.num_mics <= 0) {
        throw InvalidArgument("write_dictionary: empty dictionary");
    }
    BinWriter w(path);
    w.magic("WDC1");
    w.u32(static_cast<std::uint32_t>(dict.num_models()));
    w.u32(static_cast<std::uint32_t>(dict.num_bands));
    w.u32(static_cast<std::uint32_t>(dict.num_mics));
    w.f64(dict.target.azimuth_rad);
    w.f64(dict.target.inclination_rad);
    w.u32(static_cast<std::uint32_t>(dict.target_node));
    for (const auto& m : dict.models) {
        w.u32(static_cast<std::uint32_t>(m.kind));
        w.f64(m.peak_azimuth_rad);
        w.f64(m.dynamic_range_db);
        // Signed index (-1 for non-plane-wave models) kept in two's complement.
        w.u32(static_cast<std::uint32_t>(static_cast<std::int32_t>(m.direction_index)));
    }
    for (const auto& v : dict.weights) {
        w.cpx(v);
    }
    w.close();
}

WeightDictionary read_dictionary(const std::string& path) {
    BinReader r(path);
    r.magic("WDC1");
    WeightDictionary dict;
    const std::uint32_t m = checked(r.u32("model count"), "model count", path);
    dict.num_bands = static_cast<int>(checked(r.u32("band count"), "band count", path));
    dict.num_mics = static_cast<int>(checked(r.u32("mic count"), "mic count", path));
    dict.target.azimuth_rad = r.f64("target azimuth");
    dict.target.inclination_rad = r.f64("target inclination");
    dict.target_node = static_cast<int>(r.u32("target node"));
    dict.models.resize(m);
    for (auto& md : dict.models) {
        const std::uint32_t kind = r.u32("model kind");
        if (kind > static_cast<std::uint32_t>(ModelKind::PlaneWave)) {
            throw FormatError("container: unknown model kind in " + path);
        }
        md.kind = static_cast<ModelKind>(kind);
        md.peak_azimuth_rad = r.f64("peak azimuth");
        md.dynamic_range_db = r.f64("dynamic range");
        md.direction_index =
            static_cast<int>(static_cast<std::int32_t>(r.u32("direction index")));
    }
    const std::size_t count =
        static_cast<std::size_t>(m) * dict.num_bands * dict.num_mics;
    dict.weights.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        dict.weights[i] = r.cpx("weight");
        if (!std::isfinite(dict.weights[i].real()) ||
            !std::isfinite(dict.weights[i].imag())) {
            throw FormatError("container: non-finite weight in " + path);
        }
    }
    r.done();
    return dict;
}

}  // namespace sshyb
