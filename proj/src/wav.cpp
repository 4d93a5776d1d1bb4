#include "sshyb/wav.hpp"

#include "sshyb/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace sshyb {

namespace {

// This code assumes a little-endian host (true for every supported target);
// fields are written through memcpy to avoid aliasing issues.

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void put_u16(std::string& out, std::uint16_t v) {
    char b[2];
    std::memcpy(b, &v, 2);
    out.append(b, 2);
}

struct Reader {
    const std::vector<char>& data;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > data.size()) {
            throw FormatError(std::string("wav: truncated file while reading ") + what);
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, data.data() + pos, 4);
        pos += 4;
        return v;
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v;
        std::memcpy(&v, data.data() + pos, 2);
        pos += 2;
        return v;
    }
    std::string tag() {
        need(4, "chunk tag");
        std::string s(data.data() + pos, 4);
        pos += 4;
        return s;
    }
};

}  // namespace

WavData read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("wav: cannot open " + path);
    }
    std::vector<char> data((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    Reader r{data};

    if (r.tag() != "RIFF") {
        throw FormatError("wav: missing RIFF header in " + path);
    }
    r.u32("riff size");
    if (r.tag() != "WAVE") {
        throw FormatError("wav: not a WAVE file: " + path);
    }

    int format = 0;
    int channels = 0;
    int rate = 0;
    int bits = 0;
    bool have_fmt = false;
    const char* payload = nullptr;
    std::size_t payload_len = 0;

    while (r.pos + 8 <= data.size()) {
        const std::string tag = r.tag();
        const std::uint32_t size = r.u32("chunk size");
        r.need(size, tag.c_str());
        if (tag == "fmt ") {
            if (size < 16) {
                throw FormatError("wav: fmt chunk too small in " + path);
            }
            Reader f{data, r.pos};
            format = f.u16("format");
            channels = f.u16("channels");
            rate = static_cast<int>(f.u32("sample rate"));
            f.u32("byte rate");
            f.u16("block align");
            bits = f.u16("bits per sample");
            have_fmt = true;
        } else if (tag == "data") {
            payload = data.data() + r.pos;
            payload_len = size;
        }
        r.pos += size + (size % 2);  // chunks are word-aligned
    }
    if (!have_fmt || payload == nullptr) {
        throw FormatError("wav: missing fmt or data chunk in " + path);
    }
    if (channels < 1 || rate <= 0) {
        throw FormatError("wav: invalid channel count or rate in " + path);
    }

    WavData wav;
    wav.sample_rate_hz = rate;
    if (format == 1 && bits == 16) {
        const std::size_t frames = payload_len / (2 * channels);
        wav.samples.resize(channels, static_cast<Eigen::Index>(frames));
        for (std::size_t i = 0; i < frames; ++i) {
            for (int c = 0; c < channels; ++c) {
                std::int16_t v;
                std::memcpy(&v, payload + 2 * (i * channels + c), 2);
                wav.samples(c, static_cast<Eigen::Index>(i)) = v / 32768.0;
            }
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t frames = payload_len / (4 * channels);
        wav.samples.resize(channels, static_cast<Eigen::Index>(frames));
        for (std::size_t i = 0; i < frames; ++i) {
            for (int c = 0; c < channels; ++c) {
                float v;
                std::memcpy(&v, payload + 4 * (i * channels + c), 4);
                wav.samples(c, static_cast<Eigen::Index>(i)) = static_cast<double>(v);
            }
        }
    } else {
        throw FormatError("wav: unsupported encoding (need PCM16 or float32) in " + path);
    }
    return wav;
}

void write_wav(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate_hz) {
    if (samples.rows() < 1 || samples.cols() < 1) {
        throw InvalidArgument("write_wav: empty signal");
    }
    if (sample_rate_hz <= 0) {
        throw InvalidArgument("write_wav: sample rate must be positive");
    }
    const int channels = static_cast<int>(samples.rows());
    const Eigen::Index frames = samples.cols();
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames) * channels * 4;

    std::string out;
    out.reserve(58 + data_bytes);
    out += "RIFF";
    put_u32(out, 48 + data_bytes);  // WAVE + fmt(24) + fact(12) + data header + payload
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 3);  // IEEE float
    put_u16(out, static_cast<std::uint16_t>(channels));
    put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
    put_u32(out, static_cast<std::uint32_t>(sample_rate_hz) * channels * 4);
    put_u16(out, static_cast<std::uint16_t>(channels * 4));
    put_u16(out, 32);
    out += "fact";
    put_u32(out, 4);
    put_u32(out, static_cast<std::uint32_t>(frames));
    out += "data";
    put_u32(out, data_bytes);
    for (Eigen::Index i = 0; i < frames; ++i) {
        for (int c = 0; c < channels; ++c) {
            const float v = static_cast<float>(samples(c, i));
            char b[4];
            std::memcpy(b, &v, 4);
            out.append(b, 4);
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw FormatError("wav: cannot write " + path);
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw FormatError("wav: short write to " + path);
    }
}

void write_wav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate_hz) {
    write_wav(path, Eigen::MatrixXd(samples.transpose()), sample_rate_hz);
}

}  // namespace sshyb
