#include "sshyb/spatial.hpp"

#include "sshyb/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sshyb {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::Vector3d unit_vector(const Direction& dir) {
    const double st = std::sin(dir.inclination_rad);
    return {st * std::cos(dir.azimuth_rad), st * std::sin(dir.azimuth_rad),
            std::cos(dir.inclination_rad)};
}

Direction AtfSet::direction(int index) const {
    if (index < 0 || index >= num_directions()) {
        throw InvalidArgument("AtfSet::direction: index out of range");
    }
    const int i_phi = index / n_theta;
    const int i_theta = index % n_theta;
    return {2.0 * kPi * i_phi / n_phi, kPi * i_theta / n_theta};
}

Eigen::VectorXcd AtfSet::gain_vector(int dir_index, int band) const {
    if (dir_index < 0 || dir_index >= num_directions()) {
        throw InvalidArgument("AtfSet::gain_vector: direction index out of range");
    }
    if (band < 0 || band >= num_bands) {
        throw InvalidArgument("AtfSet::gain_vector: band index out of range");
    }
    Eigen::VectorXcd a(num_mics);
    const std::size_t base =
        (static_cast<std::size_t>(dir_index) * num_bands + band) * num_mics;
    for (int q = 0; q < num_mics; ++q) {
        a[q] = gains[base + q];
    }
    return a;
}

std::complex<double>& AtfSet::gain(int dir_index, int band, int mic) {
    const std::size_t base =
        (static_cast<std::size_t>(dir_index) * num_bands + band) * num_mics;
    return gains[base + mic];
}

const std::complex<double>& AtfSet::gain(int dir_index, int band, int mic) const {
    const std::size_t base =
        (static_cast<std::size_t>(dir_index) * num_bands + band) * num_mics;
    return gains[base + mic];
}

void AtfSet::validate() const {
    if (n_phi < 1 || n_theta < 2) {
        throw InvalidArgument("AtfSet: grid must be at least 1 x 2");
    }
    if (n_theta % 2 != 0) {
        throw InvalidArgument("AtfSet: n_theta must be even for the quadrature rule");
    }
    if (num_mics < 1) {
        throw InvalidArgument("AtfSet: zero microphones");
    }
    if (num_bands < 1 || frequencies_hz.size() != static_cast<std::size_t>(num_bands)) {
        throw InvalidArgument("AtfSet: frequency table size mismatch");
    }
    for (std::size_t f = 1; f < frequencies_hz.size(); ++f) {
        if (!(frequencies_hz[f] > frequencies_hz[f - 1])) {
            throw InvalidArgument("AtfSet: frequencies must be strictly increasing");
        }
    }
    const std::size_t expected = static_cast<std::size_t>(num_directions()) *
                                 static_cast<std::size_t>(num_bands) *
                                 static_cast<std::size_t>(num_mics);
    if (gains.size() != expected) {
        throw DimensionMismatch("AtfSet: gain table size mismatch");
    }
    for (const auto& g : gains) {
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
            throw InvalidArgument("AtfSet: non-finite gain");
        }
    }
}

double quadrature_weight_at(double theta, int n_phi, int n_theta) {
    if (n_phi < 1 || n_theta < 2 || n_theta % 2 != 0) {
        throw InvalidArgument(
            "quadrature_weight_at: grid must have n_phi >= 1 and even n_theta >= 2");
    }
    double s = 0.0;
    for (int m = 0; m < n_theta / 2; ++m) {
        s += std::sin((2 * m + 1) * theta) / (2 * m + 1);
    }
    return 2.0 * std::sin(theta) / (static_cast<double>(n_phi) * n_theta) * s;
}

std::vector<double> quadrature_weights(int n_phi, int n_theta) {
    if (n_phi < 1 || n_theta < 2 || n_theta % 2 != 0) {
        throw InvalidArgument(
            "quadrature_weights: grid must have n_phi >= 1 and even n_theta >= 2");
    }
    // Weight depends only on theta; the pole node (theta = 0) gets exactly 0.
    std::vector<double> per_theta(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        per_theta[j] = (j == 0) ? 0.0 : quadrature_weight_at(kPi * j / n_theta, n_phi, n_theta);
    }
    std::vector<double> w(static_cast<std::size_t>(n_phi) * n_theta);
    for (int i_phi = 0; i_phi < n_phi; ++i_phi) {
        for (int j = 0; j < n_theta; ++j) {
            w[static_cast<std::size_t>(i_phi) * n_theta + j] = per_theta[j];
        }
    }
    return w;
}

AtfSet freefield_atf(const Eigen::MatrixX3d& mic_positions_m, int n_phi, int n_theta,
                     const std::vector<double>& frequencies_hz, double sample_rate_hz,
                     double speed_of_sound) {
    if (mic_positions_m.rows() < 2) {
        throw InvalidArgument("freefield_atf: need at least two microphones");
    }
    if (!(speed_of_sound > 0.0)) {
        throw InvalidArgument("freefield_atf: speed of sound must be positive");
    }
    if (frequencies_hz.empty()) {
        throw InvalidArgument("freefield_atf: empty frequency table");
    }
    AtfSet atf;
    atf.n_phi = n_phi;
    atf.n_theta = n_theta;
    atf.num_mics = static_cast<int>(mic_positions_m.rows());
    atf.num_bands = static_cast<int>(frequencies_hz.size());
    atf.sample_rate_hz = sample_rate_hz;
    atf.frequencies_hz = frequencies_hz;
    if (n_phi < 1 || n_theta < 2 || n_theta % 2 != 0) {
        throw InvalidArgument("freefield_atf: grid must have n_phi >= 1 and even n_theta");
    }
    for (std::size_t f = 1; f < frequencies_hz.size(); ++f) {
        if (!(frequencies_hz[f] > frequencies_hz[f - 1])) {
            throw InvalidArgument("freefield_atf: coincident or unsorted frequencies");
        }
    }

    const int dirs = atf.num_directions();
    const int bands = atf.num_bands;
    const int q = atf.num_mics;
    atf.gains.resize(static_cast<std::size_t>(dirs) * bands * q);

    for (int d = 0; d < dirs; ++d) {
        const Eigen::Vector3d u = unit_vector(atf.direction(d));
        // Plane wave from direction u: delay at mic q relative to the origin.
        Eigen::VectorXd tau = -(mic_positions_m * u) / speed_of_sound;
        for (int f = 0; f < bands; ++f) {
            const double omega = 2.0 * kPi * frequencies_hz[f];
            const std::size_t base = (static_cast<std::size_t>(d) * bands + f) * q;
            for (int m = 0; m < q; ++m) {
                const double phase = -omega * tau[m];
                atf.gains[base + m] = std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
    }
    return atf;
}

int snap_to_grid(const AtfSet& atf, const Direction& target) {
    if (atf.num_directions() <= 0) {
        throw InvalidArgument("snap_to_grid: empty grid");
    }
    const Eigen::Vector3d t = unit_vector(target);
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int d = 0; d < atf.num_directions(); ++d) {
        const Eigen::Vector3d u = unit_vector(atf.direction(d));
        // Great-circle angle, numerically stable near 0 and pi.
        const double dist = std::atan2(t.cross(u).norm(), t.dot(u));
        if (dist < best_dist) {  // strict: ties keep the lower index
            best_dist = dist;
            best = d;
        }
    }
    return best;
}

Eigen::VectorXcd steer_node(const AtfSet& atf, int dir_index, int band) {
    Eigen::VectorXcd d = atf.gain_vector(dir_index, band);
    const std::complex<double> ref = d[0];
    const double mag = std::abs(ref);
    if (mag > 0.0) {
        d *= std::conj(ref) / mag;
    }
    return d;
}

Eigen::VectorXcd steer(const AtfSet& atf, const Direction& target, int band) {
    return steer_node(atf, snap_to_grid(atf, target), band);
}

}  // namespace sshyb
