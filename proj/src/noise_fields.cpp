#include "sshyb/noise_fields.hpp"

#include "sshyb/beamform.hpp"
#include "sshyb/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sshyb {

namespace {

constexpr double kPi = std::numbers::pi;

// Azimuth distance from peak, wrapped into [0, pi].
double wrapped_azimuth_distance(double phi, double peak) {
    double d = std::fmod(std::abs(phi - peak), 2.0 * kPi);
    if (d > kPi) {
        d = 2.0 * kPi - d;
    }
    return d;
}

// Power profile of the unimodal anisotropic field: linear in power from 1 at
// the peak azimuth down to 10^(-dr/10) at the antipode.
double anisotropic_profile(double dphi, double dr_db) {
    const double floor = std::pow(10.0, -dr_db / 10.0);
    return 1.0 - (1.0 - floor) * (dphi / kPi);
}

double condition_from_eigs(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return lmax / lmin;
}

Eigen::MatrixXcd symmetrized(const Eigen::MatrixXcd& m) {
    return 0.5 * (m + m.adjoint());
}

}  // namespace

HermitianCovariance::HermitianCovariance(Eigen::MatrixXcd mat, double loading,
                                         double condition)
    : m(symmetrized(mat)), loading_applied(loading), condition_estimate(condition) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("HermitianCovariance: matrix must be square");
    }
}

std::string ModelDescriptor::label() const {
    std::ostringstream os;
    switch (kind) {
        case ModelKind::Identity:
            os << "identity";
            break;
        case ModelKind::Isotropic:
            os << "isotropic";
            break;
        case ModelKind::UnimodalAnisotropic:
            os << "aniso(dr=" << dynamic_range_db
               << "dB,peak=" << peak_azimuth_rad * 180.0 / kPi << "deg)";
            break;
        case ModelKind::PlaneWave:
            os << "planewave(dir=" << direction_index << ")";
            break;
    }
    return os.str();
}

std::string to_string(DictionaryVariant v) {
    return v == DictionaryVariant::SSHyb ? "ss-hyb" : "ss-hybx";
}

DictionaryVariant dictionary_variant_from_string(const std::string& s) {
    if (s == "ss-hyb") {
        return DictionaryVariant::SSHyb;
    }
    if (s == "ss-hybx") {
        return DictionaryVariant::SSHybX;
    }
    throw InvalidArgument("unknown dictionary variant: " + s +
                          " (expected ss-hyb or ss-hybx)");
}

Eigen::VectorXcd WeightDictionary::weight_vector(int model, int band) const {
    if (model < 0 || model >= num_models()) {
        throw InvalidArgument("WeightDictionary: model index out of range");
    }
    if (band < 0 || band >= num_bands) {
        throw InvalidArgument("WeightDictionary: band index out of range");
    }
    Eigen::VectorXcd w(num_mics);
    const std::size_t base =
        (static_cast<std::size_t>(model) * num_bands + band) * num_mics;
    for (int q = 0; q < num_mics; ++q) {
        w[q] = weights[base + q];
    }
    return w;
}

Eigen::MatrixXcd WeightDictionary::band_matrix(int band) const {
    if (band < 0 || band >= num_bands) {
        throw InvalidArgument("WeightDictionary: band index out of range");
    }
    Eigen::MatrixXcd w(num_models(), num_mics);
    for (int m = 0; m < num_models(); ++m) {
        const std::size_t base =
            (static_cast<std::size_t>(m) * num_bands + band) * num_mics;
        for (int q = 0; q < num_mics; ++q) {
            w(m, q) = weights[base + q];
        }
    }
    return w;
}

HermitianCovariance ncm_isotropic(const AtfSet& atf, int band) {
    if (band < 0 || band >= atf.num_bands) {
        throw InvalidArgument("ncm_isotropic: band index out of range");
    }
    const std::vector<double> w = quadrature_weights(atf.n_phi, atf.n_theta);
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(atf.num_mics, atf.num_mics);
    for (int d = 0; d < atf.num_directions(); ++d) {
        if (w[d] == 0.0) {
            continue;
        }
        const Eigen::VectorXcd a = atf.gain_vector(d, band);
        r.selfadjointView<Eigen::Lower>().rankUpdate(a, w[d]);
    }
    Eigen::MatrixXcd full = r.selfadjointView<Eigen::Lower>();
    return HermitianCovariance(full, 0.0, condition_from_eigs(full));
}

HermitianCovariance ncm_anisotropic(const AtfSet& atf, int band, double peak_azimuth_rad,
                                    double dr_db) {
    if (band < 0 || band >= atf.num_bands) {
        throw InvalidArgument("ncm_anisotropic: band index out of range");
    }
    if (!(dr_db > 0.0) || !std::isfinite(dr_db)) {
        throw InvalidArgument("ncm_anisotropic: dynamic range must be positive and finite");
    }
    const std::vector<double> w = quadrature_weights(atf.n_phi, atf.n_theta);
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(atf.num_mics, atf.num_mics);
    for (int d = 0; d < atf.num_directions(); ++d) {
        if (w[d] == 0.0) {
            continue;
        }
        const double phi = atf.direction(d).azimuth_rad;
        const double p =
            anisotropic_profile(wrapped_azimuth_distance(phi, peak_azimuth_rad), dr_db);
        const Eigen::VectorXcd a = atf.gain_vector(d, band);
        r.selfadjointView<Eigen::Lower>().rankUpdate(a, w[d] * p);
    }
    Eigen::MatrixXcd full = r.selfadjointView<Eigen::Lower>();
    return HermitianCovariance(full, 0.0, condition_from_eigs(full));
}

HermitianCovariance ncm_planewave(const AtfSet& atf, int band, int dir_index,
                                  double max_condition) {
    if (band < 0 || band >= atf.num_bands) {
        throw InvalidArgument("ncm_planewave: band index out of range");
    }
    if (dir_index < 0 || dir_index >= atf.num_directions()) {
        throw InvalidArgument("ncm_planewave: direction index out of range");
    }
    if (!(max_condition >= 1.0)) {
        throw InvalidArgument("ncm_planewave: max_condition must be >= 1");
    }
    const Eigen::VectorXcd a = atf.gain_vector(dir_index, band);
    const int q = static_cast<int>(a.size());
    // a a^H has eigenvalues {|a|^2, 0, ..., 0}; delta = |a|^2/(cap - 1) is the
    // smallest loading with (|a|^2 + delta)/delta == cap.
    const double lmax = a.squaredNorm();
    double delta = 0.0;
    double condition = 1.0;
    if (q > 1 && lmax > 0.0) {
        if (std::isinf(max_condition)) {
            delta = 0.0;
            condition = std::numeric_limits<double>::infinity();
        } else if (max_condition > 1.0) {
            delta = lmax / (max_condition - 1.0);
            condition = max_condition;
        } else {
            throw InvalidArgument(
                "ncm_planewave: max_condition must exceed 1 for a rank-1 field");
        }
    }
    Eigen::MatrixXcd r = delta * Eigen::MatrixXcd::Identity(q, q);
    r.selfadjointView<Eigen::Lower>().rankUpdate(a, 1.0);
    Eigen::MatrixXcd full = r.selfadjointView<Eigen::Lower>();
    return HermitianCovariance(full, delta, condition);
}

WeightDictionary build_dictionary(const AtfSet& atf, const Direction& target,
                                  const DictionaryConfig& cfg) {
    atf.validate();
    const int q = atf.num_mics;
    const int bands = atf.num_bands;
    const int n_phi = atf.n_phi;
    const int n_theta = atf.n_theta;
    if (cfg.dynamic_ranges_db.empty()) {
        throw InvalidArgument("build_dictionary: no dynamic ranges configured");
    }

    WeightDictionary dict;
    dict.num_bands = bands;
    dict.num_mics = q;
    dict.target = target;
    dict.target_node = snap_to_grid(atf, target);

    // Model list in tie-break order.
    dict.models.push_back({ModelKind::Identity, 0.0, 0.0, -1});
    dict.models.push_back({ModelKind::Isotropic, 0.0, 0.0, -1});
    for (double dr : cfg.dynamic_ranges_db) {
        for (int k = 0; k < n_phi; ++k) {
            dict.models.push_back(
                {ModelKind::UnimodalAnisotropic, 2.0 * kPi * k / n_phi, dr, -1});
        }
    }
    if (cfg.variant == DictionaryVariant::SSHybX) {
        for (int d = 0; d < atf.num_directions(); ++d) {
            dict.models.push_back({ModelKind::PlaneWave, 0.0, 0.0, d});
        }
    }
    const int m_total = dict.num_models();
    dict.weights.resize(static_cast<std::size_t>(m_total) * bands * q);

    const std::vector<double> quad = quadrature_weights(n_phi, n_theta);

    // Precompute anisotropic profile values by azimuth offset: the wrapped
    // distance between grid azimuths depends only on (column - peak) mod n_phi.
    std::vector<std::vector<double>> profile(cfg.dynamic_ranges_db.size());
    for (std::size_t r = 0; r < cfg.dynamic_ranges_db.size(); ++r) {
        profile[r].resize(n_phi);
        for (int o = 0; o < n_phi; ++o) {
            const double dphi = wrapped_azimuth_distance(2.0 * kPi * o / n_phi, 0.0);
            profile[r][o] = anisotropic_profile(dphi, cfg.dynamic_ranges_db[r]);
        }
    }

    auto store = [&](int model, int band, const Eigen::VectorXcd& w) {
        const std::size_t base =
            (static_cast<std::size_t>(model) * bands + band) * q;
        for (int i = 0; i < q; ++i) {
            dict.weights[base + i] = w[i];
        }
    };

    for (int f = 0; f < bands; ++f) {
        const Eigen::VectorXcd d = steer_node(atf, dict.target_node, f);

        // Per-azimuth-column partial sums C_p = sum_theta quad * a a^H: both the
        // isotropic matrix and every anisotropic model are weighted sums of them.
        std::vector<Eigen::MatrixXcd> columns(
            n_phi, Eigen::MatrixXcd::Zero(q, q));
        for (int p = 0; p < n_phi; ++p) {
            for (int j = 0; j < n_theta; ++j) {
                const int dir = p * n_theta + j;
                if (quad[dir] == 0.0) {
                    continue;
                }
                const Eigen::VectorXcd a = atf.gain_vector(dir, f);
                columns[p].selfadjointView<Eigen::Lower>().rankUpdate(a, quad[dir]);
            }
            columns[p] = Eigen::MatrixXcd(columns[p].selfadjointView<Eigen::Lower>());
        }

        int model = 0;
        // Identity: w = d / (d^H d).
        store(model++, f, Eigen::VectorXcd(d / d.squaredNorm()));

        // Isotropic.
        Eigen::MatrixXcd r_iso = Eigen::MatrixXcd::Zero(q, q);
        for (int p = 0; p < n_phi; ++p) {
            r_iso += columns[p];
        }
        store(model++, f, mvdr_weights(symmetrized(r_iso), d));

        // Anisotropic models.
        for (std::size_t r = 0; r < cfg.dynamic_ranges_db.size(); ++r) {
            for (int k = 0; k < n_phi; ++k) {
                Eigen::MatrixXcd rm = Eigen::MatrixXcd::Zero(q, q);
                for (int p = 0; p < n_phi; ++p) {
                    const int offset = (p - k + n_phi) % n_phi;
                    rm += profile[r][offset] * columns[p];
                }
                store(model++, f, mvdr_weights(symmetrized(rm), d));
            }
        }

        // Plane-wave models.
        if (cfg.variant == DictionaryVariant::SSHybX) {
            for (int dir = 0; dir < atf.num_directions(); ++dir) {
                const HermitianCovariance r_pw =
                    ncm_planewave(atf, f, dir, cfg.pw_condition_cap);
                store(model++, f, mvdr_weights(r_pw.m, d));
            }
        }
    }
    return dict;
}

}  // namespace sshyb
