#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sshyb/spatial.hpp"

namespace sshyb {

// Hermitian PSD matrix with conditioning metadata. Construction symmetrizes,
// so the stored matrix is Hermitian to the bit.
struct HermitianCovariance {
    Eigen::MatrixXcd m;
    double loading_applied = 0.0;
    double condition_estimate = 1.0;

    HermitianCovariance() = default;
    explicit HermitianCovariance(Eigen::MatrixXcd mat, double loading = 0.0,
                                 double condition = 1.0);
};

enum class ModelKind { Identity, Isotropic, UnimodalAnisotropic, PlaneWave };

// Dictionary entry identity: which noise field a weight vector was built for.
struct ModelDescriptor {
    ModelKind kind = ModelKind::Identity;
    double peak_azimuth_rad = 0.0;  // UnimodalAnisotropic only
    double dynamic_range_db = 0.0;  // UnimodalAnisotropic only
    int direction_index = -1;       // PlaneWave only

    std::string label() const;
};

enum class DictionaryVariant { SSHyb, SSHybX };

// Precomputed MVDR weights for one steering direction:
// weights[(m*F + f)*Q + q], model order = tie-break order:
// identity, isotropic, anisotropic (by dynamic range, then peak azimuth),
// plane waves (by direction index).
struct WeightDictionary {
    std::vector<ModelDescriptor> models;
    std::vector<std::complex<double>> weights;
    int num_bands = 0;  // F
    int num_mics = 0;   // Q
    Direction target;
    int target_node = -1;  // snapped grid index the weights were built for

    int num_models() const { return static_cast<int>(models.size()); }
    Eigen::VectorXcd weight_vector(int model, int band) const;
    // All model weights at one band as an M x Q matrix (row m = w_m^T).
    Eigen::MatrixXcd band_matrix(int band) const;
};

// R_Iso(f) = sum_i w_i a(O_i,f) a^H(O_i,f) over the full grid.
HermitianCovariance ncm_isotropic(const AtfSet& atf, int band);

// Unimodal anisotropic field: same azimuth power profile at all inclinations,
//   P(dphi) = 1 - (1 - 10^(-dr_db/10)) * dphi/pi   (linear in power),
// dphi = wrapped azimuth distance from the peak in [0, pi].
// R(f) = sum_i w_i P(dphi_i) a a^H.
HermitianCovariance ncm_anisotropic(const AtfSet& atf, int band, double peak_azimuth_rad,
                                    double dr_db);

// Plane-wave field: R = a a^H + delta*I with the smallest delta >= 0 putting
// the condition number at max_condition (rank-1 case: delta = |a|^2/(cap-1)).
HermitianCovariance ncm_planewave(const AtfSet& atf, int band, int dir_index,
                                  double max_condition);

struct DictionaryConfig {
    DictionaryVariant variant = DictionaryVariant::SSHyb;
    double pw_condition_cap = 100.0;
    std::vector<double> dynamic_ranges_db = {8.0, 16.0, 24.0, 32.0, 40.0};
};

// SS-Hyb: identity + isotropic + 5 DR x n_phi peak azimuths  (M = 302 at 60x30)
// SS-HybX: SS-Hyb + one plane-wave model per grid direction   (M = 2102)
WeightDictionary build_dictionary(const AtfSet& atf, const Direction& target,
                                  const DictionaryConfig& cfg);

std::string to_string(DictionaryVariant v);
DictionaryVariant dictionary_variant_from_string(const std::string& s);

}  // namespace sshyb
