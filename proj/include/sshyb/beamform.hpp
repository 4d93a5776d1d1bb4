#pragma once

#include <Eigen/Dense>

#include "sshyb/noise_fields.hpp"
#include "sshyb/spatial.hpp"

namespace sshyb {

// MVDR weights: w = R^{-1} d / (d^H R^{-1} d), computed by a Hermitian
// linear solve (never an explicit inverse). If the plain solve fails
// (non-finite or large residual), retries once with diagonal loading
// lambda = 1e-8 * trace(R)/Q; throws SingularModel if still unusable.
// Post: w^H d = 1 to rounding.
Eigen::VectorXcd mvdr_weights(const Eigen::MatrixXcd& R, const Eigen::VectorXcd& d);
Eigen::VectorXcd mvdr_weights(const HermitianCovariance& R, const Eigen::VectorXcd& d);

// Beamformer output Y = w^H x.
std::complex<double> apply_weights(const Eigen::VectorXcd& w, const Eigen::VectorXcd& x);

// MVDR against the isotropic noise field (signal-independent, frame-constant).
Eigen::VectorXcd iso_mvdr_weights(const AtfSet& atf, const Direction& target, int band);

// Per-band EMA covariance state for the MPDR baseline:
//   R <- alpha R + (1-alpha) x x^H,  alpha = exp(-dt/T),  R_0 = 1e-6 I.
// The update re-symmetrizes, so the state stays Hermitian to the bit.
struct EmaCovTracker {
    Eigen::MatrixXcd R;
    double alpha = 0.0;

    EmaCovTracker() = default;
    EmaCovTracker(int q, double dt_seconds, double T_seconds, double init_eps = 1e-6);
    void update(const Eigen::VectorXcd& x);
};

// One MPDR step at one band: EMA update, then MVDR solve and apply.
struct MpdrStepResult {
    Eigen::VectorXcd w;
    std::complex<double> y;
};
MpdrStepResult mpdr_step(EmaCovTracker& tracker, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& d);

}  // namespace sshyb
