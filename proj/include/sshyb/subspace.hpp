#pragma once

#include <Eigen/Dense>

namespace sshyb {

// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
// Eigenvalues descending, U unitary with columns as eigenvectors; each
// column's first nonzero component is made real positive (phase convention).
struct Eig2x2 {
    double lambda1 = 0.0;  // >= lambda2
    double lambda2 = 0.0;
    Eigen::Matrix2cd U;    // column 0 <-> lambda1
};
Eig2x2 eig2x2_hermitian(const Eigen::Matrix2cd& R, double hermitian_tol = 1e-9);

// EMA-tracked 2x2 covariance of Z = [y_Hyb, y_Iso] frames.
struct PcaTracker {
    Eigen::Matrix2cd Rz;
    double alpha = 0.0;

    PcaTracker() = default;
    PcaTracker(double dt_seconds, double T_seconds, double init_eps = 1e-6);
};

struct SubspaceResult {
    Eigen::VectorXcd y_out;  // column 0 of Z_SS (the SS-Hyb spectrum)
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Eigen::Vector2cd U_S;
};

// Rz <- alpha Rz + (1-alpha) Z^H Z; EVD; Z_SS = Z U_S U_S^H; y_out = col 0.
// Degenerate eigenvalues (|l1-l2| < 1e-12*l1): U_S = (1,0), i.e. the result
// degrades to the plain Hybrid output.
SubspaceResult pca_step(PcaTracker& tracker, const Eigen::MatrixX2cd& Z);

}  // namespace sshyb
