#include "sshyb/subspace.hpp"

#include "sshyb/errors.hpp"

#include <cmath>
#include <complex>

namespace sshyb {

namespace {

// Multiply v by a unit phase making its first nonzero component real positive.
void fix_phase(Eigen::Vector2cd& v) {
    for (int i = 0; i < 2; ++i) {
        const double mag = std::abs(v[i]);
        if (mag > 0.0) {
            v *= std::conj(v[i]) / mag;
            return;
        }
    }
}

}  // namespace

Eig2x2 eig2x2_hermitian(const Eigen::Matrix2cd& R, double hermitian_tol) {
    const double scale = R.cwiseAbs().maxCoeff();
    const double tol = hermitian_tol * std::max(scale, 1e-300);
    if (std::abs(R(0, 1) - std::conj(R(1, 0))) > tol ||
        std::abs(R(0, 0).imag()) > tol || std::abs(R(1, 1).imag()) > tol) {
        throw InvalidArgument("eig2x2_hermitian: matrix is not Hermitian within tolerance");
    }
    const double a = R(0, 0).real();
    const double c = R(1, 1).real();
    const std::complex<double> b = 0.5 * (R(0, 1) + std::conj(R(1, 0)));
    const double babs = std::abs(b);

    Eig2x2 out;
    const double disc = std::hypot(a - c, 2.0 * babs);
    out.lambda1 = 0.5 * (a + c + disc);
    out.lambda2 = 0.5 * (a + c - disc);

    if (babs == 0.0) {
        // Already diagonal; order columns by eigenvalue.
        if (a >= c) {
            out.U = Eigen::Matrix2cd::Identity();
        } else {
            out.U << 0.0, 1.0, 1.0, 0.0;
        }
        return out;
    }

    // Two algebraically equivalent eigenvector formulas; pick the better
    // conditioned one (larger norm) to avoid cancellation.
    Eigen::Vector2cd v1a(b, std::complex<double>(out.lambda1 - a, 0.0));
    Eigen::Vector2cd v1b(std::complex<double>(out.lambda1 - c, 0.0), std::conj(b));
    Eigen::Vector2cd v1 = (v1a.squaredNorm() >= v1b.squaredNorm()) ? v1a : v1b;
    v1.normalize();
    fix_phase(v1);

    // Orthogonal complement is the second eigenvector for a Hermitian 2x2.
    Eigen::Vector2cd v2(-std::conj(v1[1]), std::conj(v1[0]));
    fix_phase(v2);

    out.U.col(0) = v1;
    out.U.col(1) = v2;
    return out;
}

PcaTracker::PcaTracker(double dt_seconds, double T_seconds, double init_eps) {
    if (!(dt_seconds > 0.0) || !(T_seconds > 0.0)) {
        throw InvalidArgument("PcaTracker: dt and T must be positive");
    }
    Rz = init_eps * Eigen::Matrix2cd::Identity();
    alpha = std::exp(-dt_seconds / T_seconds);
}

SubspaceResult pca_step(PcaTracker& tracker, const Eigen::MatrixX2cd& Z) {
    if (Z.rows() == 0) {
        throw InvalidArgument("pca_step: empty frame");
    }
    if (!Z.allFinite()) {
        throw InvalidArgument("pca_step: non-finite spectrum frame");
    }

    // Z^H Z from gemm is not bit-Hermitian; symmetrize before accumulating so
    // the tracked state stays exactly Hermitian.
    Eigen::Matrix2cd inst = Z.adjoint() * Z;
    inst = 0.5 * (inst + inst.adjoint()).eval();
    tracker.Rz = tracker.alpha * tracker.Rz + (1.0 - tracker.alpha) * inst;

    const Eig2x2 eig = eig2x2_hermitian(tracker.Rz);

    SubspaceResult out;
    out.lambda1 = eig.lambda1;
    out.lambda2 = eig.lambda2;
    if (std::abs(eig.lambda1 - eig.lambda2) < 1e-12 * std::abs(eig.lambda1)) {
        // Degenerate spectrum: no preferred direction; keep the Hybrid channel.
        out.U_S = Eigen::Vector2cd(1.0, 0.0);
    } else {
        out.U_S = eig.U.col(0);
    }
    // Column 0 of Z_SS = Z U_S U_S^H.
    out.y_out = (Z * out.U_S) * std::conj(out.U_S[0]);
    return out;
}

}  // namespace sshyb
