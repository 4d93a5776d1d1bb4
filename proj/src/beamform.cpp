#include "sshyb/beamform.hpp"

#include "sshyb/errors.hpp"

#include <cmath>

namespace sshyb {

Eigen::VectorXcd mvdr_weights(const Eigen::MatrixXcd& R, const Eigen::VectorXcd& d) {
    const Eigen::Index q = d.size();
    if (R.rows() != q || R.cols() != q) {
        throw DimensionMismatch("mvdr_weights: covariance/steering size mismatch");
    }
    if (q == 0) {
        throw InvalidArgument("mvdr_weights: empty steering vector");
    }
    if (!d.allFinite()) {
        throw InvalidArgument("mvdr_weights: non-finite steering vector");
    }
    if (d.squaredNorm() == 0.0) {
        throw SingularModel("mvdr_weights: zero steering vector");
    }

    Eigen::LDLT<Eigen::MatrixXcd> ldlt(R);
    Eigen::VectorXcd v = ldlt.solve(d);
    bool ok = ldlt.info() == Eigen::Success && v.allFinite() &&
              (R.selfadjointView<Eigen::Lower>() * v - d).norm() <= 1e-6 * d.norm();
    if (!ok) {
        // Diagonal loading fallback: lambda = 1e-8 * trace(R)/Q.
        const double lambda = 1e-8 * R.trace().real() / static_cast<double>(q);
        Eigen::MatrixXcd loaded = R;
        loaded.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXcd> ldlt2(loaded);
        v = ldlt2.solve(d);
        if (ldlt2.info() != Eigen::Success || !v.allFinite()) {
            throw SingularModel("mvdr_weights: covariance unusable after diagonal loading");
        }
    }
    const double denom = d.dot(v).real();  // d^H v = d^H R^{-1} d, real for Hermitian R
    if (!std::isfinite(denom) || denom <= 0.0) {
        throw SingularModel("mvdr_weights: non-positive quadratic form d^H R^{-1} d");
    }
    return v / denom;
}

Eigen::VectorXcd mvdr_weights(const HermitianCovariance& R, const Eigen::VectorXcd& d) {
    return mvdr_weights(R.m, d);
}

std::complex<double> apply_weights(const Eigen::VectorXcd& w, const Eigen::VectorXcd& x) {
    if (w.size() != x.size()) {
        throw DimensionMismatch("apply_weights: weight/input size mismatch");
    }
    return w.dot(x);  // Eigen dot conjugates the left argument: w^H x
}

Eigen::VectorXcd iso_mvdr_weights(const AtfSet& atf, const Direction& target, int band) {
    const int node = snap_to_grid(atf, target);
    return mvdr_weights(ncm_isotropic(atf, band).m, steer_node(atf, node, band));
}

EmaCovTracker::EmaCovTracker(int q, double dt_seconds, double T_seconds, double init_eps) {
    if (q <= 0) {
        throw InvalidArgument("EmaCovTracker: channel count must be positive");
    }
    if (!(dt_seconds > 0.0) || !(T_seconds > 0.0)) {
        throw InvalidArgument("EmaCovTracker: dt and T must be positive");
    }
    R = init_eps * Eigen::MatrixXcd::Identity(q, q);
    alpha = std::exp(-dt_seconds / T_seconds);
}

void EmaCovTracker::update(const Eigen::VectorXcd& x) {
    if (x.size() != R.rows()) {
        throw DimensionMismatch("EmaCovTracker: input size mismatch");
    }
    if (!x.allFinite()) {
        throw InvalidArgument("EmaCovTracker: non-finite input");
    }
    R = alpha * R + (1.0 - alpha) * (x * x.adjoint());
    // Vectorized kernels (and FP contraction) can leave the two triangles a
    // few ulps apart; re-symmetrize so the state is Hermitian to the bit.
    R = (0.5 * (R + R.adjoint())).eval();
}

MpdrStepResult mpdr_step(EmaCovTracker& tracker, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& d) {
    tracker.update(x);
    MpdrStepResult out;
    out.w = mvdr_weights(tracker.R, d);
    out.y = apply_weights(out.w, x);
    return out;
}

}  // namespace sshyb
