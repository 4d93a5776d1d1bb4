#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace sshyb {

// Propagation direction in spherical coordinates.
struct Direction {
    double azimuth_rad = 0.0;      // [0, 2*pi)
    double inclination_rad = 0.0;  // [0, pi]; 0 = +z pole
};

// Unit vector (sin th cos ph, sin th sin ph, cos th) for a direction.
Eigen::Vector3d unit_vector(const Direction& dir);

// Array transfer functions on a uniform azimuth x inclination grid.
// Grid node (i_phi, i_theta) has linear index i_phi * n_theta + i_theta,
// phi = 2*pi*i_phi/n_phi, theta = pi*i_theta/n_theta (north pole included,
// south pole not).
struct AtfSet {
    int n_phi = 0;
    int n_theta = 0;
    int num_mics = 0;   // Q
    int num_bands = 0;  // F
    double sample_rate_hz = 0.0;
    std::vector<double> frequencies_hz;            // size F
    std::vector<std::complex<double>> gains;       // [(dir*F + f)*Q + q]

    int num_directions() const { return n_phi * n_theta; }
    Direction direction(int index) const;

    // Steering vector a(direction, band) as a Q-vector view copy.
    Eigen::VectorXcd gain_vector(int dir_index, int band) const;
    std::complex<double>& gain(int dir_index, int band, int mic);
    const std::complex<double>& gain(int dir_index, int band, int mic) const;

    void validate() const;  // counts, finiteness
};

// Quadrature weights for the uniform grid; w_i depends only on theta_i:
//   w(theta) = (2 sin th / (n_phi*n_theta)) * sum_{m=0}^{n_theta/2-1}
//              sin((2m+1) th) / (2m+1)
// Pole weight is exactly 0. n_theta must be even.
std::vector<double> quadrature_weights(int n_phi, int n_theta);
double quadrature_weight_at(double theta, int n_phi, int n_theta);

// Free-field plane-wave ATFs: gain = exp(-i*2*pi*f*tau_q),
// tau_q = -(r_q . u)/c. Mic 0 is conventionally at the origin (gain 1).
AtfSet freefield_atf(const Eigen::MatrixX3d& mic_positions_m, int n_phi, int n_theta,
                     const std::vector<double>& frequencies_hz, double sample_rate_hz,
                     double speed_of_sound = 343.0);

// Nearest grid node by great-circle distance; ties toward the lower index.
int snap_to_grid(const AtfSet& atf, const Direction& target);

// Steering vector for the snapped node at one band, phase-normalized so the
// reference-mic (index 0) entry is real nonnegative.
Eigen::VectorXcd steer(const AtfSet& atf, const Direction& target, int band);
Eigen::VectorXcd steer_node(const AtfSet& atf, int dir_index, int band);

}  // namespace sshyb
