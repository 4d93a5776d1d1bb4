#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sshyb/noise_fields.hpp"

namespace sshyb {

// Minimum-power model selection at one TF bin.
struct HybridOutput {
    std::complex<double> y;
    int selected_model = 0;
    std::vector<double> powers;  // filled only when requested (diagnostics)
};

// p_m = |w_m^H x|^2 for all models; j = argmin (ties -> lowest index);
// y = w_j^H x.
HybridOutput hybrid_select(const WeightDictionary& dict, const Eigen::VectorXcd& x,
                           int band, bool keep_powers = false);

// Whole frame (Q x F): per-band hybrid_select.
struct HybridFrame {
    Eigen::VectorXcd y;            // F
    std::vector<int> selections;   // F
};
HybridFrame hybrid_frame(const WeightDictionary& dict, const Eigen::MatrixXcd& frame);

}  // namespace sshyb
