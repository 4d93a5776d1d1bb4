#include "sshyb/hybrid.hpp"

#include "sshyb/errors.hpp"

#include <complex>
#include <limits>

namespace sshyb {

HybridOutput hybrid_select(const WeightDictionary& dict, const Eigen::VectorXcd& x,
                           int band, bool keep_powers) {
    const int m_total = dict.num_models();
    const int q = dict.num_mics;
    if (m_total == 0) {
        throw InvalidArgument("hybrid_select: empty dictionary");
    }
    if (band < 0 || band >= dict.num_bands) {
        throw InvalidArgument("hybrid_select: band index out of range");
    }
    if (x.size() != q) {
        throw DimensionMismatch("hybrid_select: input channel count mismatch");
    }

    HybridOutput out;
    if (keep_powers) {
        out.powers.resize(m_total);
    }
    double best_power = std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_total; ++m) {
        const std::size_t base =
            (static_cast<std::size_t>(m) * dict.num_bands + band) * q;
        std::complex<double> y(0.0, 0.0);
        for (int i = 0; i < q; ++i) {
            y += std::conj(dict.weights[base + i]) * x[i];
        }
        const double p = std::norm(y);
        if (keep_powers) {
            out.powers[m] = p;
        }
        if (p < best_power) {  // strict: ties keep the lowest model index
            best_power = p;
            out.y = y;
            out.selected_model = m;
        }
    }
    return out;
}

HybridFrame hybrid_frame(const WeightDictionary& dict, const Eigen::MatrixXcd& frame) {
    if (frame.rows() != dict.num_mics) {
        throw DimensionMismatch("hybrid_frame: channel count mismatch");
    }
    if (frame.cols() != dict.num_bands) {
        throw DimensionMismatch("hybrid_frame: band count mismatch");
    }
    HybridFrame out;
    out.y.resize(dict.num_bands);
    out.selections.resize(dict.num_bands);
    Eigen::VectorXcd x(dict.num_mics);
    for (int f = 0; f < dict.num_bands; ++f) {
        x = frame.col(f);
        const HybridOutput sel = hybrid_select(dict, x, f);
        out.y[f] = sel.y;
        out.selections[f] = sel.selected_model;
    }
    return out;
}

}  // namespace sshyb
