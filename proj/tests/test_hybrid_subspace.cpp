#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sshyb/errors.hpp"
#include "sshyb/hybrid.hpp"
#include "sshyb/noise_fields.hpp"
#include "sshyb/rng.hpp"
#include "sshyb/spatial.hpp"
#include "sshyb/subspace.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace sshyb;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> rfft_frequencies(int fft_len, double fs) {
    std::vector<double> f(fft_len / 2 + 1);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = static_cast<double>(k) * fs / fft_len;
    }
    return f;
}

WeightDictionary small_dictionary(DictionaryVariant variant = DictionaryVariant::SSHyb) {
    Eigen::MatrixX3d mics(2, 3);
    mics << 0.0, 0.0, 0.0, 0.0, -0.08, 0.0;
    const AtfSet atf =
        freefield_atf(mics, 12, 6, rfft_frequencies(160, 10000.0), 10000.0);
    DictionaryConfig cfg;
    cfg.variant = variant;
    return build_dictionary(atf, {kPi / 6, kPi / 2}, cfg);
}

Eigen::VectorXcd random_cvec(GaussianRng& rng, int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = std::complex<double>(rng.normal(), rng.normal());
    }
    return v;
}

Eigen::Matrix2cd random_hermitian2(GaussianRng& rng) {
    Eigen::Matrix2cd r;
    const double a = std::exp(2.0 * rng.normal());
    const double c = std::exp(2.0 * rng.normal());
    const std::complex<double> b(rng.normal(), rng.normal());
    r << a, b, std::conj(b), c;
    return r;
}

}  // namespace

TEST_CASE("hybrid_select matches a brute-force scan oracle") {
    const WeightDictionary dict = small_dictionary();
    GaussianRng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int band = static_cast<int>(rng.raw() % dict.num_bands);
        const Eigen::VectorXcd x = random_cvec(rng, dict.num_mics);

        // Oracle: independent evaluation through the public weight accessor.
        int best = -1;
        double best_p = 1e300;
        std::complex<double> best_y;
        for (int m = 0; m < dict.num_models(); ++m) {
            const std::complex<double> y = dict.weight_vector(m, band).dot(x);
            const double p = std::norm(y);
            if (p < best_p) {
                best_p = p;
                best = m;
                best_y = y;
            }
        }

        const HybridOutput got = hybrid_select(dict, x, band, true);
        CHECK(got.selected_model == best);
        CHECK(std::abs(got.y - best_y) < 1e-15 * std::max(1.0, std::abs(best_y)));
        REQUIRE(static_cast<int>(got.powers.size()) == dict.num_models());
        for (int m = 0; m < dict.num_models(); ++m) {
            const double p = std::norm(dict.weight_vector(m, band).dot(x));
            CHECK(std::abs(got.powers[m] - p) < 1e-12 * std::max(1.0, p));
        }
    }
}

TEST_CASE("hybrid power never exceeds the isotropic model's power") {
    const WeightDictionary dict = small_dictionary();
    GaussianRng rng(37);
    int strictly_smaller = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int band = static_cast<int>(rng.raw() % dict.num_bands);
        const Eigen::VectorXcd x = random_cvec(rng, dict.num_mics);
        const HybridOutput got = hybrid_select(dict, x, band);
        const std::complex<double> y_iso = dict.weight_vector(1, band).dot(x);
        CHECK(std::norm(got.y) <= std::norm(y_iso));
        if (std::norm(got.y) < std::norm(y_iso)) {
            ++strictly_smaller;
        }
    }
    CHECK(strictly_smaller > 0);  // the minimum is not trivially the iso model
}

TEST_CASE("hybrid tie-break picks the lowest model index") {
    // Hand-built dictionary: models 0 and 2 share identical weights, so their
    // powers tie bitwise; the selection must report model 0.
    WeightDictionary dict;
    dict.num_bands = 1;
    dict.num_mics = 2;
    dict.models.resize(3);
    dict.weights = {
        {1.0, 0.0}, {0.5, 0.0},   // model 0
        {0.0, 1.0}, {2.0, 0.0},   // model 1 (larger output for our x)
        {1.0, 0.0}, {0.5, 0.0},   // model 2 == model 0
    };
    Eigen::VectorXcd x(2);
    x << std::complex<double>(0.1, 0.0), std::complex<double>(0.1, 0.0);
    const HybridOutput got = hybrid_select(dict, x, 0, true);
    CHECK(got.powers[0] == got.powers[2]);
    CHECK(got.powers[0] < got.powers[1]);
    CHECK(got.selected_model == 0);
}

TEST_CASE("hybrid_frame equals per-bin selection; argument errors") {
    const WeightDictionary dict = small_dictionary();
    GaussianRng rng(41);
    Eigen::MatrixXcd frame(dict.num_mics, dict.num_bands);
    for (int q = 0; q < dict.num_mics; ++q) {
        for (int f = 0; f < dict.num_bands; ++f) {
            frame(q, f) = std::complex<double>(rng.normal(), rng.normal());
        }
    }
    const HybridFrame hf = hybrid_frame(dict, frame);
    REQUIRE(hf.y.size() == dict.num_bands);
    for (int f = 0; f < dict.num_bands; ++f) {
        const HybridOutput one = hybrid_select(dict, frame.col(f), f);
        CHECK(hf.y[f] == one.y);
        CHECK(hf.selections[f] == one.selected_model);
    }

    WeightDictionary empty;
    empty.num_bands = 1;
    empty.num_mics = 2;
    CHECK_THROWS_AS(hybrid_select(empty, frame.col(0), 0), InvalidArgument);
    CHECK_THROWS_AS(hybrid_select(dict, random_cvec(rng, 3), 0), DimensionMismatch);
    CHECK_THROWS_AS(hybrid_frame(dict, frame.leftCols(7)), DimensionMismatch);
}

TEST_CASE("2x2 Hermitian eigensolver: reconstruction and characteristic polynomial") {
    GaussianRng rng(51);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Matrix2cd r = random_hermitian2(rng);
        const Eig2x2 eig = eig2x2_hermitian(r);

        CHECK(eig.lambda1 >= eig.lambda2);

        // Characteristic-polynomial oracle: lambda^2 - tr*lambda + det = 0.
        const double tr = r(0, 0).real() + r(1, 1).real();
        const double det = (r(0, 0).real() * r(1, 1).real()) - std::norm(r(0, 1));
        const double scale = std::max({1.0, std::abs(tr), std::abs(det)});
        for (double l : {eig.lambda1, eig.lambda2}) {
            CHECK(std::abs(l * l - tr * l + det) < 1e-10 * scale * std::max(1.0, std::abs(l)));
        }

        // Unitary U and exact reconstruction within 1e-12.
        CHECK((eig.U.adjoint() * eig.U - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
        Eigen::Matrix2cd lam = Eigen::Matrix2cd::Zero();
        lam(0, 0) = eig.lambda1;
        lam(1, 1) = eig.lambda2;
        const Eigen::Matrix2cd rec = eig.U * lam * eig.U.adjoint();
        CHECK((rec - r).norm() < 1e-12 * std::max(1.0, r.norm()));

        // Phase convention: first nonzero component of each column real >= 0.
        for (int c = 0; c < 2; ++c) {
            const std::complex<double> lead =
                std::abs(eig.U(0, c)) > 0.0 ? eig.U(0, c) : eig.U(1, c);
            CHECK(std::abs(lead.imag()) < 1e-14);
            CHECK(lead.real() >= 0.0);
        }
    }
}

TEST_CASE("2x2 eigensolver: diagonal input and non-Hermitian rejection") {
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    d(0, 0) = 2.0;
    d(1, 1) = 5.0;
    const Eig2x2 eig = eig2x2_hermitian(d);
    CHECK(eig.lambda1 == 5.0);
    CHECK(eig.lambda2 == 2.0);
    CHECK(eig.U(0, 0) == std::complex<double>(0.0, 0.0));
    CHECK(eig.U(1, 0) == std::complex<double>(1.0, 0.0));

    Eigen::Matrix2cd bad;
    bad << std::complex<double>(1.0, 0.0), std::complex<double>(2.0, 0.0),
           std::complex<double>(0.5, 0.3), std::complex<double>(3.0, 0.0);
    CHECK_THROWS_AS(eig2x2_hermitian(bad), InvalidArgument);
}

TEST_CASE("pca tracker: alpha and EMA accumulation") {
    PcaTracker tracker(0.008, 0.080);
    CHECK(std::abs(tracker.alpha - std::exp(-0.1)) < 1e-12);
    CHECK((tracker.Rz - 1e-6 * Eigen::Matrix2cd::Identity()).norm() == 0.0);

    GaussianRng rng(61);
    Eigen::MatrixX2cd z(16, 2);
    for (int i = 0; i < 16; ++i) {
        z(i, 0) = std::complex<double>(rng.normal(), rng.normal());
        z(i, 1) = std::complex<double>(rng.normal(), rng.normal());
    }
    Eigen::Matrix2cd inst = z.adjoint() * z;
    inst = 0.5 * (inst + inst.adjoint()).eval();

    PcaTracker shadow = tracker;
    const int k = 9;
    for (int i = 0; i < k; ++i) {
        pca_step(tracker, z);
    }
    const double ak = std::pow(shadow.alpha, k);
    const Eigen::Matrix2cd expect =
        ak * 1e-6 * Eigen::Matrix2cd::Identity() + (1.0 - ak) * inst;
    CHECK((tracker.Rz - expect).norm() < 1e-12 * expect.norm());
}

TEST_CASE("pca projection: contraction, rank-1 structure, idempotence") {
    GaussianRng rng(71);
    PcaTracker tracker(0.008, 0.080);
    for (int frame = 0; frame < 60; ++frame) {
        Eigen::MatrixX2cd z(24, 2);
        for (int i = 0; i < 24; ++i) {
            const std::complex<double> common(rng.normal(), rng.normal());
            z(i, 0) = common + 0.3 * std::complex<double>(rng.normal(), rng.normal());
            z(i, 1) = common + 0.3 * std::complex<double>(rng.normal(), rng.normal());
        }
        const SubspaceResult res = pca_step(tracker, z);
        CHECK(res.lambda1 >= res.lambda2);
        CHECK(res.lambda2 >= -1e-12 * res.lambda1);

        // Contraction in the Frobenius sense: ||Z U_S|| <= ||Z||_F.
        const Eigen::VectorXcd zu = z * res.U_S;
        CHECK(zu.norm() <= z.norm() * (1.0 + 1e-12));

        // Z_SS columns are exact scalar multiples of each other.
        const Eigen::VectorXcd col0 = zu * std::conj(res.U_S[0]);
        const Eigen::VectorXcd col1 = zu * std::conj(res.U_S[1]);
        CHECK((col0 * std::conj(res.U_S[1]) - col1 * std::conj(res.U_S[0])).norm() <
              1e-13 * std::max(col0.norm(), col1.norm()));
        CHECK((res.y_out - col0).norm() == 0.0);

        // Idempotence: re-projecting Z_SS with the same U_S changes nothing
        // beyond the last bit (|U_S| = 1 to rounding).
        Eigen::MatrixX2cd zss(24, 2);
        zss.col(0) = col0;
        zss.col(1) = col1;
        const Eigen::VectorXcd zu2 = zss * res.U_S;
        const Eigen::VectorXcd re0 = zu2 * std::conj(res.U_S[0]);
        CHECK((re0 - col0).norm() <= 8.0 * 1e-16 * col0.norm());
    }
}

TEST_CASE("pca pass-through of fully correlated channels") {
    GaussianRng rng(81);
    Eigen::VectorXcd v = random_cvec(rng, 32);
    PcaTracker tracker(0.008, 0.080);
    Eigen::MatrixX2cd z(32, 2);
    z.col(0) = v;
    z.col(1) = v;
    SubspaceResult res;
    for (int i = 0; i < 250; ++i) {  // converge the tracker
        res = pca_step(tracker, z);
    }
    CHECK((res.U_S - Eigen::Vector2cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0))).norm() <
          1e-9);
    CHECK((res.y_out - v).norm() < 1e-12 * v.norm());
}

TEST_CASE("pca degenerate spectrum keeps the hybrid channel untouched") {
    // Orthogonal equal-norm columns make Rz proportional to the identity.
    Eigen::MatrixX2cd z = Eigen::MatrixX2cd::Zero(8, 2);
    z(0, 0) = 3.0;
    z(1, 1) = 3.0;
    PcaTracker tracker(0.008, 0.080);
    for (int i = 0; i < 20; ++i) {
        const SubspaceResult res = pca_step(tracker, z);
        CHECK(res.U_S == Eigen::Vector2cd(1.0, 0.0));
        CHECK((res.y_out - z.col(0)).norm() == 0.0);  // bitwise pass-through
    }
}

TEST_CASE("pca argument errors") {
    PcaTracker tracker(0.008, 0.080);
    CHECK_THROWS_AS(pca_step(tracker, Eigen::MatrixX2cd(0, 2)), InvalidArgument);
    Eigen::MatrixX2cd bad(4, 2);
    bad.setZero();
    bad(2, 1) = std::complex<double>(std::nan(""), 0.0);
    CHECK_THROWS_AS(pca_step(tracker, bad), InvalidArgument);
    CHECK_THROWS_AS(PcaTracker(0.0, 0.08), InvalidArgument);
}
