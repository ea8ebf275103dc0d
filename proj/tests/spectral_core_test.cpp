#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/spectral_core.hpp"

using namespace vlcsim;
using vlcsim::test::gaussian_vector;

namespace {

ComplexSpectrum direct_dft(std::span<const Complex> x) {
    const std::size_t n = x.size();
    ComplexSpectrum out(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t t = 0; t < n; ++t)
            out[k] += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t) / double(n));
    return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double max_off_diagonal(Eigen::MatrixXd m) {
    m.diagonal().setZero();
    return max_abs(m);
}

}  // namespace

TEST_CASE("dft of an impulse is flat and of a constant is DC only") {
    const std::vector<double> impulse{1, 0, 0, 0};
    for (const auto& v : dft(impulse)) CHECK(std::abs(v - Complex(1, 0)) < 1e-15);
    const auto c = dft(std::vector<double>{1, 1, 1, 1});
    CHECK(std::abs(c[0] - Complex(4, 0)) < 1e-15);
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(c[k]) < 1e-15);
}

TEST_CASE("dft matches the direct sum and inverts") {
    RngStream rng(3);
    for (const std::size_t n : {4u, 12u, 16u, 64u, 512u}) {
        std::vector<Complex> x(n);
        for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
        const auto fast = dft(x);
        if (n <= 64) {
            const auto slow = direct_dft(x);
            for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-12);
        }
        const auto back = idft(fast);
        double energy_t = 0, energy_f = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(back[i] - x[i]) < 1e-12);
            energy_t += std::norm(x[i]);
            energy_f += std::norm(fast[i]);
        }
        CHECK(energy_t == doctest::Approx(energy_f / double(n)).epsilon(1e-12));
    }
}

TEST_CASE("dft rejects empty input") {
    CHECK_THROWS_AS(dft(std::vector<Complex>{}), InvalidArgument);
    CHECK_THROWS_AS(idft(std::vector<Complex>{}), InvalidArgument);
}

TEST_CASE("hermitian_extend places symbols and mirrors conjugates") {
    const std::vector<Complex> s{{1, 1}};
    const auto x = hermitian_extend(s, 4);
    REQUIRE(x.size() == 4);
    CHECK(x[0] == Complex(0, 0));
    CHECK(x[1] == Complex(1, 1));
    CHECK(x[2] == Complex(0, 0));
    CHECK(x[3] == Complex(1, -1));

    for (const auto& v : hermitian_extend(std::vector<Complex>(3), 8)) CHECK(v == Complex(0, 0));

    RngStream rng(5);
    std::vector<Complex> qpsk(31);
    for (auto& v : qpsk) v = {rng.bit() ? 1.0 : -1.0, rng.bit() ? 1.0 : -1.0};
    for (const auto& v : idft(hermitian_extend(qpsk, 64))) CHECK(std::abs(v.imag()) < 1e-12);

    CHECK_THROWS_AS(hermitian_extend(std::vector<Complex>(4), 8), InvalidArgument);
}

TEST_CASE("circulant_apply and its transpose") {
    const std::vector<double> x{1, 2, 3, 4};
    const auto id = circulant_apply(ChannelImpulseResponse::identity(), x);
    CHECK(id == x);
    CHECK(circulant_apply(ChannelImpulseResponse({0, 1}), x) == std::vector<double>{4, 1, 2, 3});
    CHECK(circulant_matched_apply(ChannelImpulseResponse({0, 1}), x) == std::vector<double>{2, 3, 4, 1});
    CHECK_THROWS_AS(circulant_apply(ChannelImpulseResponse({1, 1, 1, 1, 1}), x), InvalidArgument);
    CHECK_THROWS_AS(circulant_matched_apply(ChannelImpulseResponse({1, 1, 1, 1, 1}), x), InvalidArgument);

    RngStream rng(9);
    const ChannelImpulseResponse h({1, 0.5, 0.25});
    const auto v = gaussian_vector(16, rng);
    const Eigen::MatrixXd c = circulant_matrix(h, 16);
    const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(v.data(), 16);
    const Eigen::VectorXd dense = c * xv;
    const Eigen::VectorXd dense_t = c.transpose() * xv;
    const auto fast = circulant_apply(h, v);
    const auto fast_t = circulant_matched_apply(h, v);
    for (int i = 0; i < 16; ++i) {
        CHECK(std::abs(fast[std::size_t(i)] - dense[i]) < 1e-10);
        CHECK(std::abs(fast_t[std::size_t(i)] - dense_t[i]) < 1e-10);
    }
}

TEST_CASE("circulant_apply equals pointwise product in the frequency domain") {
    RngStream rng(11);
    const ChannelImpulseResponse h(gaussian_vector(5, rng));
    const auto x = gaussian_vector(32, rng);
    const auto hk = h.frequency_response(32);
    const auto xk = dft(x);
    ComplexSpectrum prod(32);
    for (std::size_t k = 0; k < 32; ++k) prod[k] = hk[k] * xk[k];
    const auto ref = idft(prod);
    const auto y = circulant_apply(h, x);
    for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(y[i] - ref[i].real()) < 1e-10);
}

TEST_CASE("channel impulse response needs a nonzero tap") {
    CHECK_THROWS_AS(ChannelImpulseResponse({}), InvalidArgument);
    CHECK_THROWS_AS(ChannelImpulseResponse({0.0, 0.0}), InvalidArgument);
    const auto n = ChannelImpulseResponse({1, 0.5, 0.25}).normalized();
    CHECK(n.energy() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("trig_eigenbasis closed form at N=4") {
    const auto b = trig_eigenbasis(4).matrix;
    const double r = std::sqrt(0.5);
    const Eigen::Matrix4d expected{{0.5, r, 0, 0.5}, {0.5, 0, r, -0.5}, {0.5, -r, 0, 0.5}, {0.5, 0, -r, -0.5}};
    CHECK(max_abs(b - expected) < 1e-15);
}

TEST_CASE("trig_eigenbasis is orthonormal and diagonalizes C^T C") {
    const auto b8 = trig_eigenbasis(8).matrix;
    CHECK(max_abs(b8.transpose() * b8 - Eigen::MatrixXd::Identity(8, 8)) < 1e-12);

    const auto basis = trig_eigenbasis(16);
    const ChannelImpulseResponse h({1, 0.5});
    const Eigen::MatrixXd c = circulant_matrix(h, 16);
    const Eigen::MatrixXd lambda = basis.matrix.transpose() * c.transpose() * c * basis.matrix;
    CHECK(max_off_diagonal(lambda) < 1e-10);
    const auto hk = h.frequency_response(16);
    for (std::size_t col = 0; col < 16; ++col)
        CHECK(lambda(long(col), long(col)) == doctest::Approx(std::norm(hk[basis.columns[col].frequency])).epsilon(1e-12));

    CHECK_THROWS_AS(trig_eigenbasis(6), InvalidArgument);
}

TEST_CASE("qct family at N=4 assigns one column per stream") {
    const auto f = build_qct_family(4);
    const auto b = trig_eigenbasis(4).matrix;
    for (std::size_t v = 0; v < 4; ++v) {
        REQUIRE(f.block(v).cols() == 1);
        CHECK(max_abs(f.block(v) - b.col(long(v))) < 1e-15);
    }
}

TEST_CASE("qct family diagonalizes every circulant channel") {
    RngStream rng(17);
    for (const char* policy : {"round-robin", "contiguous"}) {
        const auto f = build_qct_family(64, policy);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t taps = 1 + std::size_t(rng.engine()() % 8);
            const ChannelImpulseResponse h(gaussian_vector(taps, rng));
            CHECK(check_diagonalization(f, h).worst() < 1e-9);
        }
        const Eigen::MatrixXd all = f.combined();
        CHECK(max_abs(all.transpose() * all - Eigen::MatrixXd::Identity(64, 64)) < 1e-10);
    }
    CHECK_THROWS_AS(build_qct_family(64, "diagonal"), InvalidArgument);
}

TEST_CASE("qct eigenvalues equal |H(k)|^2 at the assigned frequency") {
    const auto f = build_qct_family(64);
    const ChannelImpulseResponse h({1, 0.5, 0.25});
    const Eigen::MatrixXd c = circulant_matrix(h, 64);
    const auto hk = h.frequency_response(64);
    for (std::size_t v = 0; v < 4; ++v) {
        const Eigen::MatrixXd lambda = f.block(v).transpose() * c.transpose() * c * f.block(v);
        CHECK(max_off_diagonal(lambda) < 1e-10);
        for (std::size_t i = 0; i < f.columns_per_stream(); ++i)
            CHECK(lambda(long(i), long(i)) ==
                  doctest::Approx(std::norm(hk[f.labels(v)[i].frequency])).epsilon(1e-12));
    }
}

TEST_CASE("identity channel gives unit eigenvalues") {
    const auto f = build_qct_family(512);
    for (std::size_t v = 0; v < 4; ++v) {
        const Eigen::MatrixXd lambda = f.block(v).transpose() * f.block(v);
        CHECK(max_abs(lambda - Eigen::MatrixXd::Identity(128, 128)) < 1e-12);
    }
}

TEST_CASE("round-robin deals columns in frequency order") {
    const auto f = build_qct_family(16);
    const auto basis = trig_eigenbasis(16);
    for (std::size_t col = 0; col < 16; ++col) {
        const auto& label = f.labels(col % 4)[col / 4];
        CHECK(label.frequency == basis.columns[col].frequency);
        CHECK(label.kind == basis.columns[col].kind);
    }
}

TEST_CASE("perturbed family breaks diagonalization") {
    const auto f = build_qct_family(64).perturbed(0, 1e-3);
    CHECK(check_diagonalization(f, ChannelImpulseResponse({1, 0.5})).worst() > 1e-6);
}

TEST_CASE("papr_db examples and invariances") {
    CHECK(papr_db(std::vector<double>(8, 2.5)) == doctest::Approx(0.0));
    CHECK(papr_db(std::vector<double>{1, -1, 1, -1}) == doctest::Approx(0.0));
    CHECK(papr_db(std::vector<double>{1, 0, 0, 0}) == doctest::Approx(6.0206).epsilon(1e-5));
    CHECK_THROWS_AS(papr_db(std::vector<double>(4, 0.0)), InvalidArgument);

    RngStream rng(23);
    auto x = gaussian_vector(64, rng);
    const double p = papr_db(x);
    for (auto& v : x) v *= -3.7;
    CHECK(papr_db(x) == doctest::Approx(p).epsilon(1e-12));
}
