#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/modems.hpp"

using namespace vlcsim;
using vlcsim::test::random_bits;

namespace {

std::vector<double> feed(const QctModem& m, const StreamFrames& s, const ChannelImpulseResponse& h) {
    const auto sum = QctModem::photodetector_sum(s);
    return transmit(sum, h, m.config().cp_len);
}

}  // namespace

TEST_CASE("PAM mapping follows the Gray order") {
    const PamConstellation p2(2);
    const auto two = p2.map(std::vector<std::uint8_t>{0, 1});
    CHECK(two[0] == doctest::Approx(-1.0));
    CHECK(two[1] == doctest::Approx(1.0));

    const PamConstellation p4(4);
    const auto four = p4.map(std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1, 0});
    const double s = 1.0 / std::sqrt(5.0);
    CHECK(four[0] == doctest::Approx(-3 * s));
    CHECK(four[1] == doctest::Approx(-1 * s));
    CHECK(four[2] == doctest::Approx(1 * s));
    CHECK(four[3] == doctest::Approx(3 * s));

    CHECK_THROWS_AS(p4.map(std::vector<std::uint8_t>{0, 1, 1}), InvalidArgument);
    CHECK_THROWS_AS(PamConstellation(6), InvalidArgument);
}

TEST_CASE("PAM levels have unit energy and Gray neighbours") {
    for (const std::size_t m : {2u, 4u, 8u, 16u}) {
        const PamConstellation p(m);
        double e = 0;
        for (const double l : p.levels()) e += l * l;
        CHECK(e / double(m) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i + 1 < m; ++i) {
            CHECK(p.levels()[i] < p.levels()[i + 1]);
            CHECK(std::popcount(p.label(i) ^ p.label(i + 1)) == 1);
        }
    }
}

TEST_CASE("PAM and QAM round trips") {
    RngStream rng(4);
    const auto bits = random_bits(10'008, rng);
    for (const std::size_t m : {2u, 4u, 8u, 16u}) {
        const PamConstellation p(m);
        const std::vector<std::uint8_t> chunk(bits.begin(), bits.begin() + long(10'000 / p.bits_per_symbol() * p.bits_per_symbol()));
        CHECK(p.demap(p.map(chunk)) == Bits(chunk.begin(), chunk.end()));
    }
    for (const std::size_t m : {4u, 16u, 64u}) {
        const QamConstellation q(m);
        double e = 0;
        for (const auto& pt : q.points()) e += std::norm(pt);
        CHECK(e / double(m) == doctest::Approx(1.0).epsilon(1e-12));
        const std::vector<std::uint8_t> chunk(bits.begin(), bits.begin() + long(10'000 / q.bits_per_symbol() * q.bits_per_symbol()));
        CHECK(q.demap(q.map(chunk)) == Bits(chunk.begin(), chunk.end()));
    }
}

TEST_CASE("maximum likelihood detection") {
    const PamConstellation p(4);
    const double s = 1.0 / std::sqrt(5.0);
    CHECK(mld_detect(p.levels()[2], p) == p.levels()[2]);
    CHECK(mld_detect(0.0, p) == doctest::Approx(-s));
    CHECK(mld_index(0.5, std::vector<double>{0.0, 1.0}) == 0);

    RngStream rng(8);
    for (const std::size_t m : {2u, 4u, 8u, 16u}) {
        const PamConstellation pam(m);
        for (int t = 0; t < 2000; ++t) {
            const std::size_t i = std::size_t(rng.engine()() % m);
            const double u = (double(rng.engine()() % 1'000'000) / 1'000'000.0 - 0.5) * 0.999;
            const double x = pam.levels()[i] + u * pam.min_distance();
            CHECK(pam.detect(x) == i);
            CHECK(mld_index(x, pam.levels()) == i);
            CHECK(mld_detect(mld_detect(x, pam), pam) == mld_detect(x, pam));
        }
    }
    const QamConstellation q(16);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t i = std::size_t(rng.engine()() % 16);
        const Complex x = q.points()[i] + Complex(rng.gaussian(), rng.gaussian()) * 0.05;
        CHECK(q.detect(x) == mld_index(x, q.points()));
        CHECK(mld_detect(mld_detect(x, q), q) == mld_detect(x, q));
    }
}

TEST_CASE("DC bias factor") {
    CHECK(dc_bias_factor(0.0) == 0.0);
    CHECK(dc_bias_factor(13.0) == doctest::Approx(4.35351).epsilon(1e-5));
    CHECK(dc_bias_factor(6.0) == doctest::Approx(std::sqrt(std::pow(10.0, 0.6) - 1.0)).epsilon(1e-15));
    CHECK(dc_bias_factor(6.0) == doctest::Approx(1.72658).epsilon(1e-5));
    CHECK_THROWS_AS(dc_bias_factor(-1.0), InvalidArgument);
}

TEST_CASE("DCO-OFDM waveform properties") {
    OfdmConfig cfg;
    cfg.n = 64;
    cfg.qam_order = 4;
    cfg.clip = false;
    const DcoOfdmModem m(cfg);
    RngStream rng(10);
    const auto bits = random_bits(m.bits_per_frame(), rng);
    const auto frame = m.modulate_frame(bits);
    REQUIRE(frame.size() == 68);
    const auto body = remove_cp(frame, 4);
    double mean = 0;
    for (const double v : body) mean += v;
    CHECK(mean / 64.0 == doctest::Approx(m.dc_level()).epsilon(1e-12));
    CHECK(m.dc_level() == doctest::Approx(dc_bias_factor(13.0) * std::sqrt(m.signal_power())));

    const auto zeros = m.modulate_symbols(std::vector<Complex>(31));
    for (const double v : zeros) CHECK(v == doctest::Approx(m.dc_level()));

    cfg.n = 512;
    const DcoOfdmModem big(cfg);
    const auto syms = big.constellation().map(random_bits(big.bits_per_frame(), rng));
    for (const auto& v : idft(hermitian_extend(syms, 512))) CHECK(std::abs(v.imag()) < 1e-12);

    CHECK_THROWS_AS(m.modulate(std::vector<std::uint8_t>(m.bits_per_frame() + 1)), InvalidArgument);
}

TEST_CASE("DCO-OFDM noiseless loopback") {
    RngStream rng(12);
    for (const auto& taps : {std::vector<double>{1.0}, std::vector<double>{1, 0.5, 0.25}}) {
        const auto h = ChannelImpulseResponse(taps).normalized();
        for (const std::size_t order : {4u, 16u}) {
            OfdmConfig cfg;
            cfg.qam_order = order;
            const DcoOfdmModem m(cfg);
            const auto bits = random_bits(m.bits_per_frame() * 50, rng);
            std::vector<RealFrame> rx;
            for (const auto& f : m.modulate(bits)) rx.push_back(transmit(f, h, cfg.cp_len));
            CHECK(m.demodulate(rx, h) == Bits(bits.begin(), bits.end()));
        }
    }
}

TEST_CASE("DCO-OFDM rejects a channel with a null data bin") {
    OfdmConfig cfg;
    cfg.n = 16;
    const DcoOfdmModem m(cfg);
    CHECK_THROWS_AS(m.equalizer(ChannelImpulseResponse({1, 0, 0, 0, -1})), SingularChannelError);
    CHECK_NOTHROW(m.equalizer(ChannelImpulseResponse({1, -1})));
}

TEST_CASE("QCT streams at N=4 are scaled basis columns") {
    QctConfig cfg;
    cfg.n = 4;
    cfg.cp_len = 1;
    const QctModem m(cfg);
    const std::vector<double> s{0.3, -1.2, 0.7, 2.0};
    const auto streams = m.ac_streams_from_symbols(s);
    for (std::size_t v = 0; v < 4; ++v)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(streams[v][i] == doctest::Approx(m.family().block(v)(long(i), 0) * s[v]).epsilon(1e-15));
}

TEST_CASE("QCT pre-bias streams are zero mean apart from the DC carrier") {
    const QctModem m(QctConfig{});
    RngStream rng(13);
    const auto symbols = m.constellation().map(random_bits(m.bits_per_frame(), rng));
    const auto streams = m.ac_streams_from_symbols(symbols);
    for (std::size_t v = 0; v < 4; ++v) {
        double mean = 0;
        for (const double x : streams[v]) mean += x;
        mean /= 512.0;
        double expected = 0;
        for (std::size_t i = 0; i < 128; ++i)
            if (m.family().labels(v)[i].kind == BasisKind::dc) expected = symbols[v * 128 + i] / std::sqrt(512.0);
        CHECK(std::abs(mean - expected) < 1e-9 * std::sqrt(512.0));
    }
}

TEST_CASE("QCT transform preserves frame energy") {
    const QctModem m(QctConfig{});
    RngStream rng(14);
    const auto symbols = m.constellation().map(random_bits(m.bits_per_frame(), rng));
    const auto sum = QctModem::photodetector_sum(m.ac_streams_from_symbols(symbols));
    double es = 0, ex = 0;
    for (const double v : symbols) es += v * v;
    for (const double v : sum) ex += v * v;
    CHECK(std::abs(es - ex) < 1e-10 * es);
}

TEST_CASE("QCT noiseless loopback over flat and multi-tap channels") {
    RngStream rng(15);
    for (const auto& taps : {std::vector<double>{1.0}, std::vector<double>{1, 0.5, 0.25}}) {
        const auto h = ChannelImpulseResponse(taps).normalized();
        for (const char* policy : {"round-robin", "contiguous"}) {
            QctConfig cfg;
            cfg.assignment = policy;
            const QctModem m(cfg);
            const auto bits = random_bits(m.bits_per_frame() * 50, rng);
            FrameStats stats;
            std::vector<RealFrame> rx;
            for (const auto& f : m.modulate(bits, &stats)) rx.push_back(feed(m, f, h));
            CHECK(m.demodulate(rx, h) == Bits(bits.begin(), bits.end()));
            CHECK(stats.clipped_fraction() < 1e-3);
        }
    }
}

TEST_CASE("QCT streams do not leak into each other") {
    const QctModem m(QctConfig{});
    const auto h = ChannelImpulseResponse({1, 0.5, 0.25}).normalized();
    const auto eq = m.equalizer(h);
    RngStream rng(16);
    for (std::size_t v = 0; v < 4; ++v) {
        auto symbols = m.constellation().map(random_bits(m.bits_per_frame(), rng));
        auto only = std::vector<double>(512, 0.0);
        std::copy_n(symbols.begin() + long(v * 128), 128, only.begin() + long(v * 128));
        auto received = [&](const std::vector<double>& s) {
            auto sum = QctModem::photodetector_sum(m.ac_streams_from_symbols(s));
            for (auto& x : sum) x += 4.0 * m.dc_level();
            return transmit(add_cp(sum, 4), h, 4);
        };
        const auto rx_all = received(symbols);
        const auto rx_one = received(only);
        const auto est_all = m.equalized_symbols(rx_all, eq);
        const auto est_one = m.equalized_symbols(rx_one, eq);
        for (std::size_t i = v * 128; i < (v + 1) * 128; ++i) {
            CHECK(std::abs(est_all[i] - symbols[i]) < 1e-9);
            CHECK(std::abs(est_one[i] - symbols[i]) < 1e-9);
        }
    }
}

TEST_CASE("QCT needs every eigenvalue nonzero") {
    QctConfig cfg;
    cfg.n = 16;
    const QctModem m(cfg);
    CHECK_THROWS_AS(m.equalizer(ChannelImpulseResponse({1, -1})), SingularChannelError);
}

TEST_CASE("raising the bias never clips more samples") {
    RngStream rng(18);
    const auto bits = random_bits(QctModem(QctConfig{}).bits_per_frame() * 20, rng);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (const double db : {0.0, 3.0, 6.0, 9.0, 13.0, 16.0}) {
        QctConfig cfg;
        cfg.bias_db = db;
        FrameStats stats;
        QctModem(cfg).modulate(bits, &stats);
        CHECK(stats.clipped <= previous);
        previous = stats.clipped;
    }
}

TEST_CASE("crosstalk matrix") {
    const auto bands = default_receiver_bands();
    std::array<SpectralDistribution, 4> inside;
    for (std::size_t c = 0; c < 4; ++c) {
        const double lo = bands[c].lo_nm + 2, hi = bands[c].hi_nm - 2;
        inside[c] = SpectralDistribution::from_function([=](double nm) { return nm >= lo && nm <= hi ? 1.0 : 0.0; });
    }
    CHECK((crosstalk_matrix(inside, bands) - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    std::array<SpectralDistribution, 4> leds;
    const auto params = default_led_channels();
    for (std::size_t c = 0; c < 4; ++c) leds[c] = h_model_spd(params[c]);
    const Eigen::Matrix4d k = crosstalk_matrix(leds, bands);
    for (int j = 0; j < 4; ++j) {
        CHECK(k.col(j).sum() <= 1.0 + 1e-12);
        CHECK(k.col(j).minCoeff() >= 0.0);
        for (int i = 0; i < 4; ++i)
            if (i != j) CHECK(k(j, j) > k(i, j));
        const double ref = leds[std::size_t(j)].band_integral(bands[0].lo_nm, bands[0].hi_nm) / leds[std::size_t(j)].integral();
        CHECK(k(0, j) == doctest::Approx(ref).epsilon(1e-12));
    }

    leds[2] = SpectralDistribution();
    CHECK_THROWS_AS(crosstalk_matrix(leds, bands), InvalidArgument);
}

TEST_CASE("CSK mapping and power") {
    CskConfig cfg;
    cfg.avg_power = 2.5;
    const CskModem m(cfg);
    const auto first = m.modulate(std::vector<std::uint8_t>{0, 0});
    REQUIRE(first.size() == 1);
    CHECK(first[0][0] > 0);
    CHECK(first[0][1] == 0);
    CHECK(first[0][2] == 0);
    CHECK(first[0][3] == 0);
    CHECK_THROWS_AS(m.modulate(std::vector<std::uint8_t>{0, 1, 1}), InvalidArgument);

    RngStream rng(19);
    const auto symbols = m.modulate(random_bits(400'000, rng));
    std::array<double, 4> on{};
    double power = 0;
    for (const auto& s : symbols)
        for (std::size_t c = 0; c < 4; ++c) {
            on[c] += s[c] > 0 ? 1 : 0;
            power += s[c] * s[c];
        }
    const double n = double(symbols.size());
    for (const double count : on) CHECK(std::abs(count / n - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
    CHECK(power / n == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("CSK noiseless loopback with identity and derived crosstalk") {
    RngStream rng(20);
    const auto bits = random_bits(100'000, rng);
    std::array<SpectralDistribution, 4> leds;
    const auto params = default_led_channels();
    for (std::size_t c = 0; c < 4; ++c) leds[c] = h_model_spd(params[c]);
    for (const Eigen::Matrix4d& k : {Eigen::Matrix4d(Eigen::Matrix4d::Identity()),
                                     crosstalk_matrix(leds, default_receiver_bands())}) {
        CskConfig cfg;
        cfg.crosstalk = k;
        const CskModem m(cfg);
        auto tx = m.modulate(bits);
        for (auto& s : tx) s = m.apply_crosstalk(s);
        CHECK(m.demodulate(tx) == Bits(bits.begin(), bits.end()));
    }
}
