#include "vlcsim/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "vlcsim/errors.hpp"

namespace vlcsim {

// ---------------------------------------------------------------------------
// Parallel helper

std::size_t resolve_threads(std::size_t requested) noexcept {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(resolve_threads(threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Analytic oracles

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

void require_pam_order(std::size_t order) {
    if (order != 2 && order != 4 && order != 8 && order != 16)
        throw InvalidArgument("analytic PAM BER supports M in {2, 4, 8, 16}");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double analytic_pam_ber(std::size_t order, double snr_per_bit_db) {
    require_pam_order(order);
    const PamConstellation pam(order);
    const auto k = static_cast<double>(pam.bits_per_symbol());
    const double gamma = db_to_linear(snr_per_bit_db);
    if (std::isinf(gamma)) return 0.0;
    // Unit symbol energy: Eb = 1/k, N0 = Eb/gamma, per-dimension variance N0/2.
    const double sigma = std::sqrt(1.0 / (k * gamma) / 2.0);
    const auto& levels = pam.levels();
    const std::size_t m = order;
    double weighted = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double lo = j == 0 ? -std::numeric_limits<double>::infinity() : 0.5 * (levels[j - 1] + levels[j]);
            const double hi = j == m - 1 ? std::numeric_limits<double>::infinity() : 0.5 * (levels[j] + levels[j + 1]);
            const double p = q_function((lo - levels[i]) / sigma) - q_function((hi - levels[i]) / sigma);
            weighted += p * static_cast<double>(std::popcount(pam.label(i) ^ pam.label(j)));
        }
    }
    return weighted / (static_cast<double>(m) * k);
}

double approximate_pam_ber(std::size_t order, double snr_per_bit_db) {
    require_pam_order(order);
    const auto m = static_cast<double>(order);
    const double k = std::log2(m);
    const double gamma = db_to_linear(snr_per_bit_db);
    return 2.0 * (m - 1.0) / (m * k) * q_function(std::sqrt(6.0 * k / (m * m - 1.0) * gamma));
}

double analytic_qam_ber(std::size_t order, double snr_per_bit_db) {
    const QamConstellation qam(order);
    return analytic_pam_ber(qam.rail().order(), snr_per_bit_db);
}

double analytic_orthogonal_ber(std::size_t order, double snr_per_bit_db) {
    if (order < 2 || (order & (order - 1)) != 0) throw InvalidArgument("orthogonal order must be a power of two");
    const double gamma = db_to_linear(snr_per_bit_db);
    if (std::isinf(gamma)) return 0.0;
    const double k = std::log2(static_cast<double>(order));
    const double mean = std::sqrt(2.0 * k * gamma);  // sqrt(2 Es / N0)
    const double others = static_cast<double>(order - 1);
    // Ps = integral phi(y - mean) * (1 - (1 - Q(y))^(M-1)) dy, Simpson's rule.
    const double lo = mean - 12.0;
    const double hi = mean + 12.0;
    const std::size_t steps = 6000;
    const double h = (hi - lo) / static_cast<double>(steps);
    double acc = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double y = lo + h * static_cast<double>(i);
        const double q = q_function(y);
        // 1 - (1-q)^n without cancellation for small q.
        const double miss = -std::expm1(others * std::log1p(-q));
        const double f = std::exp(-0.5 * (y - mean) * (y - mean)) / std::sqrt(2.0 * std::numbers::pi) * miss;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f;
    }
    const double ps = acc * h / 3.0;
    return static_cast<double>(order) / (2.0 * others) * ps;
}

// ---------------------------------------------------------------------------
// Monte Carlo BER

double BerPoint::standard_error(double p) const noexcept {
    if (bits == 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
}

void fill_random_bits(std::span<std::uint8_t> bits, RngStream& rng) {
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i % 64 == 0) word = rng.engine()();
        bits[i] = static_cast<std::uint8_t>(word & 1U);
        word >>= 1;
    }
}

namespace {

std::uint64_t count_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

bool is_identity(const ChannelImpulseResponse& h) { return h.length() == 1 && h.taps()[0] == 1.0; }

class QctLink final : public LinkSimulator {
public:
    QctLink(QctModem modem, ChannelImpulseResponse h)
        : modem_(std::move(modem)), h_(std::move(h)), eq_(modem_.equalizer(h_)) {}

    std::string scheme() const override { return "qct"; }
    std::size_t bits_per_frame() const override { return modem_.bits_per_frame(); }
    double energy_per_bit() const override {
        return modem_.ac_frame_energy() * h_.energy() / static_cast<double>(bits_per_frame());
    }
    std::uint64_t run_frame(double noise_variance, RngStream& rng, FrameStats& stats) const override {
        Bits bits(bits_per_frame());
        fill_random_bits(bits, rng);
        const auto streams = modem_.modulate_frame(bits, &stats);
        RealFrame y = QctModem::photodetector_sum(streams);
        if (!is_identity(h_)) y = transmit(y, h_, modem_.config().cp_len);
        add_gaussian_noise(y, noise_variance, rng);
        return count_errors(bits, modem_.demodulate_frame(y, eq_));
    }

private:
    QctModem modem_;
    ChannelImpulseResponse h_;
    QctEqualizer eq_;
};

class OfdmLink final : public LinkSimulator {
public:
    OfdmLink(DcoOfdmModem modem, ChannelImpulseResponse h)
        : modem_(std::move(modem)), h_(std::move(h)), response_(modem_.equalizer(h_)) {}

    std::string scheme() const override { return "dco-ofdm"; }
    std::size_t bits_per_frame() const override { return modem_.bits_per_frame(); }
    double energy_per_bit() const override {
        return modem_.ac_frame_energy() * h_.energy() / static_cast<double>(bits_per_frame());
    }
    std::uint64_t run_frame(double noise_variance, RngStream& rng, FrameStats& stats) const override {
        Bits bits(bits_per_frame());
        fill_random_bits(bits, rng);
        RealFrame y = modem_.modulate_frame(bits, &stats);
        if (!is_identity(h_)) y = transmit(y, h_, modem_.config().cp_len);
        add_gaussian_noise(y, noise_variance, rng);
        return count_errors(bits, modem_.demodulate_frame(y, response_));
    }

private:
    DcoOfdmModem modem_;
    ChannelImpulseResponse h_;
    ComplexSpectrum response_;
};

class CskLink final : public LinkSimulator {
public:
    CskLink(CskModem modem, std::size_t symbols) : modem_(std::move(modem)), symbols_(symbols) {
        if (symbols_ == 0) throw InvalidArgument("csk link: frame needs at least one symbol");
    }

    std::string scheme() const override { return "csk"; }
    std::size_t bits_per_frame() const override { return symbols_ * CskModem::bits_per_symbol; }
    // One symbol of electrical energy avg_power carries two bits.
    double energy_per_bit() const override {
        return modem_.config().avg_power / static_cast<double>(CskModem::bits_per_symbol);
    }
    std::uint64_t run_frame(double noise_variance, RngStream& rng, FrameStats& stats) const override {
        Bits bits(bits_per_frame());
        fill_random_bits(bits, rng);
        auto rx = modem_.modulate(bits);
        const double sigma = std::sqrt(noise_variance);
        for (auto& s : rx) {
            s = modem_.apply_crosstalk(s);
            if (sigma > 0.0)
                for (auto& v : s) v += sigma * rng.gaussian();
        }
        stats.samples += rx.size() * csk_band_count;
        return count_errors(bits, modem_.demodulate(rx));
    }

private:
    CskModem modem_;
    std::size_t symbols_;
};

std::uint64_t scheme_salt(const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::unique_ptr<LinkSimulator> make_qct_link(QctModem modem, ChannelImpulseResponse h) {
    return std::make_unique<QctLink>(std::move(modem), std::move(h));
}

std::unique_ptr<LinkSimulator> make_ofdm_link(DcoOfdmModem modem, ChannelImpulseResponse h) {
    return std::make_unique<OfdmLink>(std::move(modem), std::move(h));
}

std::unique_ptr<LinkSimulator> make_csk_link(CskModem modem, std::size_t symbols_per_frame) {
    return std::make_unique<CskLink>(std::move(modem), symbols_per_frame);
}

double noise_variance_for(double energy_per_bit, double snr_per_bit_db) {
    if (!(energy_per_bit > 0.0)) throw InvalidArgument("noise_variance_for: energy per bit must be positive");
    if (std::isnan(snr_per_bit_db)) throw InvalidArgument("noise_variance_for: SNR is NaN");
    const double gamma = db_to_linear(snr_per_bit_db);
    if (std::isinf(gamma)) return 0.0;
    return energy_per_bit / (2.0 * gamma);
}

BerCurve run_ber_sweep(const LinkSimulator& link, std::span<const double> snr_db, const StopRule& stop,
                       std::uint64_t seed, std::size_t threads) {
    if (stop.max_bits == 0) throw InvalidArgument("run_ber_sweep: max_bits must be positive");
    BerCurve curve;
    curve.scheme = link.scheme();
    curve.seed = seed;
    const std::uint64_t stream_seed = seed ^ scheme_salt(curve.scheme);
    const std::uint64_t bpf = link.bits_per_frame();
    const std::uint64_t max_frames = (stop.max_bits + bpf - 1) / bpf;
    const double eb = link.energy_per_bit();

    for (std::size_t p = 0; p < snr_db.size(); ++p) {
        BerPoint point;
        point.snr_db = snr_db[p];
        point.noise_variance = noise_variance_for(eb, snr_db[p]);
        std::uint64_t frames_done = 0;
        while (true) {
            const auto count = static_cast<std::size_t>(std::min<std::uint64_t>(ber_round_frames, max_frames - frames_done));
            std::vector<std::uint64_t> errors(count, 0);
            std::vector<FrameStats> stats(count);
            parallel_for(count, threads, [&](std::size_t i) {
                auto rng = RngStream::substream(stream_seed, p, frames_done + i);
                errors[i] = link.run_frame(point.noise_variance, rng, stats[i]);
            });
            for (std::size_t i = 0; i < count; ++i) {
                point.errors += errors[i];
                curve.tx_stats += stats[i];
            }
            frames_done += count;
            point.bits = frames_done * bpf;
            if (point.errors >= stop.min_errors || frames_done >= max_frames) break;
        }
        point.reliable = point.errors >= stop.min_errors;
        point.ber = static_cast<double>(point.errors) / static_cast<double>(point.bits);
        curve.points.push_back(point);
    }
    return curve;
}

double crossover_snr_db(const BerCurve& lower, const BerCurve& upper) {
    struct Cmp {
        double snr;
        double diff;  // log10 lower - log10 upper
    };
    auto floor_ber = [](const BerPoint& p) {
        // Zero-error points are placed at half an error so the log stays finite.
        return p.errors > 0 ? p.ber : 0.5 / static_cast<double>(std::max<std::uint64_t>(p.bits, 1));
    };
    std::vector<Cmp> cmp;
    for (const auto& a : lower.points) {
        for (const auto& b : upper.points) {
            if (a.snr_db != b.snr_db) continue;
            if (!a.reliable && !b.reliable) continue;
            cmp.push_back({a.snr_db, std::log10(floor_ber(a)) - std::log10(floor_ber(b))});
        }
    }
    if (cmp.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (cmp.front().diff >= 0.0) return cmp.front().snr;
    for (std::size_t i = 1; i < cmp.size(); ++i) {
        if (cmp[i].diff >= 0.0) {
            const auto& a = cmp[i - 1];
            const auto& b = cmp[i];
            return a.snr + (b.snr - a.snr) * (-a.diff) / (b.diff - a.diff);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// PAPR

std::vector<double> threshold_grid(double lo_db, double hi_db, double step_db) {
    if (!(step_db > 0.0) || !(hi_db >= lo_db)) throw InvalidArgument("threshold_grid: need step > 0 and hi >= lo");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double t = lo_db + step_db * static_cast<double>(i);
        if (t > hi_db + 1e-9 * step_db) break;
        out.push_back(t);
    }
    return out;
}

PaprCcdf empirical_ccdf(std::string scheme, std::size_t n, std::size_t frames, std::vector<double> samples_db,
                        std::span<const double> thresholds_db) {
    PaprCcdf out;
    out.scheme = std::move(scheme);
    out.n = n;
    out.frames = frames;
    out.thresholds_db.assign(thresholds_db.begin(), thresholds_db.end());
    std::vector<double> sorted = samples_db;
    std::sort(sorted.begin(), sorted.end());
    const auto total = static_cast<double>(sorted.size());
    for (const double t : thresholds_db) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        out.ccdf.push_back(sorted.empty() ? 0.0 : static_cast<double>(above) / total);
    }
    out.samples_db = std::move(samples_db);
    return out;
}

std::vector<double> papr_samples_ofdm(const DcoOfdmModem& modem, std::size_t frames, std::uint64_t seed,
                                      std::size_t threads) {
    std::vector<double> out(frames);
    const std::uint64_t stream_seed = seed ^ scheme_salt("papr-dco-ofdm");
    parallel_for(frames, threads, [&](std::size_t f) {
        auto rng = RngStream::substream(stream_seed, 0, f);
        Bits bits(modem.bits_per_frame());
        fill_random_bits(bits, rng);
        out[f] = papr_db(modem.ac_waveform(bits));
    });
    return out;
}

QctPaprSamples papr_samples_qct(const QctModem& modem, std::size_t frames, std::uint64_t seed, std::size_t threads) {
    constexpr std::size_t s = TransformFamily::stream_count;
    QctPaprSamples out;
    out.per_stream.resize(frames * s);
    out.sum.resize(frames);
    const std::uint64_t stream_seed = seed ^ scheme_salt("papr-qct");
    parallel_for(frames, threads, [&](std::size_t f) {
        auto rng = RngStream::substream(stream_seed, 0, f);
        Bits bits(modem.bits_per_frame());
        fill_random_bits(bits, rng);
        const auto streams = modem.ac_streams(bits);
        for (std::size_t v = 0; v < s; ++v) out.per_stream[f * s + v] = papr_db(streams[v]);
        out.sum[f] = papr_db(QctModem::photodetector_sum(streams));
    });
    return out;
}

PaprReport run_papr_ccdf(const DcoOfdmModem& ofdm, const QctModem& qct, std::size_t frames,
                         std::span<const double> thresholds_db, std::uint64_t seed, std::size_t threads) {
    if (frames == 0) throw InvalidArgument("run_papr_ccdf: need at least one frame");
    PaprReport report;
    report.dco_ofdm = empirical_ccdf("dco-ofdm", ofdm.config().n, frames, papr_samples_ofdm(ofdm, frames, seed, threads),
                                     thresholds_db);
    auto q = papr_samples_qct(qct, frames, seed, threads);
    report.qct_stream = empirical_ccdf("qct-stream", qct.config().n, frames, std::move(q.per_stream), thresholds_db);
    report.qct_sum = empirical_ccdf("qct-sum", qct.config().n, frames, std::move(q.sum), thresholds_db);
    return report;
}

double ccdf_crossing_db(const PaprCcdf& curve, double level) {
    for (std::size_t i = 0; i < curve.ccdf.size(); ++i)
        if (curve.ccdf[i] <= level) return curve.thresholds_db[i];
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Room maps

void HeatMap::update_statistics() {
    if (values.empty()) {
        min = max = mean = 0.0;
        return;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    min = *lo;
    max = *hi;
    double sum = 0.0;
    for (const double v : values) sum += v;
    mean = sum / static_cast<double>(values.size());
}

std::string to_string(LightScheme s) { return s == LightScheme::qct ? "qct" : "csk"; }

void RoomScenario::validate() const {
    room.validate();
    receiver.validate();
    noise.validate();
    for (const auto& p : leds) p.validate();
    for (const double e : efficiency)
        if (!(e > 0.0)) throw InvalidArgument("scenario: channel efficiency must be positive");
    if (!(bias_db >= 0.0)) throw InvalidArgument("scenario: bias_db must be >= 0");
}

double optical_fraction(LightScheme scheme, double bias_db) {
    if (scheme == LightScheme::csk) return 0.5;  // one-hot, duty 1/4: (A/4) / (A/2)
    const double mu = dc_bias_factor(bias_db);
    return mu / std::sqrt(mu * mu + 1.0);
}

double ac_optical_fraction(LightScheme scheme, double bias_db) {
    if (scheme == LightScheme::csk) return 0.75;  // on level 2, duty 1/4: 4 * 1/4 * 3/4
    const double mu = dc_bias_factor(bias_db);
    return 1.0 / (mu * mu + 1.0);
}

std::array<SpectralDistribution, csk_band_count> channel_spectra(const RoomScenario& s) {
    std::array<SpectralDistribution, csk_band_count> out;
    for (std::size_t c = 0; c < csk_band_count; ++c) out[c] = scale_to_power(h_model_spd(s.leds[c]), 1.0);
    return out;
}

SpectralDistribution average_led_spd(const RoomScenario& s, LightScheme scheme) {
    if (s.room.luminaires.empty()) throw InvalidArgument("average_led_spd: room has no LEDs");
    const auto spectra = channel_spectra(s);
    const double per_led = s.room.total_power() / static_cast<double>(s.room.luminaires.size());
    const auto& weights = s.room.luminaires.front().channel_weights;
    const double rho = optical_fraction(scheme, s.bias_db);
    SpectralDistribution sum;
    for (std::size_t c = 0; c < csk_band_count; ++c) sum += spectra[c] * (s.efficiency[c] * per_led * weights[c] * rho);
    return sum;
}

Eigen::Matrix4d scenario_crosstalk(const RoomScenario& s) {
    const auto spectra = channel_spectra(s);
    return crosstalk_matrix(spectra, s.bands);
}

namespace {

struct GridShape {
    std::size_t nx, ny;
    double x0, y0, step;
};

GridShape grid_for(const RoomGeometry& room) {
    const auto nx = static_cast<std::size_t>(std::llround(room.length / room.grid_step)) + 1;
    const auto ny = static_cast<std::size_t>(std::llround(room.width / room.grid_step)) + 1;
    return {nx, ny, -room.length / 2.0, -room.width / 2.0, room.grid_step};
}

HeatMap empty_map(const GridShape& g) {
    HeatMap m;
    m.step = g.step;
    m.x0 = g.x0;
    m.y0 = g.y0;
    m.nx = g.nx;
    m.ny = g.ny;
    m.values.assign(g.nx * g.ny, 0.0);
    return m;
}

}  // namespace

HeatMap gain_map(const RoomGeometry& room, const ReceiverSpec& rx, std::size_t threads) {
    if (room.luminaires.empty()) throw InvalidArgument("gain_map: room has no LEDs");
    room.validate();
    rx.validate();
    const auto g = grid_for(room);
    HeatMap m = empty_map(g);
    parallel_for(m.values.size(), threads, [&](std::size_t cell) {
        const Vec3 p{m.x(cell % g.nx), m.y(cell / g.nx), rx.height};
        double sum = 0.0;
        for (const auto& led : room.luminaires) sum += los_gain(led, p, rx);
        m.values[cell] = sum;
    });
    m.update_statistics();
    return m;
}

RoomMaps run_room_maps(const RoomScenario& s, LightScheme scheme, std::size_t threads) {
    if (s.room.luminaires.empty()) throw InvalidArgument("run_room_maps: room has no LEDs");
    s.validate();
    const auto spectra = channel_spectra(s);
    const auto& cie = CieTables::standard();
    std::array<double, csk_band_count> lm_per_w{};
    for (std::size_t c = 0; c < csk_band_count; ++c) lm_per_w[c] = luminous_flux(spectra[c], cie);
    const Eigen::Matrix4d k = crosstalk_matrix(spectra, s.bands);

    const auto g = grid_for(s.room);
    RoomMaps maps;
    maps.scheme = scheme;
    HeatMap reference = empty_map(g);
    maps.snr_db = empty_map(g);
    const double rho = optical_fraction(scheme, s.bias_db);
    const double ac = ac_optical_fraction(scheme, s.bias_db);
    const double r2 = s.receiver.responsivity * s.receiver.responsivity;
    const double noise = s.noise.variance();

    parallel_for(reference.values.size(), threads, [&](std::size_t cell) {
        const Vec3 p{reference.x(cell % g.nx), reference.y(cell / g.nx), s.receiver.height};
        // Optical power per colour channel reaching the detector under a full DC drive.
        std::array<double, csk_band_count> received{};
        for (const auto& led : s.room.luminaires) {
            const double gain = los_gain(led, p, s.receiver);
            if (gain == 0.0) continue;
            for (std::size_t c = 0; c < csk_band_count; ++c)
                received[c] += gain * s.efficiency[c] * led.electrical_power * led.channel_weights[c];
        }
        double lux = 0.0;
        for (std::size_t c = 0; c < csk_band_count; ++c) lux += received[c] * lm_per_w[c];
        reference.values[cell] = lux / s.receiver.area;

        double signal = 0.0;
        if (scheme == LightScheme::qct) {
            // Independent streams on the four colours add in power at one photodiode.
            for (std::size_t c = 0; c < csk_band_count; ++c) signal += r2 * received[c] * received[c] * ac;
        } else {
            for (std::size_t c = 0; c < csk_band_count; ++c) {
                const double own = k(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) * received[c];
                signal += r2 * own * own * ac;
            }
            signal /= static_cast<double>(csk_band_count);
        }
        maps.snr_db.values[cell] = signal > 0.0 ? 10.0 * std::log10(signal / noise)
                                                : -std::numeric_limits<double>::infinity();
    });
    reference.update_statistics();
    maps.reference_peak_lux = reference.max;
    maps.lux = reference;
    for (auto& v : maps.lux.values) v = rho * v / reference.max;
    maps.lux.update_statistics();
    maps.snr_db.update_statistics();
    return maps;
}

// ---------------------------------------------------------------------------
// Illumination

namespace {

struct DriveMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
};

void evaluate_colour(const SpectralDistribution& spd, SchemeIllumination& out) {
    try {
        const auto report = cri(spd);
        out.cct_valid = true;
        out.cct_kelvin = report.reference_cct;
        out.duv = report.duv;
        out.cri_general = report.general;
        out.cri_special = report.special;
    } catch (const NoMeaningfulCctError& e) {
        out.cct_valid = false;
        out.duv = e.duv();
        out.note = e.what();
    }
}

}  // namespace

IlluminationReport run_illumination_report(const RoomScenario& s, const QctModem& qct, std::size_t frames,
                                           std::uint64_t seed, std::size_t threads) {
    s.validate();
    IlluminationReport report;

    // QCT: count clipping and the realised E[x] / sqrt(E[x^2]) on simulated frames.
    std::vector<DriveMoments> qct_moments(frames);
    std::vector<FrameStats> qct_stats(frames);
    const std::uint64_t qct_seed = seed ^ scheme_salt("illum-qct");
    parallel_for(frames, threads, [&](std::size_t f) {
        auto rng = RngStream::substream(qct_seed, 0, f);
        Bits bits(qct.bits_per_frame());
        fill_random_bits(bits, rng);
        const auto streams = qct.modulate_frame(bits, &qct_stats[f]);
        auto& m = qct_moments[f];
        for (const auto& st : streams)
            for (const double v : st) {
                m.sum += v;
                m.sum_sq += v * v;
                ++m.count;
            }
    });

    // CSK: one-hot drive with the same electrical budget.
    const CskModem csk({Eigen::Matrix4d::Identity(), 1.0});
    std::vector<DriveMoments> csk_moments(frames);
    const std::uint64_t csk_seed = seed ^ scheme_salt("illum-csk");
    parallel_for(frames, threads, [&](std::size_t f) {
        auto rng = RngStream::substream(csk_seed, 0, f);
        Bits bits(2 * qct.config().n);
        fill_random_bits(bits, rng);
        auto& m = csk_moments[f];
        for (const auto& sym : csk.modulate(bits))
            for (const double v : sym) {
                m.sum += v;
                m.sum_sq += v * v;
                ++m.count;
            }
    });

    auto measured = [](const std::vector<DriveMoments>& ms) {
        DriveMoments t;
        for (const auto& m : ms) {
            t.sum += m.sum;
            t.sum_sq += m.sum_sq;
            t.count += m.count;
        }
        if (t.count == 0 || t.sum_sq == 0.0) return 0.0;
        const auto n = static_cast<double>(t.count);
        return (t.sum / n) / std::sqrt(t.sum_sq / n);
    };

    for (const LightScheme scheme : {LightScheme::qct, LightScheme::csk}) {
        SchemeIllumination out;
        out.scheme = scheme;
        out.optical_fraction = optical_fraction(scheme, s.bias_db);
        evaluate_colour(average_led_spd(s, scheme), out);
        out.mean_normalized_lux = run_room_maps(s, scheme, threads).lux.mean;
        if (scheme == LightScheme::qct) {
            FrameStats total;
            for (const auto& st : qct_stats) total += st;
            out.clipped_fraction = total.clipped_fraction();
            out.measured_optical_fraction = measured(qct_moments);
        } else {
            out.measured_optical_fraction = measured(csk_moments);
        }
        report.schemes.push_back(out);
    }
    const double csk_lux = report.schemes[1].mean_normalized_lux;
    report.lux_ratio = csk_lux > 0.0 ? report.schemes[0].mean_normalized_lux / csk_lux : 0.0;
    return report;
}

}  // namespace vlcsim
