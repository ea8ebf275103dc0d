#include "vlcsim/modems.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "vlcsim/channel.hpp"
#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void require_multiple(std::size_t count, std::size_t unit, const char* what) {
    if (unit == 0 || count % unit != 0)
        throw InvalidArgument(std::string(what) + ": " + std::to_string(count) + " bits is not a multiple of " +
                              std::to_string(unit));
}

}  // namespace

// ---------------------------------------------------------------------------
// PAM

PamConstellation::PamConstellation(std::size_t order) {
    if (order < 2 || !is_power_of_two(order)) throw InvalidArgument("PAM order must be a power of two >= 2");
    bits_per_symbol_ = static_cast<std::size_t>(std::countr_zero(order));
    const double m = static_cast<double>(order);
    scale_ = std::sqrt(3.0 / (m * m - 1.0));
    levels_.resize(order);
    labels_.resize(order);
    index_of_label_.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        levels_[i] = (2.0 * static_cast<double>(i) - (m - 1.0)) * scale_;
        const auto gray = static_cast<std::uint32_t>(i ^ (i >> 1));
        labels_[i] = gray;
        index_of_label_[gray] = i;
    }
}

std::size_t PamConstellation::detect(double estimate) const noexcept {
    // Position measured in level steps; ceil(t - 0.5) sends exact midpoints down.
    const double t = 0.5 * (estimate / scale_ + static_cast<double>(order() - 1));
    const double idx = std::ceil(t - 0.5);
    if (!(idx > 0.0)) return 0;
    const auto last = static_cast<double>(order() - 1);
    return idx >= last ? order() - 1 : static_cast<std::size_t>(idx);
}

std::vector<double> PamConstellation::map(std::span<const std::uint8_t> bits) const {
    require_multiple(bits.size(), bits_per_symbol_, "pam_map");
    std::vector<double> out(bits.size() / bits_per_symbol_);
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t label = 0;
        for (std::size_t b = 0; b < bits_per_symbol_; ++b) label = (label << 1) | (bits[s * bits_per_symbol_ + b] & 1U);
        out[s] = levels_[index_of_label_[label]];
    }
    return out;
}

void PamConstellation::append_label_bits(std::size_t index, Bits& out) const {
    const std::uint32_t label = labels_[index];
    for (std::size_t b = bits_per_symbol_; b-- > 0;) out.push_back(static_cast<std::uint8_t>((label >> b) & 1U));
}

Bits PamConstellation::demap(std::span<const double> symbols) const {
    Bits out;
    out.reserve(symbols.size() * bits_per_symbol_);
    for (const double s : symbols) append_label_bits(detect(s), out);
    return out;
}

// ---------------------------------------------------------------------------
// QAM

namespace {

std::size_t qam_rail_order(std::size_t order) {
    if (order < 4 || !is_power_of_two(order) || std::countr_zero(order) % 2 != 0)
        throw InvalidArgument("QAM order must be a square power of two (4, 16, 64, ...)");
    return std::size_t{1} << (std::countr_zero(order) / 2);
}

}  // namespace

QamConstellation::QamConstellation(std::size_t order)
    : rail_(qam_rail_order(order)), rail_scale_(1.0 / std::sqrt(2.0)) {
    const std::size_t l = rail_.order();
    points_.reserve(order);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t q = 0; q < l; ++q)
            points_.emplace_back(rail_.levels()[i] * rail_scale_, rail_.levels()[q] * rail_scale_);
}

std::size_t QamConstellation::detect(Complex estimate) const noexcept {
    const std::size_t i = rail_.detect(estimate.real() / rail_scale_);
    const std::size_t q = rail_.detect(estimate.imag() / rail_scale_);
    return i * rail_.order() + q;
}

std::vector<Complex> QamConstellation::map(std::span<const std::uint8_t> bits) const {
    const std::size_t k = bits_per_symbol();
    const std::size_t half = rail_.bits_per_symbol();
    require_multiple(bits.size(), k, "qam_map");
    std::vector<Complex> out(bits.size() / k);
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto in_phase = rail_.map(bits.subspan(s * k, half));
        const auto quadrature = rail_.map(bits.subspan(s * k + half, half));
        out[s] = Complex(in_phase[0] * rail_scale_, quadrature[0] * rail_scale_);
    }
    return out;
}

Bits QamConstellation::demap(std::span<const Complex> symbols) const {
    Bits out;
    out.reserve(symbols.size() * bits_per_symbol());
    const std::size_t l = rail_.order();
    for (const Complex s : symbols) {
        const std::size_t idx = detect(s);
        rail_.append_label_bits(idx / l, out);
        rail_.append_label_bits(idx % l, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// MLD

std::size_t mld_index(double estimate, std::span<const double> points) {
    if (points.empty()) throw InvalidArgument("mld: empty constellation");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = (estimate - points[i]) * (estimate - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::size_t mld_index(Complex estimate, std::span<const Complex> points) {
    if (points.empty()) throw InvalidArgument("mld: empty constellation");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::norm(estimate - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double mld_detect(double estimate, const PamConstellation& pam) { return pam.levels()[pam.detect(estimate)]; }

Complex mld_detect(Complex estimate, const QamConstellation& qam) { return qam.points()[qam.detect(estimate)]; }

double dc_bias_factor(double bias_db) {
    if (!(bias_db >= 0.0) || !std::isfinite(bias_db)) throw InvalidArgument("dc_bias_factor: bias must be >= 0 dB");
    return std::sqrt(std::pow(10.0, bias_db / 10.0) - 1.0);
}

void bias_and_clip(std::span<double> frame, double dc, bool clip, FrameStats* stats) {
    std::size_t clipped = 0;
    for (auto& v : frame) {
        v += dc;
        if (clip && v < 0.0) {
            v = 0.0;
            ++clipped;
        }
    }
    if (stats) {
        stats->samples += frame.size();
        stats->clipped += clipped;
    }
}

// ---------------------------------------------------------------------------
// DCO-OFDM

void OfdmConfig::validate() const {
    if (n < 4 || !is_power_of_two(n)) throw InvalidArgument("ofdm: n must be a power of two >= 4");
    if (cp_len >= n) throw InvalidArgument("ofdm: cp_len must be shorter than n");
    if (!(bias_db >= 0.0)) throw InvalidArgument("ofdm: bias_db must be >= 0");
}

DcoOfdmModem::DcoOfdmModem(OfdmConfig cfg) : cfg_(cfg), qam_((cfg.validate(), cfg.qam_order)) {
    dc_ = dc_bias_factor(cfg_.bias_db) * std::sqrt(signal_power());
}

double DcoOfdmModem::signal_power() const noexcept {
    const auto n = static_cast<double>(cfg_.n);
    return (n - 2.0) / (n * n);
}

RealFrame DcoOfdmModem::ac_waveform_from_symbols(std::span<const Complex> symbols) const {
    return idft_real(hermitian_extend(symbols, cfg_.n));
}

RealFrame DcoOfdmModem::ac_waveform(std::span<const std::uint8_t> bits) const {
    if (bits.size() != bits_per_frame())
        throw InvalidArgument("dco_ofdm: frame needs " + std::to_string(bits_per_frame()) + " bits");
    const auto symbols = qam_.map(bits);
    return ac_waveform_from_symbols(symbols);
}

RealFrame DcoOfdmModem::modulate_symbols(std::span<const Complex> symbols, FrameStats* stats) const {
    RealFrame out = add_cp(ac_waveform_from_symbols(symbols), cfg_.cp_len);
    bias_and_clip(out, dc_, cfg_.clip, stats);
    return out;
}

RealFrame DcoOfdmModem::modulate_frame(std::span<const std::uint8_t> bits, FrameStats* stats) const {
    RealFrame out = add_cp(ac_waveform(bits), cfg_.cp_len);
    bias_and_clip(out, dc_, cfg_.clip, stats);
    return out;
}

std::vector<RealFrame> DcoOfdmModem::modulate(std::span<const std::uint8_t> bits, FrameStats* stats) const {
    const std::size_t per = bits_per_frame();
    require_multiple(bits.size(), per, "dco_ofdm_modulate");
    std::vector<RealFrame> frames;
    frames.reserve(bits.size() / per);
    for (std::size_t off = 0; off < bits.size(); off += per) frames.push_back(modulate_frame(bits.subspan(off, per), stats));
    return frames;
}

ComplexSpectrum DcoOfdmModem::equalizer(const ChannelImpulseResponse& h) const {
    if (h.length() > cfg_.n) throw InvalidArgument("dco_ofdm: channel longer than the frame");
    auto response = h.frequency_response(cfg_.n);
    double scale = 0.0;
    for (const double t : h.taps()) scale += std::abs(t);
    for (std::size_t k = 1; k <= data_bins(); ++k) {
        if (std::abs(response[k]) <= 1e-10 * scale)
            throw SingularChannelError("dco_ofdm: channel response vanishes on data bin " + std::to_string(k));
    }
    return response;
}

std::vector<Complex> DcoOfdmModem::equalized_symbols(std::span<const double> rx,
                                                     std::span<const Complex> response) const {
    if (rx.size() != frame_length())
        throw InvalidArgument("dco_ofdm: received frame must have " + std::to_string(frame_length()) + " samples");
    const auto spectrum = dft(rx.subspan(cfg_.cp_len));
    std::vector<Complex> out(data_bins());
    for (std::size_t k = 1; k <= data_bins(); ++k) out[k - 1] = spectrum[k] / response[k];
    return out;
}

Bits DcoOfdmModem::demodulate_frame(std::span<const double> rx, std::span<const Complex> response) const {
    const auto est = equalized_symbols(rx, response);
    return qam_.demap(est);
}

Bits DcoOfdmModem::demodulate_frame(std::span<const double> rx, const ChannelImpulseResponse& h) const {
    const auto response = equalizer(h);
    return demodulate_frame(rx, response);
}

Bits DcoOfdmModem::demodulate(const std::vector<RealFrame>& rx, const ChannelImpulseResponse& h) const {
    const auto response = equalizer(h);
    Bits out;
    out.reserve(rx.size() * bits_per_frame());
    for (const auto& frame : rx) {
        const auto bits = demodulate_frame(frame, response);
        out.insert(out.end(), bits.begin(), bits.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// QCT

void QctConfig::validate() const {
    if (n < 4 || !is_power_of_two(n)) throw InvalidArgument("qct: n must be a power of two >= 4");
    if (cp_len >= n) throw InvalidArgument("qct: cp_len must be shorter than n");
    if (!(bias_db >= 0.0)) throw InvalidArgument("qct: bias_db must be >= 0");
}

QctModem::QctModem(QctConfig cfg) : QctModem(cfg, build_qct_family((cfg.validate(), cfg.n), cfg.assignment)) {}

QctModem::QctModem(QctConfig cfg, TransformFamily family)
    : cfg_(std::move(cfg)), family_(std::move(family)), pam_(cfg_.pam_order) {
    cfg_.validate();
    if (family_.n() != cfg_.n) throw InvalidArgument("qct: transform family size does not match n");
    combined_ = family_.combined();
    dc_ = dc_bias_factor(cfg_.bias_db) * std::sqrt(average_signal_power());
}

double QctModem::stream_power() const noexcept {
    // Each stream carries N/4 unit-energy symbols through orthonormal columns.
    return 1.0 / static_cast<double>(TransformFamily::stream_count);
}

StreamFrames QctModem::ac_streams_from_symbols(std::span<const double> symbols) const {
    if (symbols.size() != cfg_.n) throw InvalidArgument("qct: frame needs " + std::to_string(cfg_.n) + " symbols");
    const std::size_t q = family_.columns_per_stream();
    StreamFrames out;
    for (std::size_t v = 0; v < TransformFamily::stream_count; ++v) {
        const Eigen::Map<const Eigen::VectorXd> x(symbols.data() + v * q, static_cast<Eigen::Index>(q));
        const Eigen::VectorXd xc = family_.block(v) * x;
        out[v].assign(xc.data(), xc.data() + xc.size());
    }
    return out;
}

StreamFrames QctModem::ac_streams(std::span<const std::uint8_t> bits) const {
    if (bits.size() != bits_per_frame())
        throw InvalidArgument("qct: frame needs " + std::to_string(bits_per_frame()) + " bits");
    const auto symbols = pam_.map(bits);
    return ac_streams_from_symbols(symbols);
}

StreamFrames QctModem::modulate_frame(std::span<const std::uint8_t> bits, FrameStats* stats) const {
    StreamFrames streams = ac_streams(bits);
    for (auto& s : streams) {
        s = add_cp(s, cfg_.cp_len);
        bias_and_clip(s, dc_, cfg_.clip, stats);
    }
    return streams;
}

std::vector<StreamFrames> QctModem::modulate(std::span<const std::uint8_t> bits, FrameStats* stats) const {
    const std::size_t per = bits_per_frame();
    require_multiple(bits.size(), per, "qct_modulate");
    std::vector<StreamFrames> frames;
    frames.reserve(bits.size() / per);
    for (std::size_t off = 0; off < bits.size(); off += per) frames.push_back(modulate_frame(bits.subspan(off, per), stats));
    return frames;
}

RealFrame QctModem::photodetector_sum(const StreamFrames& streams) {
    RealFrame sum(streams[0].size(), 0.0);
    for (const auto& s : streams) {
        if (s.size() != sum.size()) throw InvalidArgument("qct: stream lengths differ");
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
    }
    return sum;
}

QctEqualizer QctModem::equalizer(const ChannelImpulseResponse& h) const {
    if (h.length() > cfg_.n) throw InvalidArgument("qct: channel longer than the frame");
    QctEqualizer eq{h, {}, 0.0};
    for (const double t : h.taps()) eq.dc_gain += t;
    eq.eigenvalues.resize(cfg_.n);
    const double floor = 1e-12 * h.energy();
    for (Eigen::Index c = 0; c < combined_.cols(); ++c) {
        const Eigen::VectorXd col = combined_.col(c);
        const auto cx = circulant_apply(h, std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        double lambda = 0.0;
        for (const double v : cx) lambda += v * v;
        if (lambda <= floor)
            throw SingularChannelError("qct: equalizer eigenvalue vanishes on column " + std::to_string(c));
        eq.eigenvalues[static_cast<std::size_t>(c)] = lambda;
    }
    return eq;
}

std::vector<double> QctModem::equalized_symbols(std::span<const double> rx, const QctEqualizer& eq) const {
    if (rx.size() != frame_length())
        throw InvalidArgument("qct: received frame must have " + std::to_string(frame_length()) + " samples");
    RealFrame y(rx.begin() + static_cast<std::ptrdiff_t>(cfg_.cp_len), rx.end());
    // The bias of all four streams reaches the detector through sum(h).
    const double dc_rx = static_cast<double>(TransformFamily::stream_count) * dc_ * eq.dc_gain;
    for (auto& v : y) v -= dc_rx;
    const RealFrame matched = circulant_matched_apply(eq.h, y);
    const Eigen::Map<const Eigen::VectorXd> z(matched.data(), static_cast<Eigen::Index>(matched.size()));
    const Eigen::VectorXd proj = combined_.transpose() * z;
    std::vector<double> out(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i) out[i] = proj[static_cast<Eigen::Index>(i)] / eq.eigenvalues[i];
    return out;
}

Bits QctModem::demodulate_frame(std::span<const double> rx, const QctEqualizer& eq) const {
    const auto est = equalized_symbols(rx, eq);
    return pam_.demap(est);
}

Bits QctModem::demodulate_frame(std::span<const double> rx, const ChannelImpulseResponse& h) const {
    return demodulate_frame(rx, equalizer(h));
}

Bits QctModem::demodulate(const std::vector<RealFrame>& rx, const ChannelImpulseResponse& h) const {
    const auto eq = equalizer(h);
    Bits out;
    out.reserve(rx.size() * bits_per_frame());
    for (const auto& frame : rx) {
        const auto bits = demodulate_frame(frame, eq);
        out.insert(out.end(), bits.begin(), bits.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSK

std::array<WavelengthBand, csk_band_count> default_receiver_bands() {
    return {{{612.0, 780.0}, {575.0, 612.0}, {483.0, 575.0}, {400.0, 483.0}}};
}

Eigen::Matrix4d crosstalk_matrix(std::span<const SpectralDistribution, csk_band_count> spds,
                                 std::span<const WavelengthBand, csk_band_count> bands) {
    for (std::size_t i = 0; i < csk_band_count; ++i) {
        const auto& b = bands[i];
        if (!(b.lo_nm < b.hi_nm)) throw InvalidArgument("crosstalk_matrix: empty band");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = bands[j];
            if (b.lo_nm < o.hi_nm && o.lo_nm < b.hi_nm) throw InvalidArgument("crosstalk_matrix: bands overlap");
        }
    }
    Eigen::Matrix4d k;
    for (std::size_t j = 0; j < csk_band_count; ++j) {
        const double total = spds[j].integral();
        if (!(total > 0.0)) throw InvalidArgument("crosstalk_matrix: channel " + std::to_string(j) + " has no power");
        for (std::size_t i = 0; i < csk_band_count; ++i)
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                spds[j].band_integral(bands[i].lo_nm, bands[i].hi_nm) / total;
    }
    return k;
}

void CskConfig::validate() const {
    if (!(avg_power > 0.0) || !std::isfinite(avg_power)) throw InvalidArgument("csk: avg_power must be positive");
    for (Eigen::Index i = 0; i < crosstalk.size(); ++i) {
        const double v = crosstalk.data()[i];
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("csk: crosstalk entries must lie in [0, 1]");
    }
}

CskModem::CskModem(CskConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    amplitude_ = std::sqrt(cfg_.avg_power);
    for (std::size_t s = 0; s < csk_band_count; ++s) received_[s] = apply_crosstalk(pattern(s));
}

BandVector CskModem::pattern(std::size_t symbol) const {
    if (symbol >= csk_band_count) throw InvalidArgument("csk: symbol index out of range");
    BandVector p{};
    p[symbol] = amplitude_;
    return p;
}

BandVector CskModem::apply_crosstalk(const BandVector& s) const {
    BandVector r{};
    for (std::size_t i = 0; i < csk_band_count; ++i)
        for (std::size_t j = 0; j < csk_band_count; ++j)
            r[i] += cfg_.crosstalk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * s[j];
    return r;
}

std::vector<BandVector> CskModem::modulate(std::span<const std::uint8_t> bits) const {
    require_multiple(bits.size(), bits_per_symbol, "csk_modulate");
    std::vector<BandVector> out(bits.size() / bits_per_symbol);
    for (std::size_t s = 0; s < out.size(); ++s) {
        const std::size_t symbol = static_cast<std::size_t>(((bits[2 * s] & 1U) << 1) | (bits[2 * s + 1] & 1U));
        out[s] = pattern(symbol);
    }
    return out;
}

std::size_t CskModem::detect(const BandVector& r) const noexcept {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < csk_band_count; ++s) {
        double d = 0.0;
        for (std::size_t i = 0; i < csk_band_count; ++i) d += (r[i] - received_[s][i]) * (r[i] - received_[s][i]);
        if (d < best_d) {
            best_d = d;
            best = s;
        }
    }
    return best;
}

Bits CskModem::demodulate(std::span<const BandVector> rx) const {
    Bits out;
    out.reserve(rx.size() * bits_per_symbol);
    for (const auto& r : rx) {
        const std::size_t s = detect(r);
        out.push_back(static_cast<std::uint8_t>((s >> 1) & 1U));
        out.push_back(static_cast<std::uint8_t>(s & 1U));
    }
    return out;
}

}  // namespace vlcsim
