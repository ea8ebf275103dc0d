#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlcsim/photometry.hpp"
#include "vlcsim/spectral_core.hpp"

namespace vlcsim {

using Bits = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Constellations

/// Gray-coded M-PAM with unit average symbol energy. Index i holds level
/// (2i - (M-1)) * scale, so levels ascend with the index; bits are MSB first.
class PamConstellation {
public:
    explicit PamConstellation(std::size_t order);

    std::size_t order() const noexcept { return levels_.size(); }
    std::size_t bits_per_symbol() const noexcept { return bits_per_symbol_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    double scale() const noexcept { return scale_; }
    double min_distance() const noexcept { return 2.0 * scale_; }

    /// Gray label carried by level index i.
    std::uint32_t label(std::size_t index) const { return labels_.at(index); }
    std::size_t index_of_label(std::uint32_t label) const { return index_of_label_.at(label); }

    /// Nearest level index; an exact midpoint resolves to the lower index.
    std::size_t detect(double estimate) const noexcept;

    std::vector<double> map(std::span<const std::uint8_t> bits) const;
    /// Hard-decision demap of arbitrary real estimates.
    Bits demap(std::span<const double> symbols) const;

    void append_label_bits(std::size_t index, Bits& out) const;

private:
    std::size_t bits_per_symbol_ = 0;
    double scale_ = 0.0;
    std::vector<double> levels_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::size_t> index_of_label_;
};

/// Square Gray-coded QAM built from two PAM rails; unit average energy.
/// Point index = i_index * L + q_index; the first half of each bit group
/// drives the in-phase rail.
class QamConstellation {
public:
    explicit QamConstellation(std::size_t order);

    std::size_t order() const noexcept { return points_.size(); }
    std::size_t bits_per_symbol() const noexcept { return 2 * rail_.bits_per_symbol(); }
    const std::vector<Complex>& points() const noexcept { return points_; }
    const PamConstellation& rail() const noexcept { return rail_; }

    std::size_t detect(Complex estimate) const noexcept;
    std::vector<Complex> map(std::span<const std::uint8_t> bits) const;
    Bits demap(std::span<const Complex> symbols) const;

private:
    PamConstellation rail_;
    double rail_scale_;
    std::vector<Complex> points_;
};

/// argmin_i |estimate - points[i]|^2, ties to the lowest index.
std::size_t mld_index(double estimate, std::span<const double> points);
std::size_t mld_index(Complex estimate, std::span<const Complex> points);

double mld_detect(double estimate, const PamConstellation& pam);
Complex mld_detect(Complex estimate, const QamConstellation& qam);

/// mu = sqrt(10^(dB/10) - 1).
double dc_bias_factor(double bias_db);

struct FrameStats {
    std::size_t samples = 0;
    std::size_t clipped = 0;

    double clipped_fraction() const noexcept {
        return samples == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(samples);
    }
    FrameStats& operator+=(const FrameStats& o) noexcept {
        samples += o.samples;
        clipped += o.clipped;
        return *this;
    }
};

/// Adds `dc` to every sample and, when `clip` is set, zeroes negatives.
void bias_and_clip(std::span<double> frame, double dc, bool clip, FrameStats* stats);

// ---------------------------------------------------------------------------
// DCO-OFDM

struct OfdmConfig {
    std::size_t n = 512;
    std::size_t cp_len = 4;
    double bias_db = 13.0;
    std::size_t qam_order = 16;
    bool clip = true;

    void validate() const;
};

class DcoOfdmModem {
public:
    explicit DcoOfdmModem(OfdmConfig cfg);

    const OfdmConfig& config() const noexcept { return cfg_; }
    const QamConstellation& constellation() const noexcept { return qam_; }
    std::size_t data_bins() const noexcept { return cfg_.n / 2 - 1; }
    std::size_t bits_per_frame() const noexcept { return data_bins() * qam_.bits_per_symbol(); }
    std::size_t frame_length() const noexcept { return cfg_.n + cfg_.cp_len; }

    /// Expected per-sample power of the unbiased waveform, (N-2)/N^2.
    double signal_power() const noexcept;
    /// Expected energy of one unbiased frame without CP.
    double ac_frame_energy() const noexcept { return signal_power() * static_cast<double>(cfg_.n); }
    double dc_level() const noexcept { return dc_; }

    RealFrame ac_waveform_from_symbols(std::span<const Complex> symbols) const;
    RealFrame ac_waveform(std::span<const std::uint8_t> bits) const;

    /// One CP-prefixed, biased and clipped frame.
    RealFrame modulate_frame(std::span<const std::uint8_t> bits, FrameStats* stats = nullptr) const;
    RealFrame modulate_symbols(std::span<const Complex> symbols, FrameStats* stats = nullptr) const;
    std::vector<RealFrame> modulate(std::span<const std::uint8_t> bits, FrameStats* stats = nullptr) const;

    /// H(k) over the frame; throws SingularChannelError on a null data bin.
    ComplexSpectrum equalizer(const ChannelImpulseResponse& h) const;

    std::vector<Complex> equalized_symbols(std::span<const double> rx, std::span<const Complex> response) const;
    Bits demodulate_frame(std::span<const double> rx, std::span<const Complex> response) const;
    Bits demodulate_frame(std::span<const double> rx, const ChannelImpulseResponse& h) const;
    Bits demodulate(const std::vector<RealFrame>& rx, const ChannelImpulseResponse& h) const;

private:
    OfdmConfig cfg_;
    QamConstellation qam_;
    double dc_;
};

// ---------------------------------------------------------------------------
// DC-biased QCT

struct QctConfig {
    std::size_t n = 512;
    std::size_t cp_len = 4;
    double bias_db = 13.0;
    std::size_t pam_order = 4;
    std::string assignment = "round-robin";
    bool clip = true;

    void validate() const;
};

using StreamFrames = std::array<RealFrame, TransformFamily::stream_count>;

/// Receiver-side state for one channel: per-column eigenvalues of
/// H^T C^T C H and the DC gain sum(h).
struct QctEqualizer {
    ChannelImpulseResponse h;
    std::vector<double> eigenvalues;  // combined column order
    double dc_gain = 1.0;
};

class QctModem {
public:
    explicit QctModem(QctConfig cfg);
    /// Uses a caller-supplied family (e.g. a perturbed one).
    QctModem(QctConfig cfg, TransformFamily family);

    const QctConfig& config() const noexcept { return cfg_; }
    const TransformFamily& family() const noexcept { return family_; }
    const PamConstellation& constellation() const noexcept { return pam_; }
    std::size_t bits_per_frame() const noexcept { return cfg_.n * pam_.bits_per_symbol(); }
    std::size_t frame_length() const noexcept { return cfg_.n + cfg_.cp_len; }

    /// Expected per-sample power of one unbiased stream, E[x_c^2] = 1/4.
    double stream_power() const noexcept;
    /// 0.25 * sum over streams of E[x_c^2].
    double average_signal_power() const noexcept { return stream_power(); }
    /// Expected energy of the unbiased photodetector sum over one frame.
    double ac_frame_energy() const noexcept { return static_cast<double>(cfg_.n); }
    /// Bias added to each stream.
    double dc_level() const noexcept { return dc_; }

    StreamFrames ac_streams_from_symbols(std::span<const double> symbols) const;
    StreamFrames ac_streams(std::span<const std::uint8_t> bits) const;

    StreamFrames modulate_frame(std::span<const std::uint8_t> bits, FrameStats* stats = nullptr) const;
    std::vector<StreamFrames> modulate(std::span<const std::uint8_t> bits, FrameStats* stats = nullptr) const;

    /// What a filterless photodiode sees: the sample-wise sum of all streams.
    static RealFrame photodetector_sum(const StreamFrames& streams);

    QctEqualizer equalizer(const ChannelImpulseResponse& h) const;

    /// Equalized symbol estimates in stream order, before the decision.
    std::vector<double> equalized_symbols(std::span<const double> rx, const QctEqualizer& eq) const;
    Bits demodulate_frame(std::span<const double> rx, const QctEqualizer& eq) const;
    Bits demodulate_frame(std::span<const double> rx, const ChannelImpulseResponse& h) const;
    Bits demodulate(const std::vector<RealFrame>& rx, const ChannelImpulseResponse& h) const;

private:
    QctConfig cfg_;
    TransformFamily family_;
    Eigen::MatrixXd combined_;
    PamConstellation pam_;
    double dc_;
};

// ---------------------------------------------------------------------------
// Four-band intensity CSK

inline constexpr std::size_t csk_band_count = 4;
using BandVector = std::array<double, csk_band_count>;

struct WavelengthBand {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
};

/// Receiver filter bands (red, amber, green, blue), each running from its
/// lower bound to the next band's lower bound; red ends at 780 nm.
std::array<WavelengthBand, csk_band_count> default_receiver_bands();

/// K[i][j] = fraction of channel j's optical power inside band i.
Eigen::Matrix4d crosstalk_matrix(std::span<const SpectralDistribution, csk_band_count> spds,
                                 std::span<const WavelengthBand, csk_band_count> bands);

struct CskConfig {
    Eigen::Matrix4d crosstalk = Eigen::Matrix4d::Identity();
    double avg_power = 1.0;  // W, electrical

    void validate() const;
};

/// One-hot symbols: symbol i lights channel i at amplitude sqrt(avg_power).
/// Labels are natural binary (bits 00 -> channel 0).
class CskModem {
public:
    static constexpr std::size_t bits_per_symbol = 2;

    explicit CskModem(CskConfig cfg);

    const CskConfig& config() const noexcept { return cfg_; }
    double amplitude() const noexcept { return amplitude_; }
    BandVector pattern(std::size_t symbol) const;
    /// K * pattern(symbol).
    const BandVector& received_pattern(std::size_t symbol) const { return received_.at(symbol); }

    std::vector<BandVector> modulate(std::span<const std::uint8_t> bits) const;
    BandVector apply_crosstalk(const BandVector& s) const;

    /// argmin_i ||r - K p_i||^2, ties to the lower index.
    std::size_t detect(const BandVector& r) const noexcept;
    Bits demodulate(std::span<const BandVector> rx) const;

private:
    CskConfig cfg_;
    double amplitude_;
    std::array<BandVector, csk_band_count> received_;
};

}  // namespace vlcsim
