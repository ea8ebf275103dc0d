#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlcsim/channel.hpp"
#include "vlcsim/modems.hpp"
#include "vlcsim/photometry.hpp"

namespace vlcsim {

// ---------------------------------------------------------------------------
// Parallel helper

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Work is split into contiguous chunks; results must be
/// written to per-index slots for output to be independent of `threads`.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

std::size_t resolve_threads(std::size_t requested) noexcept;

// ---------------------------------------------------------------------------
// Analytic oracles

double q_function(double x);

/// Exact Gray-coded M-PAM bit error probability over AWGN (all decision
/// regions summed, not the nearest-neighbour approximation). M in {2,4,8,16}.
double analytic_pam_ber(std::size_t order, double snr_per_bit_db);

/// The textbook nearest-neighbour approximation of the same quantity.
double approximate_pam_ber(std::size_t order, double snr_per_bit_db);

/// Square Gray QAM: each rail is sqrt(M)-PAM at the same SNR per bit.
double analytic_qam_ber(std::size_t order, double snr_per_bit_db);

/// M-ary orthogonal signalling with coherent ML detection; the symbol error
/// integral is evaluated numerically and converted with Pb = M/(2(M-1)) Ps.
double analytic_orthogonal_ber(std::size_t order, double snr_per_bit_db);

// ---------------------------------------------------------------------------
// Monte Carlo BER

struct StopRule {
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 10'000'000;
};

struct BerPoint {
    double snr_db = 0.0;
    double ber = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool reliable = false;  // reached min_errors before max_bits
    double noise_variance = 0.0;

    /// Binomial standard deviation of the estimate, sqrt(p(1-p)/n).
    double standard_error(double p) const noexcept;
};

struct BerCurve {
    std::string scheme;
    std::uint64_t seed = 0;
    std::vector<BerPoint> points;
    FrameStats tx_stats;
};

/// One simulated link: draws a frame of random bits, sends it through the
/// modem, channel and noise, and counts bit errors.
class LinkSimulator {
public:
    virtual ~LinkSimulator() = default;
    virtual std::string scheme() const = 0;
    virtual std::size_t bits_per_frame() const = 0;
    /// Received signal energy per information bit, excluding bias and CP.
    virtual double energy_per_bit() const = 0;
    virtual std::uint64_t run_frame(double noise_variance, RngStream& rng, FrameStats& stats) const = 0;
};

std::unique_ptr<LinkSimulator> make_qct_link(QctModem modem, ChannelImpulseResponse h);
std::unique_ptr<LinkSimulator> make_ofdm_link(DcoOfdmModem modem, ChannelImpulseResponse h);
/// `symbols_per_frame` one-hot symbols per simulated frame.
std::unique_ptr<LinkSimulator> make_csk_link(CskModem modem, std::size_t symbols_per_frame = 512);

/// sigma^2 = Eb / (2 gamma_b); +inf dB gives 0.
double noise_variance_for(double energy_per_bit, double snr_per_bit_db);

/// Frames per scheduling round. Stop checks happen only between rounds, so
/// the result does not depend on the thread count.
inline constexpr std::size_t ber_round_frames = 32;

BerCurve run_ber_sweep(const LinkSimulator& link, std::span<const double> snr_db, const StopRule& stop,
                       std::uint64_t seed, std::size_t threads = 1);

/// SNR where the first curve stops being below the second, interpolated in
/// log10(BER) between the bracketing points. Returns NaN when the first
/// curve stays below over the whole sweep, and the first SNR when it never
/// starts below. Only points reliable on both curves are compared.
double crossover_snr_db(const BerCurve& lower, const BerCurve& upper);

void fill_random_bits(std::span<std::uint8_t> bits, RngStream& rng);

// ---------------------------------------------------------------------------
// PAPR

struct PaprCcdf {
    std::string scheme;
    std::size_t n = 0;
    std::size_t frames = 0;
    std::vector<double> thresholds_db;
    std::vector<double> ccdf;        // P[PAPR > threshold]
    std::vector<double> samples_db;  // every PAPR value that fed the estimate
};

std::vector<double> threshold_grid(double lo_db, double hi_db, double step_db);

/// Fraction of samples strictly above each threshold.
PaprCcdf empirical_ccdf(std::string scheme, std::size_t n, std::size_t frames, std::vector<double> samples_db,
                        std::span<const double> thresholds_db);

/// PAPR of unbiased DCO-OFDM frames, one sample per frame.
std::vector<double> papr_samples_ofdm(const DcoOfdmModem& modem, std::size_t frames, std::uint64_t seed,
                                      std::size_t threads = 1);

struct QctPaprSamples {
    std::vector<double> per_stream;  // four samples per frame, stream-major within a frame
    std::vector<double> sum;         // one sample per frame (photodetector sum)
};

QctPaprSamples papr_samples_qct(const QctModem& modem, std::size_t frames, std::uint64_t seed,
                                std::size_t threads = 1);

struct PaprReport {
    PaprCcdf dco_ofdm;
    PaprCcdf qct_stream;
    PaprCcdf qct_sum;
};

PaprReport run_papr_ccdf(const DcoOfdmModem& ofdm, const QctModem& qct, std::size_t frames,
                         std::span<const double> thresholds_db, std::uint64_t seed, std::size_t threads = 1);

/// Smallest threshold whose CCDF is at or below `level`; NaN if none.
double ccdf_crossing_db(const PaprCcdf& curve, double level);

// ---------------------------------------------------------------------------
// Room maps and illumination

/// Regular grid over the room footprint, row-major in y then x.
struct HeatMap {
    double step = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;

    double x(std::size_t ix) const noexcept { return x0 + static_cast<double>(ix) * step; }
    double y(std::size_t iy) const noexcept { return y0 + static_cast<double>(iy) * step; }
    double at(std::size_t ix, std::size_t iy) const { return values.at(iy * nx + ix); }
    void update_statistics();
};

enum class LightScheme { qct, csk };

std::string to_string(LightScheme s);

struct RoomScenario {
    RoomGeometry room;
    ReceiverSpec receiver;
    AwgnSpec noise;
    std::array<HModelParams, csk_band_count> leds = default_led_channels();
    /// Electrical-to-optical conversion per colour channel (W/W).
    std::array<double, csk_band_count> efficiency{1.0, 1.0, 1.0, 1.0};
    std::array<WavelengthBand, csk_band_count> bands = default_receiver_bands();
    double bias_db = 13.0;

    void validate() const;
};

/// Ratio E[x] / sqrt(E[x^2]) of the drive signal: the optical output per unit
/// of electrical budget relative to an unmodulated DC drive.
double optical_fraction(LightScheme scheme, double bias_db);

/// Per-channel AC optical variance divided by (eta P)^2 for the scheme.
double ac_optical_fraction(LightScheme scheme, double bias_db);

/// Unit-optical-power spectrum of each channel.
std::array<SpectralDistribution, csk_band_count> channel_spectra(const RoomScenario& s);

/// Time-average emitted SPD per LED for a scheme (W/nm).
SpectralDistribution average_led_spd(const RoomScenario& s, LightScheme scheme);

Eigen::Matrix4d scenario_crosstalk(const RoomScenario& s);

struct RoomMaps {
    LightScheme scheme = LightScheme::qct;
    HeatMap lux;          // normalized to the peak of an unmodulated full-budget map
    HeatMap snr_db;
    double reference_peak_lux = 0.0;  // absolute lux that maps to 1.0
};

/// Sum of LOS gains over all LEDs at each grid cell.
HeatMap gain_map(const RoomGeometry& room, const ReceiverSpec& rx, std::size_t threads = 1);

RoomMaps run_room_maps(const RoomScenario& s, LightScheme scheme, std::size_t threads = 1);

struct SchemeIllumination {
    LightScheme scheme = LightScheme::qct;
    bool cct_valid = false;
    double cct_kelvin = 0.0;
    double duv = 0.0;
    double cri_general = 0.0;
    std::array<double, CieTables::sample_count> cri_special{};
    double mean_normalized_lux = 0.0;
    double optical_fraction = 0.0;
    double measured_optical_fraction = 0.0;
    double clipped_fraction = 0.0;
    std::string note;
};

struct IlluminationReport {
    std::vector<SchemeIllumination> schemes;
    double lux_ratio = 0.0;  // QCT mean / CSK mean
};

/// Builds each scheme's time-average SPD and evaluates CRI, CCT, mean
/// normalized lux and clipping. `frames` QCT frames are simulated to count
/// clipped samples.
IlluminationReport run_illumination_report(const RoomScenario& s, const QctModem& qct, std::size_t frames,
                                           std::uint64_t seed, std::size_t threads = 1);

}  // namespace vlcsim
