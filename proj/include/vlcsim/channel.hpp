#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vlcsim/spectral_core.hpp"

namespace vlcsim {

// ---------------------------------------------------------------------------
// Random streams

/// Seed for the independent substream identified by (seed, point, frame).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t frame) noexcept;

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    static RngStream substream(std::uint64_t seed, std::uint64_t point, std::uint64_t frame) {
        return RngStream(substream_seed(seed, point, frame));
    }

    double gaussian() { return normal_(engine_); }
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Discrete link

RealFrame add_cp(std::span<const double> x, std::size_t cp_len);
RealFrame remove_cp(std::span<const double> y, std::size_t cp_len);

/// Linear convolution of a CP-extended frame with h, truncated to the frame
/// length. Throws IsiError when cp_len < taps - 1.
RealFrame transmit(std::span<const double> x_with_cp, const ChannelImpulseResponse& h, std::size_t cp_len);

struct AwgnSpec {
    double n0 = 1e-22;          // A^2/Hz
    double bandwidth = 20e6;    // Hz

    void validate() const;
    double variance() const { return n0 * bandwidth; }
};

RealFrame awgn(std::span<const double> x, const AwgnSpec& spec, RngStream& rng);

/// Adds N(0, variance) to every sample in place; variance 0 leaves x as is.
void add_gaussian_noise(std::span<double> x, double variance, RngStream& rng);

// ---------------------------------------------------------------------------
// Geometry

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline constexpr std::size_t color_channel_count = 4;

struct LedLuminaire {
    Vec3 position;                 // m, emitter facing straight down
    double lambertian_order = 1.0;
    double electrical_power = 0.0; // W
    std::array<double, color_channel_count> channel_weights{0.25, 0.25, 0.25, 0.25};
};

struct ReceiverSpec {
    double area = 1e-4;            // m^2
    double fov = 1.4835298641951802;  // rad (85 deg)
    double responsivity = 0.4;     // A/W
    double height = 0.0;           // m, detector plane facing up

    void validate() const;
};

struct RoomGeometry {
    double length = 5.0;  // x extent, m
    double width = 5.0;   // y extent, m
    double height = 3.0;  // m
    std::vector<LedLuminaire> luminaires;
    double grid_step = 0.1;  // m

    void validate() const;
    double total_power() const noexcept;
};

/// m = -ln 2 / ln cos(semi_angle).
double lambertian_order(double semi_angle_rad);

/// Line-of-sight DC gain between a downward emitter and an upward detector.
double los_gain(const LedLuminaire& tx, const Vec3& rx_point, const ReceiverSpec& rx);

struct RoomLayout {
    double length = 5.0;
    double width = 5.0;
    double height = 3.0;
    double luminaire_offset = 1.25;   // luminaire centers at (+-offset, +-offset)
    std::size_t leds_per_side = 3;    // each luminaire is a square LED grid
    double led_pitch = 0.1;           // m
    double total_power = 100.0;       // W, split equally over LEDs and colours
    double semi_angle = 1.0471975511965976;  // rad (60 deg)
    double grid_step = 0.1;
};

/// Four ceiling luminaires of 3 x 3 LEDs, room centered on the origin.
RoomGeometry default_room(const RoomLayout& layout = {});

}  // namespace vlcsim
