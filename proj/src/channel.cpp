#include "vlcsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t frame) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ point) ^ frame);
}

RealFrame add_cp(std::span<const double> x, std::size_t cp_len) {
    if (cp_len >= x.size()) throw InvalidArgument("add_cp: cp_len must be shorter than the frame");
    RealFrame out;
    out.reserve(x.size() + cp_len);
    out.insert(out.end(), x.end() - static_cast<std::ptrdiff_t>(cp_len), x.end());
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

RealFrame remove_cp(std::span<const double> y, std::size_t cp_len) {
    if (cp_len >= y.size()) throw InvalidArgument("remove_cp: cp_len must be shorter than the frame");
    return RealFrame(y.begin() + static_cast<std::ptrdiff_t>(cp_len), y.end());
}

RealFrame transmit(std::span<const double> x_with_cp, const ChannelImpulseResponse& h, std::size_t cp_len) {
    const auto taps = h.taps();
    if (cp_len + 1 < taps.size())
        throw IsiError("transmit: cp_len " + std::to_string(cp_len) + " shorter than channel memory " +
                       std::to_string(taps.size() - 1));
    if (cp_len >= x_with_cp.size()) throw InvalidArgument("transmit: frame shorter than its cyclic prefix");
    RealFrame y(x_with_cp.size(), 0.0);
    for (std::size_t t = 0; t < taps.size(); ++t) {
        const double g = taps[t];
        if (g == 0.0) continue;
        for (std::size_t i = t; i < y.size(); ++i) y[i] += g * x_with_cp[i - t];
    }
    return y;
}

void AwgnSpec::validate() const {
    if (!(n0 > 0.0)) throw InvalidArgument("AwgnSpec: n0 must be positive");
    if (!(bandwidth > 0.0)) throw InvalidArgument("AwgnSpec: bandwidth must be positive");
}

void add_gaussian_noise(std::span<double> x, double variance, RngStream& rng) {
    if (!(variance >= 0.0)) throw InvalidArgument("add_gaussian_noise: variance must be >= 0");
    if (variance == 0.0) return;
    const double sigma = std::sqrt(variance);
    for (auto& v : x) v += sigma * rng.gaussian();
}

RealFrame awgn(std::span<const double> x, const AwgnSpec& spec, RngStream& rng) {
    spec.validate();
    RealFrame out(x.begin(), x.end());
    add_gaussian_noise(out, spec.variance(), rng);
    return out;
}

void ReceiverSpec::validate() const {
    if (!(area > 0.0)) throw InvalidArgument("ReceiverSpec: area must be positive");
    if (!(fov > 0.0 && fov <= std::numbers::pi / 2)) throw InvalidArgument("ReceiverSpec: fov must be in (0, pi/2]");
    if (!(responsivity > 0.0)) throw InvalidArgument("ReceiverSpec: responsivity must be positive");
}

void RoomGeometry::validate() const {
    if (!(length > 0.0 && width > 0.0 && height > 0.0)) throw InvalidArgument("room: dimensions must be positive");
    if (luminaires.empty()) throw InvalidArgument("room: no luminaires");
    if (!(grid_step > 0.0)) throw InvalidArgument("room: grid step must be positive");
    for (const auto& led : luminaires) {
        if (std::abs(led.position.x) > length / 2 + 1e-12 || std::abs(led.position.y) > width / 2 + 1e-12)
            throw InvalidArgument("room: luminaire outside the footprint");
        if (!(led.lambertian_order >= 1.0)) throw InvalidArgument("room: Lambertian order must be >= 1");
    }
}

double RoomGeometry::total_power() const noexcept {
    double sum = 0.0;
    for (const auto& led : luminaires) sum += led.electrical_power;
    return sum;
}

double lambertian_order(double semi_angle_rad) {
    if (!(semi_angle_rad > 0.0 && semi_angle_rad < std::numbers::pi / 2))
        throw InvalidArgument("lambertian_order: semi-angle must lie in (0, pi/2)");
    return -std::numbers::ln2 / std::log(std::cos(semi_angle_rad));
}

double los_gain(const LedLuminaire& tx, const Vec3& rx_point, const ReceiverSpec& rx) {
    const double dx = rx_point.x - tx.position.x;
    const double dy = rx_point.y - tx.position.y;
    const double dz = tx.position.z - rx_point.z;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 == 0.0) throw InvalidArgument("los_gain: transmitter and receiver coincide");
    const double d = std::sqrt(d2);
    // Both normals are vertical, so emission and incidence angles coincide.
    const double cos_angle = dz / d;
    if (cos_angle <= 0.0) return 0.0;
    if (std::acos(std::min(1.0, cos_angle)) > rx.fov) return 0.0;
    const double m = tx.lambertian_order;
    return (m + 1.0) * rx.area / (2.0 * std::numbers::pi * d2) * std::pow(cos_angle, m) * cos_angle;
}

RoomGeometry default_room(const RoomLayout& layout) {
    RoomGeometry room;
    room.length = layout.length;
    room.width = layout.width;
    room.height = layout.height;
    room.grid_step = layout.grid_step;

    const double m = lambertian_order(layout.semi_angle);
    const std::size_t per_luminaire = layout.leds_per_side * layout.leds_per_side;
    const double per_led = layout.total_power / static_cast<double>(4 * per_luminaire);
    const double half_span = 0.5 * static_cast<double>(layout.leds_per_side - 1);

    for (const double cx : {-layout.luminaire_offset, layout.luminaire_offset}) {
        for (const double cy : {-layout.luminaire_offset, layout.luminaire_offset}) {
            for (std::size_t i = 0; i < layout.leds_per_side; ++i) {
                for (std::size_t j = 0; j < layout.leds_per_side; ++j) {
                    LedLuminaire led;
                    led.position = {cx + (static_cast<double>(i) - half_span) * layout.led_pitch,
                                    cy + (static_cast<double>(j) - half_span) * layout.led_pitch, layout.height};
                    led.lambertian_order = m;
                    led.electrical_power = per_led;
                    room.luminaires.push_back(led);
                }
            }
        }
    }
    room.validate();
    return room;
}

}  // namespace vlcsim
