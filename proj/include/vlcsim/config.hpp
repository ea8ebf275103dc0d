#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlcsim/channel.hpp"
#include "vlcsim/experiments.hpp"
#include "vlcsim/modems.hpp"

namespace vlcsim {

/// Parse or validation failure in a configuration file. `line` is 0 when the
/// problem is not tied to one line (e.g. a cross-key constraint).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::size_t line = 0, std::string key = {});

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

struct ExperimentConfig {
    // [modem]
    std::size_t n = 512;
    std::size_t cp_len = 4;
    double bias_db = 13.0;
    std::size_t pam_order = 4;
    std::size_t qam_order = 16;
    std::string assignment = "round-robin";
    bool clip = true;

    // [channel]
    std::string channel_profile = "flat";  // flat | threetap | custom
    std::vector<double> custom_taps{1.0};
    bool normalize_taps = true;

    // [csk]
    double csk_avg_power = 1.0;
    std::string csk_crosstalk = "derived";  // derived | identity
    std::array<double, 4> band_lower_nm{612.0, 575.0, 483.0, 400.0};
    double band_upper_nm = 780.0;
    double filter_gain = 1.0;
    std::size_t csk_symbols_per_frame = 512;

    // [ber]
    std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14, 16};
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 10'000'000;
    std::vector<std::string> ber_schemes{"qct", "dco-ofdm", "csk"};

    // [papr]
    std::size_t papr_frames = 10'000;
    double papr_min_db = 0.0;
    double papr_max_db = 16.0;
    double papr_step_db = 0.25;

    // [room]
    RoomLayout room;

    // [receiver]
    double rx_area = 1e-4;
    double rx_fov_deg = 85.0;
    double rx_responsivity = 0.4;
    double rx_height = 0.0;

    // [noise]
    double n0 = 1e-22;
    double bandwidth_hz = 20e6;

    // [led]
    std::array<double, 4> led_peak_nm{632.5, 600.0, 517.7, 453.0};
    std::array<double, 4> led_width_left_nm{23.84, 19.66, 29.38, 18.99};
    std::array<double, 4> led_width_right_nm{14.74, 14.97, 45.21, 25.5};
    std::array<double, 4> led_k1{2.0, 2.0, 2.0, 2.0};
    std::array<double, 4> led_k2{6.0, 5.0, 3.0, 5.0};
    std::array<double, 4> led_efficiency{1.0, 1.0, 1.0, 1.0};

    // [illum]
    std::size_t illum_frames = 200;

    // [run] (not part of the hash)
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string out_dir = "out";

    /// Cross-key checks; throws ConfigError naming the offending key.
    void validate() const;

    QctConfig qct() const;
    OfdmConfig ofdm() const;
    ChannelImpulseResponse channel() const;
    RoomScenario scenario() const;
    CskConfig csk() const;
    StopRule stop() const;
    std::vector<double> papr_thresholds() const;

    /// "section.key = value" lines for every hashed key, sorted.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a 64 over canonical().
    std::string hash() const;
};

struct ConfigKeyInfo {
    std::string name;           // section.key
    std::string type;           // integer, number, boolean, string, list
    std::string default_value;  // canonical text
    std::string unit;
    std::string description;
};

/// Every accepted key with its default, in file order.
std::vector<ConfigKeyInfo> config_keys();

/// Help text listing every key.
std::string config_reference();

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes a complete config file holding the defaults.
std::string default_config_text();

}  // namespace vlcsim
