#include "vlcsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "vlcsim/errors.hpp"

namespace vlcsim {

ConfigError::ConfigError(const std::string& message, std::size_t line, std::string key)
    : std::runtime_error(message), line_(line), key_(std::move(key)) {}

namespace {

// ---------------------------------------------------------------------------
// Values

struct Value {
    enum class Kind { number, boolean, string, list };
    Kind kind = Kind::number;
    double number = 0.0;
    std::string raw;  // literal text of a number
    bool boolean = false;
    std::string text;
    std::vector<Value> items;
};

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

template <typename Seq, typename Fmt>
std::string format_list(const Seq& seq, Fmt fmt) {
    std::string out = "[";
    bool first = true;
    for (const auto& v : seq) {
        if (!first) out += ", ";
        first = false;
        out += fmt(v);
    }
    return out + "]";
}

struct Location {
    std::size_t line;
    std::string key;
};

[[noreturn]] void fail(const Location& at, const std::string& message) {
    throw ConfigError("line " + std::to_string(at.line) + ": key '" + at.key + "': " + message, at.line, at.key);
}

double as_number(const Value& v, const Location& at) {
    if (v.kind != Value::Kind::number) fail(at, "expected a number");
    return v.number;
}

std::uint64_t as_unsigned(const Value& v, const Location& at) {
    const double d = as_number(v, at);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) fail(at, "expected a non-negative integer, got " + v.raw);
    return static_cast<std::uint64_t>(d);
}

bool as_bool(const Value& v, const Location& at) {
    if (v.kind != Value::Kind::boolean) fail(at, "expected true or false");
    return v.boolean;
}

std::string as_string(const Value& v, const Location& at) {
    if (v.kind != Value::Kind::string) fail(at, "expected a quoted string");
    return v.text;
}

const std::vector<Value>& as_list(const Value& v, const Location& at) {
    if (v.kind != Value::Kind::list) fail(at, "expected a list [a, b, ...]");
    return v.items;
}

std::vector<double> as_number_list(const Value& v, const Location& at) {
    std::vector<double> out;
    for (const auto& item : as_list(v, at)) out.push_back(as_number(item, at));
    return out;
}

std::array<double, 4> as_four(const Value& v, const Location& at) {
    const auto list = as_number_list(v, at);
    if (list.size() != 4) fail(at, "expected exactly 4 numbers (red, amber, green, blue)");
    return {list[0], list[1], list[2], list[3]};
}

// ---------------------------------------------------------------------------
// Key registry

struct KeySpec {
    std::string section;
    std::string key;
    std::string type;
    std::string unit;
    std::string description;
    std::function<void(ExperimentConfig&, const Value&, const Location&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
    bool hashed = true;

    std::string name() const { return section + "." + key; }
};

template <typename Access>
KeySpec number_key(std::string section, std::string key, std::string unit, std::string desc, Access access) {
    return {std::move(section), std::move(key), "number", std::move(unit), std::move(desc),
            [access](ExperimentConfig& c, const Value& v, const Location& at) { access(c) = as_number(v, at); },
            [access](const ExperimentConfig& c) { return format_number(access(c)); }};
}

template <typename Access>
KeySpec integer_key(std::string section, std::string key, std::string unit, std::string desc, Access access) {
    return {std::move(section), std::move(key), "integer", std::move(unit), std::move(desc),
            [access](ExperimentConfig& c, const Value& v, const Location& at) {
                using T = std::remove_reference_t<decltype(access(c))>;
                access(c) = static_cast<T>(as_unsigned(v, at));
            },
            [access](const ExperimentConfig& c) { return std::to_string(access(c)); }};
}

template <typename Access>
KeySpec bool_key(std::string section, std::string key, std::string desc, Access access) {
    return {std::move(section), std::move(key), "boolean", "-", std::move(desc),
            [access](ExperimentConfig& c, const Value& v, const Location& at) { access(c) = as_bool(v, at); },
            [access](const ExperimentConfig& c) { return std::string(access(c) ? "true" : "false"); }};
}

template <typename Access>
KeySpec string_key(std::string section, std::string key, std::string desc, Access access) {
    return {std::move(section), std::move(key), "string", "-", std::move(desc),
            [access](ExperimentConfig& c, const Value& v, const Location& at) { access(c) = as_string(v, at); },
            [access](const ExperimentConfig& c) { return quote(access(c)); }};
}

template <typename Access>
KeySpec four_key(std::string section, std::string key, std::string unit, std::string desc, Access access) {
    return {std::move(section), std::move(key), "list of 4 numbers", std::move(unit), std::move(desc),
            [access](ExperimentConfig& c, const Value& v, const Location& at) { access(c) = as_four(v, at); },
            [access](const ExperimentConfig& c) { return format_list(access(c), format_number); }};
}

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        // modem
        k.push_back(integer_key("modem", "n", "samples", "frame size N (power of two >= 4)",
                                [](auto& c) -> auto& { return c.n; }));
        k.push_back(integer_key("modem", "cp_len", "samples", "cyclic prefix length",
                                [](auto& c) -> auto& { return c.cp_len; }));
        k.push_back(number_key("modem", "bias_db", "dB", "electrical DC bias for QCT and DCO-OFDM",
                               [](auto& c) -> auto& { return c.bias_db; }));
        k.push_back(integer_key("modem", "pam_order", "-", "QCT PAM order M (2, 4, 8, 16)",
                                [](auto& c) -> auto& { return c.pam_order; }));
        k.push_back(integer_key("modem", "qam_order", "-", "DCO-OFDM square QAM order (4, 16, 64, ...)",
                                [](auto& c) -> auto& { return c.qam_order; }));
        k.push_back(string_key("modem", "assignment", "QCT column partition: \"round-robin\" or \"contiguous\"",
                               [](auto& c) -> auto& { return c.assignment; }));
        k.push_back(bool_key("modem", "clip", "zero negative samples after biasing",
                             [](auto& c) -> auto& { return c.clip; }));
        // channel
        k.push_back(string_key("channel", "profile", "BER channel: \"flat\", \"threetap\" ([1, 0.5, 0.25]) or \"custom\"",
                               [](auto& c) -> auto& { return c.channel_profile; }));
        k.push_back({"channel", "taps", "list of numbers", "-", "impulse response used when profile = \"custom\"",
                     [](ExperimentConfig& c, const Value& v, const Location& at) {
                         c.custom_taps = as_number_list(v, at);
                     },
                     [](const ExperimentConfig& c) { return format_list(c.custom_taps, format_number); }});
        k.push_back(bool_key("channel", "normalize", "scale the impulse response to unit energy",
                             [](auto& c) -> auto& { return c.normalize_taps; }));
        // csk
        k.push_back(number_key("csk", "avg_power", "W", "average electrical symbol power in BER sweeps",
                               [](auto& c) -> auto& { return c.csk_avg_power; }));
        k.push_back(string_key("csk", "crosstalk", "\"derived\" (from LED spectra and bands) or \"identity\"",
                               [](auto& c) -> auto& { return c.csk_crosstalk; }));
        k.push_back(four_key("csk", "band_lower_nm", "nm", "receiver filter lower bounds (red, amber, green, blue)",
                             [](auto& c) -> auto& { return c.band_lower_nm; }));
        k.push_back(number_key("csk", "band_upper_nm", "nm", "upper bound of the red filter band",
                               [](auto& c) -> auto& { return c.band_upper_nm; }));
        k.push_back(number_key("csk", "filter_gain", "-", "receiver filter gain in (0, 1]",
                               [](auto& c) -> auto& { return c.filter_gain; }));
        k.push_back(integer_key("csk", "symbols_per_frame", "symbols", "CSK symbols per simulated frame",
                                [](auto& c) -> auto& { return c.csk_symbols_per_frame; }));
        // ber
        k.push_back({"ber", "snr_db", "list of numbers", "dB", "SNR per bit sweep points",
                     [](ExperimentConfig& c, const Value& v, const Location& at) { c.snr_db = as_number_list(v, at); },
                     [](const ExperimentConfig& c) { return format_list(c.snr_db, format_number); }});
        k.push_back(integer_key("ber", "min_errors", "bits", "stop a point after this many bit errors",
                                [](auto& c) -> auto& { return c.min_errors; }));
        k.push_back(integer_key("ber", "max_bits", "bits", "stop a point after this many bits",
                                [](auto& c) -> auto& { return c.max_bits; }));
        k.push_back({"ber", "schemes", "list of strings", "-", "schemes to simulate: \"qct\", \"dco-ofdm\", \"csk\"",
                     [](ExperimentConfig& c, const Value& v, const Location& at) {
                         c.ber_schemes.clear();
                         for (const auto& item : as_list(v, at)) c.ber_schemes.push_back(as_string(item, at));
                     },
                     [](const ExperimentConfig& c) { return format_list(c.ber_schemes, quote); }});
        // papr
        k.push_back(integer_key("papr", "frames", "frames", "frames per scheme",
                                [](auto& c) -> auto& { return c.papr_frames; }));
        k.push_back(number_key("papr", "min_db", "dB", "first CCDF threshold",
                               [](auto& c) -> auto& { return c.papr_min_db; }));
        k.push_back(number_key("papr", "max_db", "dB", "last CCDF threshold",
                               [](auto& c) -> auto& { return c.papr_max_db; }));
        k.push_back(number_key("papr", "step_db", "dB", "CCDF threshold spacing",
                               [](auto& c) -> auto& { return c.papr_step_db; }));
        // room
        k.push_back(number_key("room", "length", "m", "room extent along x",
                               [](auto& c) -> auto& { return c.room.length; }));
        k.push_back(number_key("room", "width", "m", "room extent along y",
                               [](auto& c) -> auto& { return c.room.width; }));
        k.push_back(number_key("room", "height", "m", "ceiling height (LED plane)",
                               [](auto& c) -> auto& { return c.room.height; }));
        k.push_back(number_key("room", "luminaire_offset", "m", "luminaire centres at (+-offset, +-offset)",
                               [](auto& c) -> auto& { return c.room.luminaire_offset; }));
        k.push_back(integer_key("room", "leds_per_side", "LEDs", "each luminaire is a square LED grid",
                                [](auto& c) -> auto& { return c.room.leds_per_side; }));
        k.push_back(number_key("room", "led_pitch", "m", "LED spacing inside a luminaire",
                               [](auto& c) -> auto& { return c.room.led_pitch; }));
        k.push_back(number_key("room", "total_power", "W", "electrical budget over all LEDs and colours",
                               [](auto& c) -> auto& { return c.room.total_power; }));
        k.push_back({"room", "semi_angle_deg", "number", "deg", "LED half-power semi-angle",
                     [](ExperimentConfig& c, const Value& v, const Location& at) {
                         c.room.semi_angle = as_number(v, at) * std::numbers::pi / 180.0;
                     },
                     [](const ExperimentConfig& c) {
                         return format_number(std::round(c.room.semi_angle * 180.0 / std::numbers::pi * 1e9) / 1e9);
                     }});
        k.push_back(number_key("room", "grid_step", "m", "map grid spacing",
                               [](auto& c) -> auto& { return c.room.grid_step; }));
        // receiver
        k.push_back(number_key("receiver", "area", "m^2", "photodiode area",
                               [](auto& c) -> auto& { return c.rx_area; }));
        k.push_back(number_key("receiver", "fov_deg", "deg", "field of view half-angle",
                               [](auto& c) -> auto& { return c.rx_fov_deg; }));
        k.push_back(number_key("receiver", "responsivity", "A/W", "photodiode responsivity",
                               [](auto& c) -> auto& { return c.rx_responsivity; }));
        k.push_back(number_key("receiver", "height", "m", "height of the receiver plane",
                               [](auto& c) -> auto& { return c.rx_height; }));
        // noise
        k.push_back(number_key("noise", "n0", "A^2/Hz", "noise power spectral density",
                               [](auto& c) -> auto& { return c.n0; }));
        k.push_back(number_key("noise", "bandwidth", "Hz", "receiver noise bandwidth",
                               [](auto& c) -> auto& { return c.bandwidth_hz; }));
        // led
        k.push_back(four_key("led", "peak_nm", "nm", "H-model peak wavelength (red, amber, green, blue)",
                             [](auto& c) -> auto& { return c.led_peak_nm; }));
        k.push_back(four_key("led", "width_left_nm", "nm", "H-model width below the peak",
                             [](auto& c) -> auto& { return c.led_width_left_nm; }));
        k.push_back(four_key("led", "width_right_nm", "nm", "H-model width above the peak",
                             [](auto& c) -> auto& { return c.led_width_right_nm; }));
        k.push_back(four_key("led", "k1", "-", "H-model k1", [](auto& c) -> auto& { return c.led_k1; }));
        k.push_back(four_key("led", "k2", "-", "H-model k2", [](auto& c) -> auto& { return c.led_k2; }));
        k.push_back(four_key("led", "efficiency", "W/W", "electrical-to-optical efficiency per colour",
                             [](auto& c) -> auto& { return c.led_efficiency; }));
        // illum
        k.push_back(integer_key("illum", "frames", "frames", "QCT frames simulated to measure clipping",
                                [](auto& c) -> auto& { return c.illum_frames; }));
        // run
        auto seed = integer_key("run", "seed", "-", "RNG seed", [](auto& c) -> auto& { return c.seed; });
        seed.hashed = false;
        k.push_back(seed);
        auto threads = integer_key("run", "threads", "threads", "worker threads (0 = all cores)",
                                   [](auto& c) -> auto& { return c.threads; });
        threads.hashed = false;
        k.push_back(threads);
        auto out = string_key("run", "out_dir", "output directory", [](auto& c) -> auto& { return c.out_dir; });
        out.hashed = false;
        k.push_back(out);
        return k;
    }();
    return keys;
}

const KeySpec* find_key(const std::string& section, const std::string& key) {
    for (const auto& spec : registry())
        if (spec.section == section && spec.key == key) return &spec;
    return nullptr;
}

bool known_section(const std::string& section) {
    return std::any_of(registry().begin(), registry().end(), [&](const KeySpec& s) { return s.section == section; });
}

// ---------------------------------------------------------------------------
// Lexer

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

class ValueParser {
public:
    ValueParser(std::string_view text, const Location& at) : s_(text), at_(at) {}

    Value parse_all() {
        Value v = parse_value();
        skip_space();
        if (pos_ != s_.size()) fail(at_, "unexpected text after value: '" + std::string(s_.substr(pos_)) + "'");
        return v;
    }

private:
    void skip_space() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    Value parse_value() {
        skip_space();
        if (pos_ >= s_.size()) fail(at_, "missing value");
        const char c = s_[pos_];
        if (c == '"') return parse_string();
        if (c == '[') return parse_list();
        return parse_scalar();
    }

    Value parse_string() {
        Value v;
        v.kind = Value::Kind::string;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') {
                if (++pos_ >= s_.size()) break;
                const char e = s_[pos_];
                if (e != '"' && e != '\\') fail(at_, std::string("unsupported escape \\") + e);
            }
            v.text += s_[pos_++];
        }
        if (pos_ >= s_.size()) fail(at_, "unterminated string");
        ++pos_;
        return v;
    }

    Value parse_list() {
        Value v;
        v.kind = Value::Kind::list;
        ++pos_;
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value());
            if (v.items.back().kind == Value::Kind::list) fail(at_, "nested lists are not supported");
            skip_space();
            if (pos_ >= s_.size()) fail(at_, "unterminated list");
            if (s_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail(at_, "expected ',' or ']' in list");
        }
    }

    Value parse_scalar() {
        const auto start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
        const std::string token(s_.substr(start, pos_ - start));
        Value v;
        if (token == "true" || token == "false") {
            v.kind = Value::Kind::boolean;
            v.boolean = token == "true";
            return v;
        }
        std::string digits;
        for (const char c : token)
            if (c != '_') digits += c;
        const char* first = digits.data();
        if (!digits.empty() && digits[0] == '+') ++first;
        double d = 0.0;
        const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), d);
        if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || !std::isfinite(d))
            fail(at_, "cannot parse value '" + token + "'");
        v.kind = Value::Kind::number;
        v.number = d;
        v.raw = token;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    Location at_;
};

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '\\' && in_string) {
            ++i;
            continue;
        }
        if (c == '"') in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

[[noreturn]] void invalid(const std::string& key, const std::string& message) {
    throw ConfigError("key '" + key + "': " + message, 0, key);
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

void ExperimentConfig::validate() const {
    if (n < 4 || !power_of_two(n)) invalid("modem.n", "must be a power of two >= 4");
    if (cp_len >= n) invalid("modem.cp_len", "must be shorter than modem.n");
    if (!(bias_db >= 0.0)) invalid("modem.bias_db", "must be >= 0");
    if (pam_order != 2 && pam_order != 4 && pam_order != 8 && pam_order != 16)
        invalid("modem.pam_order", "must be 2, 4, 8 or 16");
    if (qam_order < 4 || !power_of_two(qam_order) || std::countr_zero(qam_order) % 2 != 0)
        invalid("modem.qam_order", "must be a square power of two (4, 16, 64, ...)");
    if (assignment != "round-robin" && assignment != "contiguous")
        invalid("modem.assignment", "must be \"round-robin\" or \"contiguous\"");

    if (channel_profile != "flat" && channel_profile != "threetap" && channel_profile != "custom")
        invalid("channel.profile", "must be \"flat\", \"threetap\" or \"custom\"");
    if (channel_profile == "custom") {
        if (custom_taps.empty()) invalid("channel.taps", "needs at least one tap");
        if (std::all_of(custom_taps.begin(), custom_taps.end(), [](double t) { return t == 0.0; }))
            invalid("channel.taps", "needs a nonzero tap");
        for (const double t : custom_taps)
            if (!std::isfinite(t)) invalid("channel.taps", "taps must be finite");
    }
    const std::size_t taps = channel_profile == "flat" ? 1 : channel_profile == "threetap" ? 3 : custom_taps.size();
    if (taps > n) invalid("channel.taps", "channel longer than modem.n");
    if (cp_len + 1 < taps) invalid("modem.cp_len", "must be at least the channel memory (" + std::to_string(taps - 1) + ")");

    if (!(csk_avg_power > 0.0)) invalid("csk.avg_power", "must be positive");
    if (csk_crosstalk != "derived" && csk_crosstalk != "identity")
        invalid("csk.crosstalk", "must be \"derived\" or \"identity\"");
    if (!(band_upper_nm > band_lower_nm[0])) invalid("csk.band_upper_nm", "must exceed the red lower bound");
    for (std::size_t i = 1; i < 4; ++i)
        if (!(band_lower_nm[i] < band_lower_nm[i - 1]))
            invalid("csk.band_lower_nm", "lower bounds must strictly decrease (red, amber, green, blue)");
    if (band_lower_nm[3] < grid::first_nm || band_upper_nm > grid::last_nm)
        invalid("csk.band_lower_nm", "bands must lie within 380-780 nm");
    if (!(filter_gain > 0.0 && filter_gain <= 1.0)) invalid("csk.filter_gain", "must lie in (0, 1]");
    if (csk_symbols_per_frame == 0) invalid("csk.symbols_per_frame", "must be positive");

    if (snr_db.empty()) invalid("ber.snr_db", "needs at least one point");
    for (const double s : snr_db)
        if (std::isnan(s)) invalid("ber.snr_db", "NaN is not an SNR");
    if (min_errors == 0) invalid("ber.min_errors", "must be positive");
    if (max_bits == 0) invalid("ber.max_bits", "must be positive");
    if (ber_schemes.empty()) invalid("ber.schemes", "needs at least one scheme");
    std::set<std::string> seen;
    for (const auto& s : ber_schemes) {
        if (s != "qct" && s != "dco-ofdm" && s != "csk") invalid("ber.schemes", "unknown scheme \"" + s + "\"");
        if (!seen.insert(s).second) invalid("ber.schemes", "duplicate scheme \"" + s + "\"");
    }

    if (papr_frames == 0) invalid("papr.frames", "must be positive");
    if (!(papr_step_db > 0.0)) invalid("papr.step_db", "must be positive");
    if (!(papr_max_db >= papr_min_db)) invalid("papr.max_db", "must be >= papr.min_db");

    if (!(room.length > 0.0)) invalid("room.length", "must be positive");
    if (!(room.width > 0.0)) invalid("room.width", "must be positive");
    if (!(room.height > 0.0)) invalid("room.height", "must be positive");
    if (room.leds_per_side == 0) invalid("room.leds_per_side", "must be positive");
    if (!(room.led_pitch >= 0.0)) invalid("room.led_pitch", "must be >= 0");
    if (!(room.total_power > 0.0)) invalid("room.total_power", "must be positive");
    if (!(room.semi_angle > 0.0 && room.semi_angle < std::numbers::pi / 2))
        invalid("room.semi_angle_deg", "must lie in (0, 90)");
    if (!(room.grid_step > 0.0)) invalid("room.grid_step", "must be positive");
    const double reach = room.luminaire_offset + 0.5 * static_cast<double>(room.leds_per_side - 1) * room.led_pitch;
    if (!(room.luminaire_offset >= 0.0) || reach > room.length / 2 || reach > room.width / 2)
        invalid("room.luminaire_offset", "luminaires must fit inside the room footprint");

    if (!(rx_area > 0.0)) invalid("receiver.area", "must be positive");
    if (!(rx_fov_deg > 0.0 && rx_fov_deg <= 90.0)) invalid("receiver.fov_deg", "must lie in (0, 90]");
    if (!(rx_responsivity > 0.0)) invalid("receiver.responsivity", "must be positive");
    if (!(rx_height >= 0.0 && rx_height < room.height)) invalid("receiver.height", "must lie in [0, room.height)");

    if (!(n0 > 0.0)) invalid("noise.n0", "must be positive");
    if (!(bandwidth_hz > 0.0)) invalid("noise.bandwidth", "must be positive");

    for (std::size_t c = 0; c < 4; ++c) {
        if (!(led_width_left_nm[c] > 0.0)) invalid("led.width_left_nm", "widths must be positive");
        if (!(led_width_right_nm[c] > 0.0)) invalid("led.width_right_nm", "widths must be positive");
        if (!(led_k1[c] >= 0.0)) invalid("led.k1", "must be >= 0");
        if (!(led_k2[c] >= 1.0)) invalid("led.k2", "must be >= 1");
        if (!(led_efficiency[c] > 0.0)) invalid("led.efficiency", "must be positive");
    }
    if (illum_frames == 0) invalid("illum.frames", "must be positive");
}

QctConfig ExperimentConfig::qct() const { return {n, cp_len, bias_db, pam_order, assignment, clip}; }

OfdmConfig ExperimentConfig::ofdm() const { return {n, cp_len, bias_db, qam_order, clip}; }

ChannelImpulseResponse ExperimentConfig::channel() const {
    std::vector<double> taps{1.0};
    if (channel_profile == "threetap") taps = {1.0, 0.5, 0.25};
    if (channel_profile == "custom") taps = custom_taps;
    ChannelImpulseResponse h(taps);
    return normalize_taps ? h.normalized() : h;
}

RoomScenario ExperimentConfig::scenario() const {
    RoomScenario s;
    s.room = default_room(room);
    s.receiver = {rx_area, rx_fov_deg * std::numbers::pi / 180.0, rx_responsivity, rx_height};
    s.noise = {n0, bandwidth_hz};
    for (std::size_t c = 0; c < 4; ++c) {
        s.leds[c] = {led_peak_nm[c], led_width_left_nm[c], led_width_right_nm[c], led_k1[c], led_k2[c]};
        s.bands[c] = {band_lower_nm[c], c == 0 ? band_upper_nm : band_lower_nm[c - 1]};
    }
    s.efficiency = led_efficiency;
    s.bias_db = bias_db;
    return s;
}

CskConfig ExperimentConfig::csk() const {
    CskConfig c;
    c.avg_power = csk_avg_power;
    c.crosstalk = csk_crosstalk == "identity" ? Eigen::Matrix4d::Identity() : scenario_crosstalk(scenario());
    c.crosstalk *= filter_gain;
    return c;
}

StopRule ExperimentConfig::stop() const { return {min_errors, max_bits}; }

std::vector<double> ExperimentConfig::papr_thresholds() const {
    return threshold_grid(papr_min_db, papr_max_db, papr_step_db);
}

std::string ExperimentConfig::canonical() const {
    std::vector<std::string> lines;
    for (const auto& spec : registry())
        if (spec.hashed) lines.push_back(spec.name() + " = " + spec.get(*this));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<ConfigKeyInfo> config_keys() {
    const ExperimentConfig defaults;
    std::vector<ConfigKeyInfo> out;
    for (const auto& spec : registry())
        out.push_back({spec.name(), spec.type, spec.get(defaults), spec.unit, spec.description});
    return out;
}

std::string config_reference() {
    std::ostringstream os;
    os << "Config keys (section.key = default [unit]  description):\n";
    for (const auto& k : config_keys())
        os << "  " << k.name << " = " << k.default_value << "  [" << k.unit << "]  " << k.description << "\n";
    return os.str();
}

std::string default_config_text() {
    const ExperimentConfig defaults;
    std::ostringstream os;
    std::string section;
    for (const auto& spec : registry()) {
        if (spec.section != section) {
            if (!section.empty()) os << "\n";
            section = spec.section;
            os << "[" << section << "]\n";
        }
        os << spec.key << " = " << spec.get(defaults) << "  # " << spec.unit << ", " << spec.description << "\n";
    }
    return os.str();
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> assigned;
    try {
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string line = trim(strip_comment(raw));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail({line_no, line}, "malformed section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                if (!known_section(section))
                    throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]",
                                      line_no, section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string full = section.empty() ? key : section + "." + key;
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' appears before any [section]",
                                  line_no, key);
            const KeySpec* spec = find_key(section, key);
            if (spec == nullptr)
                throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + full + "'", line_no, full);
            if (!assigned.emplace(full, line_no).second) fail({line_no, full}, "assigned more than once");
            const Location at{line_no, full};
            const Value value = ValueParser(std::string_view(line).substr(eq + 1), at).parse_all();
            spec->set(cfg, value, at);
        }
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            const auto it = assigned.find(e.key());
            if (it == assigned.end()) throw;
            throw ConfigError("line " + std::to_string(it->second) + ": " + e.what(), it->second, e.key());
        }
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what(), e.line(), e.key());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

}  // namespace vlcsim
