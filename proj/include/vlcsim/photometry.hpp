#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

namespace vlcsim {

namespace grid {
inline constexpr int first_nm = 380;
inline constexpr int last_nm = 780;
inline constexpr double step_nm = 1.0;
inline constexpr std::size_t size = static_cast<std::size_t>(last_nm - first_nm) + 1;

constexpr double wavelength(std::size_t i) noexcept { return first_nm + static_cast<double>(i) * step_nm; }
}  // namespace grid

/// Radiometric power density (W/nm) on the shared 380-780 nm, 1 nm grid.
class SpectralDistribution {
public:
    SpectralDistribution() : values_(grid::size, 0.0) {}
    explicit SpectralDistribution(std::vector<double> values);

    static SpectralDistribution from_function(const std::function<double(double)>& density);

    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at_nm(int nm) const;
    double peak() const noexcept;

    /// Trapezoidal integral over the full grid (W).
    double integral() const noexcept;
    /// Trapezoidal integral over [lo_nm, hi_nm]; fractional edges are
    /// linearly interpolated.
    double band_integral(double lo_nm, double hi_nm) const;

    SpectralDistribution& operator+=(const SpectralDistribution& other);
    SpectralDistribution& operator*=(double scale);
    friend SpectralDistribution operator+(SpectralDistribution a, const SpectralDistribution& b) { return a += b; }
    friend SpectralDistribution operator*(SpectralDistribution a, double s) { return a *= s; }
    friend SpectralDistribution operator*(double s, SpectralDistribution a) { return a *= s; }

private:
    std::vector<double> values_;
};

/// Asymmetric Gaussian-composite LED emission shape.
struct HModelParams {
    double peak_nm = 0.0;
    double width_left_nm = 0.0;   // applies below the peak
    double width_right_nm = 0.0;  // applies at and above the peak
    double k1 = 0.0;
    double k2 = 1.0;

    void validate() const;
};

double h_model_density(const HModelParams& p, double wavelength_nm);

/// Unit-peak H-model spectrum sampled on the grid.
SpectralDistribution h_model_spd(const HModelParams& p);

/// LUXEON C colour channels ordered red (632.5 nm), amber (600 nm),
/// green (517.7 nm), blue (453 nm). Channels are named by peak wavelength.
std::array<HModelParams, 4> default_led_channels();

/// Scales so the trapezoidal integral equals `optical_watts`.
SpectralDistribution scale_to_power(const SpectralDistribution& spd, double optical_watts);

struct TristimulusXYZ {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
};

struct Chromaticity {
    double x = 0.0;
    double y = 0.0;
};

struct UcsUv {
    double u = 0.0;
    double v = 0.0;
};

/// CIE 1931 2-degree colour matching functions and the 14 CIE 13.3 test
/// colour samples, both resampled onto the shared grid.
class CieTables {
public:
    static constexpr std::size_t sample_count = 14;

    /// Reads cie_cmf_1931.csv and tcs_reflectance.csv from `dir`.
    static CieTables load(const std::filesystem::path& dir);

    /// Tables from the default data directory (VLCSIM_DATA_DIR overrides the
    /// build-time location). Loaded once.
    static const CieTables& standard();

    const std::vector<double>& xbar() const noexcept { return xbar_; }
    const std::vector<double>& ybar() const noexcept { return ybar_; }
    const std::vector<double>& zbar() const noexcept { return zbar_; }
    const std::vector<double>& sample(std::size_t i) const { return samples_.at(i); }

    /// Planckian locus in CIE 1960 uv at 10 K steps from 1000 K to 20000 K.
    const std::vector<UcsUv>& coarse_locus() const noexcept { return locus_; }
    static constexpr double locus_step_kelvin = 10.0;

private:
    std::vector<double> xbar_, ybar_, zbar_;
    std::array<std::vector<double>, sample_count> samples_;
    std::vector<UcsUv> locus_;
};

std::filesystem::path default_data_dir();

inline constexpr double max_luminous_efficacy = 683.0;  // lm/W

double luminous_flux(const SpectralDistribution& spd, const CieTables& tables = CieTables::standard());

/// Lux from lumens over an area in m^2.
double illuminance(double flux_lm, double area_m2);

TristimulusXYZ tristimulus(const SpectralDistribution& spd, const CieTables& tables = CieTables::standard());
Chromaticity chromaticity(const TristimulusXYZ& xyz);
UcsUv ucs_uv(const Chromaticity& xy);
UcsUv ucs_uv(const TristimulusXYZ& xyz);

inline constexpr double planck_min_kelvin = 1000.0;
inline constexpr double planck_max_kelvin = 20000.0;

/// Blackbody spectrum at `kelvin`, normalized to unit peak on the grid.
SpectralDistribution planckian_spd(double kelvin);

struct CctResult {
    double kelvin = 0.0;
    double duv = 0.0;  // signed distance in CIE 1960 uv, positive above the locus
};

inline constexpr double max_meaningful_duv = 0.05;

/// Closest Planckian-locus point in CIE 1960 uv: 10 K scan over 1000-20000 K,
/// then ternary refinement to 0.1 K. Throws NoMeaningfulCctError when
/// |Duv| > 0.05.
CctResult cct(const SpectralDistribution& spd, const CieTables& tables = CieTables::standard());
CctResult cct_from_uv(const UcsUv& uv, const CieTables& tables = CieTables::standard());

struct CriReport {
    std::array<double, CieTables::sample_count> special{};  // R_1..R_14
    double general = 0.0;                                     // R_a
    double reference_cct = 0.0;
    double duv = 0.0;
};

/// CIE 13.3 colour rendering index against a Planckian reference at the
/// test source's CCT.
CriReport cri(const SpectralDistribution& spd, const CieTables& tables = CieTables::standard());

}  // namespace vlcsim
