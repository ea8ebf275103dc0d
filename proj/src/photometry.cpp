#include "vlcsim/photometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>

#include "csv.hpp"
#include "vlcsim/errors.hpp"

#ifndef VLCSIM_DEFAULT_DATA_DIR
#define VLCSIM_DEFAULT_DATA_DIR "data"
#endif

namespace vlcsim {

namespace {

constexpr double planck_c2 = 1.4388e-2;  // m K

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> resample_linear(const std::vector<double>& nm, const std::vector<double>& values) {
    std::vector<double> out(grid::size);
    for (std::size_t i = 0; i < grid::size; ++i) {
        const double w = grid::wavelength(i);
        const auto hi = std::lower_bound(nm.begin(), nm.end(), w);
        const auto j = static_cast<std::size_t>(hi - nm.begin());
        if (j < nm.size() && nm[j] == w) {
            out[i] = values[j];
        } else {
            const double t = (w - nm[j - 1]) / (nm[j] - nm[j - 1]);
            out[i] = values[j - 1] + t * (values[j] - values[j - 1]);
        }
    }
    return out;
}

double planck_density(double kelvin, double nm) {
    const double lambda = nm * 1e-9;
    return 1.0 / (std::pow(lambda, 5) * std::expm1(planck_c2 / (lambda * kelvin)));
}

UcsUv locus_point(double kelvin, const CieTables& tables) {
    return ucs_uv(tristimulus(planckian_spd(kelvin), tables));
}

double uv_distance(const UcsUv& a, const UcsUv& b) { return std::hypot(a.u - b.u, a.v - b.v); }

}  // namespace

SpectralDistribution::SpectralDistribution(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() != grid::size)
        throw InvalidArgument("SpectralDistribution: expected " + std::to_string(grid::size) + " samples, got " +
                              std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("SpectralDistribution: samples must be finite and >= 0");
}

SpectralDistribution SpectralDistribution::from_function(const std::function<double(double)>& density) {
    std::vector<double> v(grid::size);
    for (std::size_t i = 0; i < grid::size; ++i) v[i] = density(grid::wavelength(i));
    return SpectralDistribution(std::move(v));
}

double SpectralDistribution::at_nm(int nm) const {
    if (nm < grid::first_nm || nm > grid::last_nm) throw InvalidArgument("SpectralDistribution: wavelength off grid");
    return values_[static_cast<std::size_t>(nm - grid::first_nm)];
}

double SpectralDistribution::peak() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double SpectralDistribution::integral() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) sum += 0.5 * (values_[i - 1] + values_[i]) * grid::step_nm;
    return sum;
}

double SpectralDistribution::band_integral(double lo_nm, double hi_nm) const {
    if (!(lo_nm <= hi_nm)) throw InvalidArgument("band_integral: lower bound above upper bound");
    lo_nm = std::max(lo_nm, static_cast<double>(grid::first_nm));
    hi_nm = std::min(hi_nm, static_cast<double>(grid::last_nm));
    if (lo_nm >= hi_nm) return 0.0;
    auto sample = [this](double nm) {
        const double pos = (nm - grid::first_nm) / grid::step_nm;
        const auto i = std::min(static_cast<std::size_t>(pos), grid::size - 2);
        const double t = pos - static_cast<double>(i);
        return values_[i] + t * (values_[i + 1] - values_[i]);
    };
    double sum = 0.0;
    double prev_nm = lo_nm;
    double prev_val = sample(lo_nm);
    for (double nm = std::floor(lo_nm) + 1.0; nm < hi_nm; nm += 1.0) {
        const double v = sample(nm);
        sum += 0.5 * (prev_val + v) * (nm - prev_nm);
        prev_nm = nm;
        prev_val = v;
    }
    sum += 0.5 * (prev_val + sample(hi_nm)) * (hi_nm - prev_nm);
    return sum;
}

SpectralDistribution& SpectralDistribution::operator+=(const SpectralDistribution& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

SpectralDistribution& SpectralDistribution::operator*=(double scale) {
    if (!std::isfinite(scale) || scale < 0.0) throw InvalidArgument("SpectralDistribution: scale must be finite and >= 0");
    for (auto& v : values_) v *= scale;
    return *this;
}

void HModelParams::validate() const {
    if (!(width_left_nm > 0.0) || !(width_right_nm > 0.0))
        throw InvalidArgument("HModelParams: spectral half widths must be positive");
    if (!(k1 >= 0.0)) throw InvalidArgument("HModelParams: k1 must be >= 0");
    if (!(k2 >= 1.0)) throw InvalidArgument("HModelParams: k2 must be >= 1");
    if (!std::isfinite(peak_nm)) throw InvalidArgument("HModelParams: peak wavelength must be finite");
}

double h_model_density(const HModelParams& p, double wavelength_nm) {
    const double width = wavelength_nm < p.peak_nm ? p.width_left_nm : p.width_right_nm;
    const double offset = wavelength_nm - p.peak_nm;
    const double g = std::exp(-(offset * offset) / (width * width));
    return (g + p.k1 * std::pow(g, p.k2)) / (1.0 + p.k1);
}

SpectralDistribution h_model_spd(const HModelParams& p) {
    p.validate();
    auto spd = SpectralDistribution::from_function([&p](double nm) { return h_model_density(p, nm); });
    // A peak between grid points would otherwise leave the sampled maximum below 1.
    const double top = spd.peak();
    if (top > 0.0) spd *= 1.0 / top;
    return spd;
}

std::array<HModelParams, 4> default_led_channels() {
    return {{{632.5, 23.84, 14.74, 2.0, 6.0},
             {600.0, 19.66, 14.97, 2.0, 5.0},
             {517.7, 29.38, 45.21, 2.0, 3.0},
             {453.0, 18.99, 25.5, 2.0, 5.0}}};
}

SpectralDistribution scale_to_power(const SpectralDistribution& spd, double optical_watts) {
    if (!(optical_watts >= 0.0)) throw InvalidArgument("scale_to_power: target power must be >= 0");
    const double current = spd.integral();
    if (!(current > 0.0)) throw InvalidArgument("scale_to_power: spectrum has zero power");
    return spd * (optical_watts / current);
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("VLCSIM_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return VLCSIM_DEFAULT_DATA_DIR;
}

CieTables CieTables::load(const std::filesystem::path& dir) {
    CieTables t;

    const auto cmf_path = dir / "cie_cmf_1931.csv";
    const auto cmf = detail::read_numeric_csv(cmf_path);
    if (cmf.header != std::vector<std::string>{"wavelength_nm", "xbar", "ybar", "zbar"})
        throw DataError(cmf_path.string() + ": header must be wavelength_nm,xbar,ybar,zbar");
    if (cmf.rows.size() != grid::size)
        throw DataError(cmf_path.string() + ": expected " + std::to_string(grid::size) + " rows (380-780 nm, 1 nm)");
    for (std::size_t i = 0; i < grid::size; ++i) {
        const auto& row = cmf.rows[i];
        if (row[0] != grid::wavelength(i))
            throw DataError(cmf_path.string() + ": row " + std::to_string(i + 1) + " is not at " +
                            std::to_string(grid::wavelength(i)) + " nm");
        if (row[1] < 0.0 || row[2] < 0.0 || row[3] < 0.0)
            throw DataError(cmf_path.string() + ": negative colour matching value");
        t.xbar_.push_back(row[1]);
        t.ybar_.push_back(row[2]);
        t.zbar_.push_back(row[3]);
    }

    const auto tcs_path = dir / "tcs_reflectance.csv";
    const auto tcs = detail::read_numeric_csv(tcs_path);
    if (tcs.header.size() != sample_count + 1 || tcs.header[0] != "wavelength_nm")
        throw DataError(tcs_path.string() + ": header must be wavelength_nm,r1..r14");
    std::vector<double> nm;
    for (const auto& row : tcs.rows) {
        if (!nm.empty() && row[0] <= nm.back()) throw DataError(tcs_path.string() + ": wavelengths must ascend");
        nm.push_back(row[0]);
    }
    if (nm.empty() || nm.front() > grid::first_nm || nm.back() < grid::last_nm)
        throw DataError(tcs_path.string() + ": table must cover 380-780 nm");
    for (std::size_t s = 0; s < sample_count; ++s) {
        std::vector<double> r;
        r.reserve(tcs.rows.size());
        for (const auto& row : tcs.rows) {
            if (row[s + 1] < 0.0 || row[s + 1] > 1.0)
                throw DataError(tcs_path.string() + ": reflectance outside [0, 1]");
            r.push_back(row[s + 1]);
        }
        t.samples_[s] = resample_linear(nm, r);
    }

    const auto steps = static_cast<std::size_t>((planck_max_kelvin - planck_min_kelvin) / locus_step_kelvin) + 1;
    t.locus_.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i)
        t.locus_.push_back(locus_point(planck_min_kelvin + static_cast<double>(i) * locus_step_kelvin, t));
    return t;
}

const CieTables& CieTables::standard() {
    static const CieTables tables = load(default_data_dir());
    return tables;
}

double luminous_flux(const SpectralDistribution& spd, const CieTables& tables) {
    return max_luminous_efficacy * dot(spd.values(), tables.ybar()) * grid::step_nm;
}

double illuminance(double flux_lm, double area_m2) {
    if (!(area_m2 > 0.0)) throw InvalidArgument("illuminance: area must be positive");
    return flux_lm / area_m2;
}

TristimulusXYZ tristimulus(const SpectralDistribution& spd, const CieTables& tables) {
    return {dot(spd.values(), tables.xbar()) * grid::step_nm, dot(spd.values(), tables.ybar()) * grid::step_nm,
            dot(spd.values(), tables.zbar()) * grid::step_nm};
}

Chromaticity chromaticity(const TristimulusXYZ& xyz) {
    const double sum = xyz.X + xyz.Y + xyz.Z;
    if (!(sum > 0.0)) throw UndefinedChromaticityError("chromaticity: X + Y + Z must be positive");
    return {xyz.X / sum, xyz.Y / sum};
}

UcsUv ucs_uv(const Chromaticity& xy) {
    const double denom = -2.0 * xy.x + 12.0 * xy.y + 3.0;
    return {4.0 * xy.x / denom, 6.0 * xy.y / denom};
}

UcsUv ucs_uv(const TristimulusXYZ& xyz) { return ucs_uv(chromaticity(xyz)); }

SpectralDistribution planckian_spd(double kelvin) {
    if (!(kelvin >= planck_min_kelvin && kelvin <= planck_max_kelvin))
        throw InvalidArgument("planckian_spd: temperature outside 1000-20000 K");
    auto spd = SpectralDistribution::from_function([kelvin](double nm) { return planck_density(kelvin, nm); });
    return spd * (1.0 / spd.peak());
}

CctResult cct_from_uv(const UcsUv& uv, const CieTables& tables) {
    const auto& locus = tables.coarse_locus();
    std::size_t best = 0;
    double best_d = uv_distance(uv, locus[0]);
    for (std::size_t i = 1; i < locus.size(); ++i) {
        const double d = uv_distance(uv, locus[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }

    const double step = CieTables::locus_step_kelvin;
    double lo = std::max(planck_min_kelvin, planck_min_kelvin + step * (static_cast<double>(best) - 1.0));
    double hi = std::min(planck_max_kelvin, planck_min_kelvin + step * (static_cast<double>(best) + 1.0));
    auto distance_at = [&](double t) { return uv_distance(uv, locus_point(t, tables)); };
    while (hi - lo > 0.1) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (distance_at(m1) <= distance_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double t = 0.5 * (lo + hi);
    const UcsUv on_locus = locus_point(t, tables);
    const double d = uv_distance(uv, on_locus);
    const double duv = uv.v >= on_locus.v ? d : -d;
    if (d > max_meaningful_duv)
        throw NoMeaningfulCctError("cct: chromaticity is " + std::to_string(d) + " from the Planckian locus", duv);
    return {t, duv};
}

CctResult cct(const SpectralDistribution& spd, const CieTables& tables) {
    return cct_from_uv(ucs_uv(tristimulus(spd, tables)), tables);
}

namespace {

struct SampleColor {
    double Y = 0.0;
    UcsUv uv;
};

// Tristimulus of each test sample with the source normalized to Y = 100.
struct Rendering {
    UcsUv white;
    std::array<SampleColor, CieTables::sample_count> samples;
};

Rendering render(const SpectralDistribution& spd, const CieTables& tables) {
    const auto& s = spd.values();
    const double k = 100.0 / dot(s, tables.ybar());
    Rendering r;
    r.white = ucs_uv(tristimulus(spd, tables));
    std::vector<double> reflected(grid::size);
    for (std::size_t i = 0; i < CieTables::sample_count; ++i) {
        const auto& refl = tables.sample(i);
        for (std::size_t j = 0; j < grid::size; ++j) reflected[j] = s[j] * refl[j];
        const TristimulusXYZ xyz{k * dot(reflected, tables.xbar()), k * dot(reflected, tables.ybar()),
                                 k * dot(reflected, tables.zbar())};
        r.samples[i] = {xyz.Y, ucs_uv(xyz)};
    }
    return r;
}

double adapt_c(const UcsUv& p) { return (4.0 - p.u - 10.0 * p.v) / p.v; }
double adapt_d(const UcsUv& p) { return (1.708 * p.v + 0.404 - 1.481 * p.u) / p.v; }

}  // namespace

CriReport cri(const SpectralDistribution& spd, const CieTables& tables) {
    const CctResult temperature = cct(spd, tables);
    const SpectralDistribution reference = planckian_spd(temperature.kelvin);

    const Rendering test = render(spd, tables);
    const Rendering ref = render(reference, tables);

    const double ct = adapt_c(test.white), dt = adapt_d(test.white);
    const double cr = adapt_c(ref.white), dr = adapt_d(ref.white);

    CriReport report;
    report.reference_cct = temperature.kelvin;
    report.duv = temperature.duv;
    for (std::size_t i = 0; i < CieTables::sample_count; ++i) {
        const UcsUv& sample_uv = test.samples[i].uv;
        const double ci = cr / ct * adapt_c(sample_uv);
        const double di = dr / dt * adapt_d(sample_uv);
        const double denom = 16.518 + 1.481 * ci - di;
        const UcsUv adapted{(10.872 + 0.404 * ci - 4.0 * di) / denom, 5.520 / denom};

        const double w_test = 25.0 * std::cbrt(test.samples[i].Y) - 17.0;
        const double w_ref = 25.0 * std::cbrt(ref.samples[i].Y) - 17.0;
        const double du = 13.0 * w_test * (adapted.u - ref.white.u) - 13.0 * w_ref * (ref.samples[i].uv.u - ref.white.u);
        const double dv = 13.0 * w_test * (adapted.v - ref.white.v) - 13.0 * w_ref * (ref.samples[i].uv.v - ref.white.v);
        const double dw = w_test - w_ref;
        report.special[i] = 100.0 - 4.6 * std::sqrt(du * du + dv * dv + dw * dw);
    }
    report.general = std::accumulate(report.special.begin(), report.special.begin() + 8, 0.0) / 8.0;
    return report;
}

}  // namespace vlcsim
