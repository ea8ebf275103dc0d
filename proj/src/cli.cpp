#include "vlcsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlcsim/errors.hpp"
#include "vlcsim/experiments.hpp"

namespace vlcsim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Output helpers

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text_ += ',';
            text_ += csv_field(fields[i]);
        }
        text_ += "\r\n";
    }
    const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Writer {
    const ExperimentConfig& cfg;
    std::string experiment;
    std::string hash;
    RunResult result;

    std::filesystem::path path_for(const std::string& scheme, const std::string& ext) const {
        const std::string stem = scheme.empty() ? experiment + "_" + hash : experiment + "_" + scheme + "_" + hash;
        return std::filesystem::path(cfg.out_dir) / (stem + ext);
    }
    void csv(const std::string& scheme, const CsvBuilder& b) {
        const auto p = path_for(scheme, ".csv");
        write_file_atomic(p, b.str());
        result.files.push_back(p);
    }
    void summary(json j) {
        j["experiment"] = experiment;
        j["config_hash"] = hash;
        j["seed"] = cfg.seed;
        const auto p = path_for("", ".json");
        write_file_atomic(p, j.dump(2) + "\n");
        result.files.push_back(p);
    }
};

// ---------------------------------------------------------------------------
// ber

double reference_ber(const ExperimentConfig& cfg, const std::string& scheme, double snr) {
    if (scheme == "qct") return analytic_pam_ber(cfg.pam_order, snr);
    if (scheme == "dco-ofdm") return analytic_qam_ber(cfg.qam_order, snr);
    return analytic_orthogonal_ber(4, snr);
}

std::string reference_name(const ExperimentConfig& cfg, const std::string& scheme) {
    if (scheme == "qct") return "analytic-pam" + std::to_string(cfg.pam_order);
    if (scheme == "dco-ofdm") return "analytic-qam" + std::to_string(cfg.qam_order);
    return "analytic-orthogonal4";
}

const std::vector<std::string> ber_header{"scheme", "snr_db", "ber", "bits", "errors", "reliable", "std_error",
                                          "reference_ber"};

void run_ber(Writer& w, std::ostream& out) {
    const auto& cfg = w.cfg;
    const auto h = cfg.channel();
    std::vector<BerCurve> curves;
    for (const auto& scheme : cfg.ber_schemes) {
        std::unique_ptr<LinkSimulator> link;
        if (scheme == "qct") link = make_qct_link(QctModem(cfg.qct()), h);
        if (scheme == "dco-ofdm") link = make_ofdm_link(DcoOfdmModem(cfg.ofdm()), h);
        if (scheme == "csk") link = make_csk_link(CskModem(cfg.csk()), cfg.csk_symbols_per_frame);
        curves.push_back(run_ber_sweep(*link, cfg.snr_db, cfg.stop(), cfg.seed, cfg.threads));
    }

    CsvBuilder all(ber_header);
    CsvBuilder analytic({"scheme", "snr_db", "ber"});
    json j;
    j["channel_taps"] = std::vector<double>(h.taps().begin(), h.taps().end());
    j["curves"] = json::array();
    for (const auto& c : curves) {
        CsvBuilder one(ber_header);
        json jc;
        jc["scheme"] = c.scheme;
        jc["reference"] = reference_name(cfg, c.scheme);
        jc["clipped_fraction"] = c.tx_stats.clipped_fraction();
        jc["points"] = json::array();
        out << "ber " << c.scheme << " (reference " << reference_name(cfg, c.scheme) << ")\n";
        for (const auto& p : c.points) {
            const double ref = reference_ber(cfg, c.scheme, p.snr_db);
            const std::vector<std::string> row{c.scheme, csv_number(p.snr_db), csv_number(p.ber), std::to_string(p.bits),
                                               std::to_string(p.errors), p.reliable ? "true" : "false",
                                               csv_number(p.standard_error(p.ber)), csv_number(ref)};
            one.row(row);
            all.row(row);
            jc["points"].push_back({{"snr_db", p.snr_db},
                                    {"ber", p.ber},
                                    {"bits", p.bits},
                                    {"errors", p.errors},
                                    {"reliable", p.reliable},
                                    {"reference_ber", ref}});
            char line[160];
            std::snprintf(line, sizeof line, "  %6.2f dB  ber %.4e  ref %.4e  errors %llu / %llu%s\n", p.snr_db, p.ber,
                          ref, static_cast<unsigned long long>(p.errors), static_cast<unsigned long long>(p.bits),
                          p.reliable ? "" : "  (unreliable)");
            out << line;
        }
        w.csv(c.scheme, one);
        j["curves"].push_back(jc);
    }
    for (const auto& c : curves) {
        const std::string name = reference_name(cfg, c.scheme);
        for (const double snr : cfg.snr_db) {
            const double ref = reference_ber(cfg, c.scheme, snr);
            analytic.row({name, csv_number(snr), csv_number(ref)});
            all.row({name, csv_number(snr), csv_number(ref), "", "", "", "", csv_number(ref)});
        }
    }
    w.csv("analytic", analytic);
    w.csv("all", all);

    const BerCurve* qct = nullptr;
    const BerCurve* csk = nullptr;
    for (const auto& c : curves) {
        if (c.scheme == "qct") qct = &c;
        if (c.scheme == "csk") csk = &c;
    }
    if (qct && csk) {
        const double x = crossover_snr_db(*qct, *csk);
        j["crossover_qct_csk_db"] = number_or_null(x);
        out << "crossover (QCT stops beating CSK): " << (std::isfinite(x) ? csv_number(x) + " dB" : "none in sweep")
            << "\n";
    }
    w.summary(j);
}

// ---------------------------------------------------------------------------
// papr

void run_papr(Writer& w, std::ostream& out) {
    const auto& cfg = w.cfg;
    const auto thresholds = cfg.papr_thresholds();
    const auto report = run_papr_ccdf(DcoOfdmModem(cfg.ofdm()), QctModem(cfg.qct()), cfg.papr_frames, thresholds,
                                      cfg.seed, cfg.threads);
    CsvBuilder all({"threshold_db", "dco-ofdm", "qct-stream", "qct-sum"});
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        all.row({csv_number(thresholds[i]), csv_number(report.dco_ofdm.ccdf[i]), csv_number(report.qct_stream.ccdf[i]),
                 csv_number(report.qct_sum.ccdf[i])});

    json j;
    j["frames"] = cfg.papr_frames;
    j["n"] = cfg.n;
    j["curves"] = json::array();
    for (const PaprCcdf* c : {&report.dco_ofdm, &report.qct_stream, &report.qct_sum}) {
        CsvBuilder one({"threshold_db", "ccdf"});
        for (std::size_t i = 0; i < c->thresholds_db.size(); ++i)
            one.row({csv_number(c->thresholds_db[i]), csv_number(c->ccdf[i])});
        w.csv(c->scheme, one);
        double mean = 0.0;
        for (const double s : c->samples_db) mean += s;
        mean /= static_cast<double>(c->samples_db.size());
        const double at_1e2 = ccdf_crossing_db(*c, 1e-2);
        const double at_1e3 = ccdf_crossing_db(*c, 1e-3);
        j["curves"].push_back({{"scheme", c->scheme},
                               {"samples", c->samples_db.size()},
                               {"mean_papr_db", mean},
                               {"threshold_at_ccdf_1e-2_db", number_or_null(at_1e2)},
                               {"threshold_at_ccdf_1e-3_db", number_or_null(at_1e3)}});
        out << "papr " << c->scheme << ": mean " << csv_number(mean) << " dB, CCDF <= 1e-3 from "
            << csv_number(at_1e3) << " dB\n";
    }
    w.csv("all", all);
    w.summary(j);
}

// ---------------------------------------------------------------------------
// roommap

json heatmap_stats(const HeatMap& m) { return {{"min", m.min}, {"max", m.max}, {"mean", m.mean}}; }

void run_roommap(Writer& w, std::ostream& out) {
    const auto& cfg = w.cfg;
    const auto scenario = cfg.scenario();
    json j;
    j["grid"] = {{"step_m", cfg.room.grid_step}};
    std::vector<RoomMaps> maps;
    for (const LightScheme s : {LightScheme::qct, LightScheme::csk}) {
        maps.push_back(run_room_maps(scenario, s, cfg.threads));
        const auto& m = maps.back();
        CsvBuilder one({"x_m", "y_m", "normalized_lux", "snr_db"});
        for (std::size_t iy = 0; iy < m.lux.ny; ++iy)
            for (std::size_t ix = 0; ix < m.lux.nx; ++ix)
                one.row({csv_number(m.lux.x(ix)), csv_number(m.lux.y(iy)), csv_number(m.lux.at(ix, iy)),
                         csv_number(m.snr_db.at(ix, iy))});
        w.csv(to_string(s), one);
        j[to_string(s)] = {{"normalized_lux", heatmap_stats(m.lux)},
                           {"snr_db", heatmap_stats(m.snr_db)},
                           {"snr_spread_db", m.snr_db.max - m.snr_db.min}};
        out << "roommap " << to_string(s) << ": mean lux " << csv_number(m.lux.mean) << " (min "
            << csv_number(m.lux.min) << ", max " << csv_number(m.lux.max) << "), SNR mean " << csv_number(m.snr_db.mean)
            << " dB, min " << csv_number(m.snr_db.min) << " dB, max " << csv_number(m.snr_db.max) << " dB, spread "
            << csv_number(m.snr_db.max - m.snr_db.min) << " dB\n";
    }
    const double ratio = maps[0].lux.mean / maps[1].lux.mean;
    const double gap = maps[0].snr_db.mean - maps[1].snr_db.mean;
    j["reference_peak_lux"] = maps[0].reference_peak_lux;
    j["lux_ratio_qct_over_csk"] = ratio;
    j["snr_gap_qct_minus_csk_db"] = gap;
    out << "lux ratio QCT/CSK " << csv_number(ratio) << ", average SNR gap QCT-CSK " << csv_number(gap)
        << " dB, unmodulated peak " << csv_number(maps[0].reference_peak_lux) << " lx\n";
    w.summary(j);
}

// ---------------------------------------------------------------------------
// illum

void run_illum(Writer& w, std::ostream& out) {
    const auto& cfg = w.cfg;
    const auto report =
        run_illumination_report(cfg.scenario(), QctModem(cfg.qct()), cfg.illum_frames, cfg.seed, cfg.threads);
    std::vector<std::string> header{"scheme", "cct_k", "duv", "cri_ra"};
    for (int i = 1; i <= 14; ++i) header.push_back("r" + std::to_string(i));
    for (const char* h : {"mean_normalized_lux", "optical_fraction", "measured_optical_fraction", "clipped_fraction",
                          "note"})
        header.emplace_back(h);
    CsvBuilder all(header);
    json j;
    j["schemes"] = json::array();
    for (const auto& s : report.schemes) {
        std::vector<std::string> row{to_string(s.scheme), s.cct_valid ? csv_number(s.cct_kelvin) : "",
                                     csv_number(s.duv), s.cct_valid ? csv_number(s.cri_general) : ""};
        for (const double r : s.cri_special) row.push_back(s.cct_valid ? csv_number(r) : "");
        row.push_back(csv_number(s.mean_normalized_lux));
        row.push_back(csv_number(s.optical_fraction));
        row.push_back(csv_number(s.measured_optical_fraction));
        row.push_back(csv_number(s.clipped_fraction));
        row.push_back(s.note);
        CsvBuilder one(header);
        one.row(row);
        all.row(row);
        w.csv(to_string(s.scheme), one);
        j["schemes"].push_back({{"scheme", to_string(s.scheme)},
                                {"cct_valid", s.cct_valid},
                                {"cct_k", number_or_null(s.cct_valid ? s.cct_kelvin : NAN)},
                                {"duv", s.duv},
                                {"cri_ra", number_or_null(s.cct_valid ? s.cri_general : NAN)},
                                {"mean_normalized_lux", s.mean_normalized_lux},
                                {"optical_fraction", s.optical_fraction},
                                {"measured_optical_fraction", s.measured_optical_fraction},
                                {"clipped_fraction", s.clipped_fraction},
                                {"note", s.note}});
        out << "illum " << to_string(s.scheme) << ": ";
        if (s.cct_valid)
            out << "CCT " << csv_number(s.cct_kelvin) << " K (Duv " << csv_number(s.duv) << "), CRI "
                << csv_number(s.cri_general);
        else
            out << "no meaningful CCT (" << s.note << ")";
        out << ", mean normalized lux " << csv_number(s.mean_normalized_lux) << ", clipped fraction "
            << csv_number(s.clipped_fraction) << "\n";
    }
    j["lux_ratio_qct_over_csk"] = report.lux_ratio;
    j["csk_normalization"] = "equal average electrical power";
    out << "lux ratio QCT/CSK " << csv_number(report.lux_ratio) << "\n";
    w.csv("all", all);
    w.summary(j);
}

std::string format_check(const ValidationCheck& c) {
    return "check=" + c.name + " status=" + (c.passed ? "PASS" : "FAIL") + " detail=\"" + c.detail + "\"";
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& experiment, std::ostream& out) {
    Writer w{cfg, experiment, cfg.hash(), {}};
    if (experiment == "ber")
        run_ber(w, out);
    else if (experiment == "papr")
        run_papr(w, out);
    else if (experiment == "roommap")
        run_roommap(w, out);
    else if (experiment == "illum")
        run_illum(w, out);
    else
        throw InvalidArgument("unknown experiment '" + experiment + "'");
    for (const auto& f : w.result.files) out << "wrote " << f.string() << "\n";
    return w.result;
}

// ---------------------------------------------------------------------------
// Validation suite

namespace {

template <typename Fn>
ValidationCheck guarded(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<double> random_vector(std::size_t n, RngStream& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.gaussian();
    return v;
}

std::uint64_t loopback_errors(const LinkSimulator& link, std::size_t frames) {
    std::uint64_t errors = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        auto rng = RngStream::substream(7, 0, f);
        FrameStats st;
        errors += link.run_frame(0.0, rng, st);
    }
    return errors;
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& options) {
    std::vector<ValidationCheck> checks;
    RngStream rng(20240601);

    std::optional<CieTables> tables;
    const auto dir = options.data_dir.value_or(default_data_dir());
    checks.push_back(guarded("cie-data", [&]() -> ValidationCheck {
        tables = CieTables::load(dir);
        return {"cie-data", true, "loaded tables from " + dir.string()};
    }));

    checks.push_back(guarded("dft-roundtrip", [&]() -> ValidationCheck {
        double worst = 0.0;
        for (const std::size_t n : {4, 16, 64, 512}) {
            const auto x = random_vector(n, rng);
            const auto back = idft(dft(x));
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - Complex(x[i], 0.0)));
        }
        return {"dft-roundtrip", worst < 1e-12, "max error " + sci(worst)};
    }));

    checks.push_back(guarded("circulant-dense", [&]() -> ValidationCheck {
        const ChannelImpulseResponse h(random_vector(5, rng));
        const auto x = random_vector(32, rng);
        const auto fast = circulant_apply(h, x);
        const auto matched = circulant_matched_apply(h, x);
        const Eigen::MatrixXd c = circulant_matrix(h, 32);
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 32);
        const Eigen::VectorXd dense = c * xv;
        const Eigen::VectorXd dense_t = c.transpose() * xv;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < 32; ++i)
            worst = std::max({worst, std::abs(fast[static_cast<std::size_t>(i)] - dense[i]),
                              std::abs(matched[static_cast<std::size_t>(i)] - dense_t[i])});
        return {"circulant-dense", worst < 1e-10, "max error " + sci(worst)};
    }));

    checks.push_back(guarded("cp-equivalence", [&]() -> ValidationCheck {
        const ChannelImpulseResponse h({1.0, 0.5, 0.25});
        const auto x = random_vector(64, rng);
        const auto y = remove_cp(transmit(add_cp(x, 4), h, 4), 4);
        const auto ref = circulant_apply(h, x);
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - ref[i]));
        return {"cp-equivalence", worst < 1e-12, "max error " + sci(worst)};
    }));

    checks.push_back(guarded("qct-diagonalization", [&]() -> ValidationCheck {
        double worst = 0.0;
        for (const std::size_t n : {4, 64, 512}) {
            auto family = build_qct_family(n);
            if (options.perturb_qct != 0.0) family = family.perturbed(0, options.perturb_qct);
            const std::size_t trials = n == 512 ? 3 : 20;
            for (std::size_t t = 0; t < trials; ++t) {
                const std::size_t taps = 1 + static_cast<std::size_t>(rng.engine()() % std::min<std::size_t>(8, n));
                const ChannelImpulseResponse h(random_vector(taps, rng));
                worst = std::max(worst, check_diagonalization(family, h).worst());
            }
        }
        return {"qct-diagonalization", worst < 1e-9, "worst residual " + sci(worst)};
    }));

    checks.push_back(guarded("qct-loopback", [&]() -> ValidationCheck {
        QctConfig cfg;
        auto family = build_qct_family(cfg.n);
        if (options.perturb_qct != 0.0) family = family.perturbed(0, options.perturb_qct);
        const auto link = make_qct_link(QctModem(cfg, family), ChannelImpulseResponse({1.0, 0.5, 0.25}).normalized());
        const auto errors = loopback_errors(*link, 20);
        return {"qct-loopback", errors == 0,
                std::to_string(errors) + " errors in " + std::to_string(20 * link->bits_per_frame()) + " bits"};
    }));

    checks.push_back(guarded("ofdm-loopback", [&]() -> ValidationCheck {
        const auto link = make_ofdm_link(DcoOfdmModem({}), ChannelImpulseResponse({1.0, 0.5, 0.25}).normalized());
        const auto errors = loopback_errors(*link, 20);
        return {"ofdm-loopback", errors == 0,
                std::to_string(errors) + " errors in " + std::to_string(20 * link->bits_per_frame()) + " bits"};
    }));

    auto photometry_check = [&](const std::string& name, auto&& body) {
        if (!tables) return ValidationCheck{name, false, "CIE tables unavailable"};
        return guarded(name, [&]() -> ValidationCheck { return body(*tables); });
    };

    checks.push_back(photometry_check("csk-loopback", [&](const CieTables&) -> ValidationCheck {
        RoomScenario s;
        s.room = default_room();
        CskConfig cfg;
        cfg.crosstalk = scenario_crosstalk(s);
        const auto link = make_csk_link(CskModem(cfg));
        const auto errors = loopback_errors(*link, 20);
        return {"csk-loopback", errors == 0, std::to_string(errors) + " errors"};
    }));

    checks.push_back(photometry_check("planck-cct-roundtrip", [&](const CieTables& t) -> ValidationCheck {
        double worst = 0.0;
        for (const double k : {2500.0, 3000.0, 3500.0, 4000.0, 5000.0})
            worst = std::max(worst, std::abs(cct(planckian_spd(k), t).kelvin - k) / k);
        return {"planck-cct-roundtrip", worst < 0.005, "max relative error " + sci(worst)};
    }));

    checks.push_back(photometry_check("planck-cri", [&](const CieTables& t) -> ValidationCheck {
        double worst = 0.0;
        for (const double k : {2700.0, 3500.0, 4500.0}) worst = std::max(worst, std::abs(cri(planckian_spd(k), t).general - 100.0));
        return {"planck-cri", worst <= 0.5, "max |Ra - 100| " + sci(worst)};
    }));

    checks.push_back(photometry_check("illuminant-a", [&](const CieTables& t) -> ValidationCheck {
        const auto xy = chromaticity(tristimulus(planckian_spd(2856.0), t));
        const double d = std::hypot(xy.x - 0.4476, xy.y - 0.4074);
        char buf[96];
        std::snprintf(buf, sizeof buf, "x %.5f y %.5f distance %.2e", xy.x, xy.y, d);
        return {"illuminant-a", std::abs(xy.x - 0.4476) <= 0.002 && std::abs(xy.y - 0.4074) <= 0.002, buf};
    }));

    return checks;
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"vlcsim: link-level simulator for multi-colour LED visible light communication"};
    app.name("vlcsim");
    app.require_subcommand(1);
    app.footer(config_reference());

    auto* validate = app.add_subcommand("validate", "run the invariant suite; exit 1 on any failure");
    double perturb = 0.0;
    validate->add_option("--perturb-qct", perturb, "fault injection: nudge one QCT matrix entry")->group("");

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    std::string config_path;
    std::string experiment;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
    run->add_option("config", config_path, "config file")->required();
    run->add_option("experiment", experiment, "ber | papr | roommap | illum")
        ->required()
        ->check(CLI::IsMember({"ber", "papr", "roommap", "illum"}));
    run->add_option("--seed", seed, "RNG seed (overrides run.seed)");
    run->add_option("--out", out_dir, "output directory (overrides run.out_dir)");
    run->add_option("--threads", threads, "worker threads, 0 = all cores (overrides run.threads)");
    run->footer(config_reference());

    auto* dump = app.add_subcommand("defaults", "print a config file holding every default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (dump->parsed()) {
        out << default_config_text();
        return 0;
    }

    if (validate->parsed()) {
        ValidationOptions opts;
        opts.perturb_qct = perturb;
        const auto checks = run_validation_suite(opts);
        std::size_t failed = 0;
        json summary;
        summary["checks"] = json::array();
        for (const auto& c : checks) {
            out << format_check(c) << "\n";
            failed += c.passed ? 0 : 1;
            summary["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        }
        summary["total"] = checks.size();
        summary["failed"] = failed;
        summary["status"] = failed == 0 ? "pass" : "fail";
        out << summary.dump() << "\n";
        return failed == 0 ? 0 : 1;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (threads) cfg.threads = *threads;
    try {
        run_experiment(cfg, experiment, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace vlcsim
