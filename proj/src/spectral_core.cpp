#include "vlcsim/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include <fftw3.h>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

// FFTW plans are created once per (size, direction) under a lock; executing
// a plan on fresh arrays is thread-safe. FFTW_UNALIGNED keeps the codelet
// choice independent of where a vector happens to be allocated, so results
// do not vary from call to call.
fftw_plan plan_for(std::size_t n, bool inverse) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, bool>, fftw_plan> plans;
    const std::lock_guard lock(mutex);
    auto& plan = plans[{n, inverse}];
    if (plan == nullptr) {
        std::vector<Complex> in(n), out(n);
        plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("dft: FFTW could not plan size " + std::to_string(n));
    }
    return plan;
}

ComplexSpectrum transform(std::span<const Complex> x, bool inverse) {
    if (x.empty()) throw InvalidArgument("dft: empty input");
    const fftw_plan plan = plan_for(x.size(), inverse);
    ComplexSpectrum in(x.begin(), x.end());
    ComplexSpectrum out(x.size());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(x.size());
        for (auto& v : out) v *= scale;
    }
    return out;
}

void require_multiple_of_four(std::size_t n, const char* who) {
    if (n == 0 || n % 4 != 0)
        throw InvalidArgument(std::string(who) + ": frame size must be a positive multiple of 4, got " +
                              std::to_string(n));
}

}  // namespace

ChannelImpulseResponse::ChannelImpulseResponse(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw InvalidArgument("channel: at least one tap required");
    for (double t : taps_)
        if (!std::isfinite(t)) throw InvalidArgument("channel: non-finite tap");
    if (std::all_of(taps_.begin(), taps_.end(), [](double t) { return t == 0.0; }))
        throw InvalidArgument("channel: all taps are zero");
}

double ChannelImpulseResponse::energy() const noexcept {
    return std::inner_product(taps_.begin(), taps_.end(), taps_.begin(), 0.0);
}

ChannelImpulseResponse ChannelImpulseResponse::normalized() const {
    const double scale = 1.0 / std::sqrt(energy());
    std::vector<double> out(taps_);
    for (auto& t : out) t *= scale;
    return ChannelImpulseResponse(std::move(out));
}

ComplexSpectrum ChannelImpulseResponse::frequency_response(std::size_t n) const {
    if (taps_.size() > n) throw InvalidArgument("channel: more taps than frame samples");
    std::vector<double> padded(n, 0.0);
    std::copy(taps_.begin(), taps_.end(), padded.begin());
    return dft(std::span<const double>(padded));
}

ComplexSpectrum dft(std::span<const Complex> x) { return transform(x, false); }

ComplexSpectrum dft(std::span<const double> x) {
    ComplexSpectrum c(x.begin(), x.end());
    return transform(c, false);
}

ComplexSpectrum idft(std::span<const Complex> x) { return transform(x, true); }

RealFrame idft_real(std::span<const Complex> x) {
    const auto full = idft(x);
    RealFrame out(full.size());
    std::transform(full.begin(), full.end(), out.begin(), [](Complex c) { return c.real(); });
    return out;
}

ComplexSpectrum hermitian_extend(std::span<const Complex> symbols, std::size_t n) {
    if (n < 4 || n % 2 != 0) throw InvalidArgument("hermitian_extend: frame size must be even and >= 4");
    const std::size_t half = n / 2;
    if (symbols.size() != half - 1)
        throw InvalidArgument("hermitian_extend: expected " + std::to_string(half - 1) + " symbols, got " +
                              std::to_string(symbols.size()));
    ComplexSpectrum x(n, Complex{});
    for (std::size_t k = 1; k < half; ++k) {
        x[k] = symbols[k - 1];
        x[n - k] = std::conj(symbols[k - 1]);
    }
    return x;
}

RealFrame circulant_apply(const ChannelImpulseResponse& h, std::span<const double> x) {
    const std::size_t n = x.size();
    const auto taps = h.taps();
    if (taps.size() > n) throw InvalidArgument("circulant_apply: channel longer than frame");
    RealFrame y(n, 0.0);
    for (std::size_t t = 0; t < taps.size(); ++t) {
        const double g = taps[t];
        if (g == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) y[(i + t) % n] += g * x[i];
    }
    return y;
}

RealFrame circulant_matched_apply(const ChannelImpulseResponse& h, std::span<const double> y) {
    const std::size_t n = y.size();
    const auto taps = h.taps();
    if (taps.size() > n) throw InvalidArgument("circulant_matched_apply: channel longer than frame");
    RealFrame out(n, 0.0);
    for (std::size_t t = 0; t < taps.size(); ++t) {
        const double g = taps[t];
        if (g == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] += g * y[(i + t) % n];
    }
    return out;
}

Eigen::MatrixXd circulant_matrix(const ChannelImpulseResponse& h, std::size_t n) {
    const auto taps = h.taps();
    if (taps.size() > n) throw InvalidArgument("circulant_matrix: channel longer than frame");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t col = 0; col < n; ++col)
        for (std::size_t t = 0; t < taps.size(); ++t)
            c(static_cast<Eigen::Index>((col + t) % n), static_cast<Eigen::Index>(col)) += taps[t];
    return c;
}

TrigBasis trig_eigenbasis(std::size_t n) {
    require_multiple_of_four(n, "trig_eigenbasis");
    const auto rows = static_cast<Eigen::Index>(n);
    TrigBasis basis;
    basis.matrix.resize(rows, rows);
    basis.columns.reserve(n);

    const double nd = static_cast<double>(n);
    const double dc_scale = std::sqrt(1.0 / nd);
    const double ac_scale = std::sqrt(2.0 / nd);
    Eigen::Index col = 0;

    for (Eigen::Index i = 0; i < rows; ++i) basis.matrix(i, col) = dc_scale;
    basis.columns.push_back({0, BasisKind::dc});
    ++col;

    for (std::size_t k = 1; k < n / 2; ++k) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            // Reduce k*i mod N first so the argument stays in [0, 2 pi).
            const auto phase = static_cast<double>((k * static_cast<std::size_t>(i)) % n) / nd;
            basis.matrix(i, col) = ac_scale * std::cos(2.0 * std::numbers::pi * phase);
            basis.matrix(i, col + 1) = ac_scale * std::sin(2.0 * std::numbers::pi * phase);
        }
        basis.columns.push_back({k, BasisKind::cosine});
        basis.columns.push_back({k, BasisKind::sine});
        col += 2;
    }

    for (Eigen::Index i = 0; i < rows; ++i) basis.matrix(i, col) = (i % 2 == 0) ? dc_scale : -dc_scale;
    basis.columns.push_back({n / 2, BasisKind::nyquist});
    return basis;
}

TransformFamily::TransformFamily(std::size_t n,
                                 std::array<Eigen::MatrixXd, stream_count> blocks,
                                 std::array<std::vector<BasisColumn>, stream_count> labels)
    : n_(n), blocks_(std::move(blocks)), labels_(std::move(labels)) {
    require_multiple_of_four(n_, "TransformFamily");
    const auto rows = static_cast<Eigen::Index>(n_);
    const auto cols = static_cast<Eigen::Index>(n_ / stream_count);
    for (std::size_t v = 0; v < stream_count; ++v) {
        if (blocks_[v].rows() != rows || blocks_[v].cols() != cols)
            throw InvalidArgument("TransformFamily: block " + std::to_string(v + 1) + " has wrong shape");
        if (labels_[v].size() != n_ / stream_count)
            throw InvalidArgument("TransformFamily: label count mismatch");
    }
}

Eigen::MatrixXd TransformFamily::combined() const {
    const auto cols = static_cast<Eigen::Index>(columns_per_stream());
    Eigen::MatrixXd all(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t v = 0; v < stream_count; ++v) all.middleCols(static_cast<Eigen::Index>(v) * cols, cols) = blocks_[v];
    return all;
}

TransformFamily TransformFamily::perturbed(std::size_t stream, double magnitude) const {
    auto blocks = blocks_;
    auto& b = blocks.at(stream);
    b(0, 0) += magnitude;
    b(b.rows() - 1, b.cols() - 1) -= magnitude;
    return TransformFamily(n_, std::move(blocks), labels_);
}

TransformFamily build_qct_family(std::size_t n, std::string_view assignment_policy) {
    require_multiple_of_four(n, "build_qct_family");
    const bool round_robin = assignment_policy == "round-robin";
    if (!round_robin && assignment_policy != "contiguous")
        throw InvalidArgument("build_qct_family: unknown assignment policy '" + std::string(assignment_policy) + "'");

    const TrigBasis basis = trig_eigenbasis(n);
    const std::size_t per_stream = n / TransformFamily::stream_count;
    std::array<Eigen::MatrixXd, TransformFamily::stream_count> blocks;
    std::array<std::vector<BasisColumn>, TransformFamily::stream_count> labels;
    for (auto& b : blocks) b.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(per_stream));

    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t stream = round_robin ? c % 4 : c / per_stream;
        const std::size_t slot = round_robin ? c / 4 : c % per_stream;
        blocks[stream].col(static_cast<Eigen::Index>(slot)) = basis.matrix.col(static_cast<Eigen::Index>(c));
        labels[stream].push_back(basis.columns[c]);
    }
    return TransformFamily(n, std::move(blocks), std::move(labels));
}

double DiagonalizationReport::worst() const noexcept {
    return std::max({orthonormality_error, cross_orthogonality, off_diagonal, cross_block});
}

DiagonalizationReport check_diagonalization(const TransformFamily& family, const ChannelImpulseResponse& h) {
    const Eigen::MatrixXd c = circulant_matrix(h, family.n());
    const Eigen::MatrixXd gram = c.transpose() * c;
    DiagonalizationReport report;
    constexpr std::size_t streams = TransformFamily::stream_count;
    for (std::size_t v = 0; v < streams; ++v) {
        const Eigen::MatrixXd& hv = family.block(v);
        const Eigen::MatrixXd weighted = gram * hv;
        for (std::size_t u = 0; u < streams; ++u) {
            const Eigen::MatrixXd& hu = family.block(u);
            const Eigen::MatrixXd inner = hu.transpose() * hv;
            const Eigen::MatrixXd lambda = hu.transpose() * weighted;
            if (u == v) {
                const auto id = Eigen::MatrixXd::Identity(inner.rows(), inner.cols());
                report.orthonormality_error = std::max(report.orthonormality_error, (inner - id).cwiseAbs().maxCoeff());
                Eigen::MatrixXd off = lambda;
                off.diagonal().setZero();
                report.off_diagonal = std::max(report.off_diagonal, off.cwiseAbs().maxCoeff());
            } else {
                report.cross_orthogonality = std::max(report.cross_orthogonality, inner.cwiseAbs().maxCoeff());
                report.cross_block = std::max(report.cross_block, lambda.cwiseAbs().maxCoeff());
            }
        }
    }
    return report;
}

double papr_db(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("papr_db: empty frame");
    double peak = 0.0;
    double sum = 0.0;
    for (double v : x) {
        const double p = v * v;
        peak = std::max(peak, p);
        sum += p;
    }
    if (peak == 0.0) throw InvalidArgument("papr_db: all-zero frame");
    return 10.0 * std::log10(peak / (sum / static_cast<double>(x.size())));
}

}  // namespace vlcsim
