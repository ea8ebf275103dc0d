#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vlcsim {

using Complex = std::complex<double>;
using ComplexSpectrum = std::vector<Complex>;
using RealFrame = std::vector<double>;

/// Finite impulse response of a frequency-selective link. Holds at least one
/// tap and at least one nonzero tap.
class ChannelImpulseResponse {
public:
    explicit ChannelImpulseResponse(std::vector<double> taps);

    static ChannelImpulseResponse identity() { return ChannelImpulseResponse({1.0}); }

    std::span<const double> taps() const noexcept { return taps_; }
    std::size_t length() const noexcept { return taps_.size(); }
    double energy() const noexcept;

    /// Same shape scaled to unit energy.
    ChannelImpulseResponse normalized() const;

    /// H(k) = sum_t h_t exp(-j 2 pi k t / n) for k = 0..n-1.
    ComplexSpectrum frequency_response(std::size_t n) const;

private:
    std::vector<double> taps_;
};

// Unnormalized forward transform X_k = sum_n x_n e^{-j 2 pi k n / N}; the
// inverse carries the 1/N. Any length works (FFTW underneath).
ComplexSpectrum dft(std::span<const Complex> x);
ComplexSpectrum dft(std::span<const double> x);
ComplexSpectrum idft(std::span<const Complex> x);

/// Real part of idft(x); intended for Hermitian-symmetric input.
RealFrame idft_real(std::span<const Complex> x);

/// Places N/2-1 symbols on bins 1..N/2-1 with their conjugates mirrored on
/// N-1..N/2+1; DC and Nyquist bins stay empty.
ComplexSpectrum hermitian_extend(std::span<const Complex> symbols, std::size_t n);

/// C x for the circulant built from zero-padded taps (cyclic convolution).
RealFrame circulant_apply(const ChannelImpulseResponse& h, std::span<const double> x);

/// C^T y: cyclic correlation with the taps.
RealFrame circulant_matched_apply(const ChannelImpulseResponse& h, std::span<const double> y);

/// Dense N x N circulant; used by validation checks.
Eigen::MatrixXd circulant_matrix(const ChannelImpulseResponse& h, std::size_t n);

enum class BasisKind { dc, cosine, sine, nyquist };

struct BasisColumn {
    std::size_t frequency = 0;  // k in 0..N/2
    BasisKind kind = BasisKind::dc;
};

struct TrigBasis {
    Eigen::MatrixXd matrix;             // N x N, orthonormal columns
    std::vector<BasisColumn> columns;   // label per column, sorted by frequency
};

/// Real orthonormal eigenbasis shared by every C^T C with C circulant.
/// Column order: k=0, (cos 1, sin 1), ..., (cos N/2-1, sin N/2-1), k=N/2.
TrigBasis trig_eigenbasis(std::size_t n);

/// Four N x N/4 blocks whose concatenation is orthogonal and whose columns
/// are eigenvectors of C^T C for every circulant C.
class TransformFamily {
public:
    static constexpr std::size_t stream_count = 4;

    TransformFamily(std::size_t n,
                    std::array<Eigen::MatrixXd, stream_count> blocks,
                    std::array<std::vector<BasisColumn>, stream_count> labels);

    std::size_t n() const noexcept { return n_; }
    std::size_t columns_per_stream() const noexcept { return n_ / stream_count; }
    const Eigen::MatrixXd& block(std::size_t stream) const { return blocks_.at(stream); }
    const std::vector<BasisColumn>& labels(std::size_t stream) const { return labels_.at(stream); }

    /// [H_1 H_2 H_3 H_4].
    Eigen::MatrixXd combined() const;

    /// Copy with one entry of one block nudged; fault-injection hook for
    /// the validation suite.
    TransformFamily perturbed(std::size_t stream, double magnitude) const;

private:
    std::size_t n_;
    std::array<Eigen::MatrixXd, stream_count> blocks_;
    std::array<std::vector<BasisColumn>, stream_count> labels_;
};

/// Policies: "round-robin" (default; columns dealt in frequency order, cos
/// before sin) and "contiguous" (stream v takes the v-th quarter of the
/// sorted columns).
TransformFamily build_qct_family(std::size_t n, std::string_view assignment_policy = "round-robin");

struct DiagonalizationReport {
    double orthonormality_error = 0.0;  // max |H_v^T H_v - I|
    double cross_orthogonality = 0.0;   // max |H_v^T H_u|, v != u
    double off_diagonal = 0.0;          // max off-diagonal |Lambda_v|
    double cross_block = 0.0;           // max |H_v^T C^T C H_u|, v != u

    double worst() const noexcept;
};

/// Dense check of every algebraic property the QCT receiver relies on.
DiagonalizationReport check_diagonalization(const TransformFamily& family,
                                            const ChannelImpulseResponse& h);

/// 10 log10(max x^2 / mean x^2).
double papr_db(std::span<const double> x);

}  // namespace vlcsim
