#pragma once

// Complex-to-real conversions for one-bit receivers.
//
// Two stackings are used. Channel estimation treats each channel row as an
// SVM weight vector, so real and imaginary parts sit side by side and the
// pilots carry the 2x2 rotation structure. Detection treats each data column
// as the weight vector, so real and imaginary parts are stacked on top of each
// other and the channel carries the [Re -Im; Im Re] structure.

#include <optional>

#include "onebit/types.hpp"

namespace onebit {

/// Complex matrix whose entries all lie in {+-1 +- j}.
class QuantizedMatrix {
public:
    QuantizedMatrix() = default;

    /// Wraps an existing sign pattern; throws InvalidInput if any component
    /// is not exactly +1 or -1.
    static QuantizedMatrix from_signs(ComplexMatrix signs);

    const ComplexMatrix& values() const noexcept { return values_; }
    Eigen::Index rows() const noexcept { return values_.rows(); }
    Eigen::Index cols() const noexcept { return values_.cols(); }

    ComplexMatrix::ConstColXpr col(Eigen::Index j) const { return values_.col(j); }
    ComplexMatrix::ConstRowXpr row(Eigen::Index i) const { return values_.row(i); }

private:
    friend QuantizedMatrix one_bit_quantize(const ComplexMatrix& r);
    explicit QuantizedMatrix(ComplexMatrix v) : values_(std::move(v)) {}

    ComplexMatrix values_;
};

/// sign(a) = +1 for a >= 0, -1 otherwise.
inline double sign_of(double a) noexcept { return a >= 0.0 ? 1.0 : -1.0; }

/// Applies a pair of one-bit ADCs to every entry: sign(Re) + j sign(Im).
QuantizedMatrix one_bit_quantize(const ComplexMatrix& r);

/// Side-by-side stacking [Re A, Im A].
RealMatrix side_by_side(const ComplexMatrix& a);

/// Vertical stacking [Re A; Im A].
RealMatrix stack_real_imag(const ComplexMatrix& a);

/// Rotation layout [Re A, Im A; -Im A, Re A] used for pilot blocks.
RealMatrix rotation_lift(const ComplexMatrix& a);

/// Block layout [Re A, -Im A; Im A, Re A]; the real representation of
/// left-multiplication by A. Used for detection channels and covariances.
RealMatrix block_lift(const ComplexMatrix& a);

/// Inverse of side_by_side for a matrix with an even column count.
ComplexMatrix from_side_by_side(const RealMatrix& a);

/// Inverse of stack_real_imag for a matrix with an even row count.
ComplexMatrix from_stacked(const RealMatrix& a);

/// Inverse of rotation_lift; reads the top row of blocks.
ComplexMatrix from_rotation_lift(const RealMatrix& a);

struct CeRealForms {
    RealMatrix Y;                   // N x 2T signs, row i is the label vector of antenna i
    RealMatrix X;                   // 2K x 2T, column n is training point n
    std::optional<RealMatrix> H;    // N x 2K, row i is the weight vector of antenna i
};

struct DetRealForms {
    RealMatrix Y;                   // 2N x T signs, column m is the label vector of slot m
    RealMatrix H;                   // 2N x 2K, row i' is training point i'
    std::optional<RealMatrix> X;    // 2K x T
};

/// Real forms for channel estimation from N x T quantized observations and
/// K x T pilots. Throws InvalidInput on any dimension mismatch.
CeRealForms realify_ce(const QuantizedMatrix& y, const ComplexMatrix& pilots,
                       const std::optional<ComplexMatrix>& channel = std::nullopt);

/// Real forms for data detection from N x T quantized observations and an
/// N x K channel. Throws InvalidInput on any dimension mismatch.
DetRealForms realify_det(const QuantizedMatrix& y, const ComplexMatrix& channel,
                         const std::optional<ComplexMatrix>& data = std::nullopt);

} // namespace onebit
