#include "onebit/lifting.hpp"

#include <string>

namespace onebit {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidInput(what);
    }
}

std::string shape(const auto& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

QuantizedMatrix QuantizedMatrix::from_signs(ComplexMatrix signs) {
    for (Eigen::Index j = 0; j < signs.cols(); ++j) {
        for (Eigen::Index i = 0; i < signs.rows(); ++i) {
            const Complex v = signs(i, j);
            require(std::abs(v.real()) == 1.0 && std::abs(v.imag()) == 1.0,
                    "quantized entries must be +-1 +- j");
        }
    }
    return QuantizedMatrix(std::move(signs));
}

QuantizedMatrix one_bit_quantize(const ComplexMatrix& r) {
    ComplexMatrix out(r.rows(), r.cols());
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
            out(i, j) = Complex(sign_of(r(i, j).real()), sign_of(r(i, j).imag()));
        }
    }
    return QuantizedMatrix(std::move(out));
}

RealMatrix side_by_side(const ComplexMatrix& a) {
    RealMatrix out(a.rows(), 2 * a.cols());
    out << a.real(), a.imag();
    return out;
}

RealMatrix stack_real_imag(const ComplexMatrix& a) {
    RealMatrix out(2 * a.rows(), a.cols());
    out << a.real(), a.imag();
    return out;
}

RealMatrix rotation_lift(const ComplexMatrix& a) {
    RealMatrix out(2 * a.rows(), 2 * a.cols());
    out << a.real(), a.imag(), -a.imag(), a.real();
    return out;
}

RealMatrix block_lift(const ComplexMatrix& a) {
    RealMatrix out(2 * a.rows(), 2 * a.cols());
    out << a.real(), -a.imag(), a.imag(), a.real();
    return out;
}

ComplexMatrix from_side_by_side(const RealMatrix& a) {
    require(a.cols() % 2 == 0, "side-by-side form needs an even column count, got " + shape(a));
    const Eigen::Index c = a.cols() / 2;
    ComplexMatrix out(a.rows(), c);
    out.real() = a.leftCols(c);
    out.imag() = a.rightCols(c);
    return out;
}

ComplexMatrix from_stacked(const RealMatrix& a) {
    require(a.rows() % 2 == 0, "stacked form needs an even row count, got " + shape(a));
    const Eigen::Index r = a.rows() / 2;
    ComplexMatrix out(r, a.cols());
    out.real() = a.topRows(r);
    out.imag() = a.bottomRows(r);
    return out;
}

ComplexMatrix from_rotation_lift(const RealMatrix& a) {
    require(a.rows() % 2 == 0 && a.cols() % 2 == 0,
            "rotation form needs even dimensions, got " + shape(a));
    const Eigen::Index r = a.rows() / 2;
    const Eigen::Index c = a.cols() / 2;
    ComplexMatrix out(r, c);
    out.real() = a.topLeftCorner(r, c);
    out.imag() = a.topRightCorner(r, c);
    return out;
}

CeRealForms realify_ce(const QuantizedMatrix& y, const ComplexMatrix& pilots,
                       const std::optional<ComplexMatrix>& channel) {
    require(y.cols() == pilots.cols(),
            "observations " + shape(y) + " and pilots " + shape(pilots) + " disagree on T");
    if (channel) {
        require(channel->rows() == y.rows() && channel->cols() == pilots.rows(),
                "channel " + shape(*channel) + " inconsistent with N=" + std::to_string(y.rows()) +
                    ", K=" + std::to_string(pilots.rows()));
    }
    CeRealForms out{side_by_side(y.values()), rotation_lift(pilots), std::nullopt};
    if (channel) {
        out.H = side_by_side(*channel);
    }
    return out;
}

DetRealForms realify_det(const QuantizedMatrix& y, const ComplexMatrix& channel,
                         const std::optional<ComplexMatrix>& data) {
    require(y.rows() == channel.rows(),
            "observations " + shape(y) + " and channel " + shape(channel) + " disagree on N");
    if (data) {
        require(data->rows() == channel.cols() && data->cols() == y.cols(),
                "data " + shape(*data) + " inconsistent with K=" + std::to_string(channel.cols()) +
                    ", T=" + std::to_string(y.cols()));
    }
    DetRealForms out{stack_real_imag(y.values()), block_lift(channel), std::nullopt};
    if (data) {
        out.X = stack_real_imag(*data);
    }
    return out;
}

} // namespace onebit
