// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "isac/antenna.hpp"

namespace isac {

template <typename Scalar>
using PolarizationMatrixT = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
using PolarizationMatrix = PolarizationMatrixT<double>;

/// Per-ray polarization coupling: unit co-polar terms, cross-polar terms scaled by 1/sqrt(xpr).
/// Phases are ordered theta-theta, theta-phi, phi-theta, phi-phi. An infinite XPR
/// yields a diagonal matrix.
template <typename Scalar>
PolarizationMatrixT<Scalar> polarization_matrix(const std::array<Scalar, 4>& phases, Scalar xpr_linear) {
    const Scalar cross = std::isinf(xpr_linear) ? Scalar(0) : std::sqrt(Scalar(1) / xpr_linear);
    PolarizationMatrixT<Scalar> m;
    m(0, 0) = std::polar(Scalar(1), phases[0]);
    m(0, 1) = std::polar(cross, phases[1]);
    m(1, 0) = std::polar(cross, phases[2]);
    m(1, 1) = std::polar(Scalar(1), phases[3]);
    return m;
}

/// F_rx^T * middle * F_tx for one propagation path.
template <typename Scalar, typename Middle>
std::complex<Scalar> polarimetric_gain(const FieldVectorT<Scalar>& rx_field, const Eigen::MatrixBase<Middle>& middle,
                                       const FieldVectorT<Scalar>& tx_field) {
    return (rx_field.transpose() * middle * tx_field)(0, 0);
}

} // namespace isac
