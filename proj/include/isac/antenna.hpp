// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "isac/errors.hpp"
#include "isac/geometry.hpp"

namespace isac {

template <typename Scalar>
using FieldVectorT = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
using FieldVector = FieldVectorT<double>;

enum class PatternKind { isotropic, sector_38901 };

/// Radiation pattern of one dual-polarized element.
///
/// The sector element follows the 3GPP single-element model: 65 deg half-power
/// beamwidth in both planes, 30 dB front-to-back and side-lobe limits and
/// 8 dBi maximum directional gain. Its boresight points along `bearing`
/// (azimuth, radians) in the horizontal plane.
struct ElementPattern {
    PatternKind kind{PatternKind::isotropic};
    double polarization_slant{0.0};
    double bearing{0.0};

    bool operator==(const ElementPattern&) const = default;
};

namespace sector {
inline constexpr double kHalfPowerBeamwidthDeg = 65.0;
inline constexpr double kMaxAttenuationDb = 30.0;
inline constexpr double kMaxGainDbi = 8.0;
} // namespace sector

/// Scalar power gain (linear) of the element in the given direction.
template <typename Scalar>
Scalar element_gain(const ElementPattern& pattern, const SphericalAnglesT<Scalar>& angles) {
    if (pattern.kind == PatternKind::isotropic)
        return Scalar(1);
    const Scalar theta_deg = rad2deg(angles.zenith);
    const Scalar phi_deg = rad2deg(wrap_azimuth(angles.azimuth - Scalar(pattern.bearing)));
    const Scalar bw = Scalar(sector::kHalfPowerBeamwidthDeg);
    const Scalar am = Scalar(sector::kMaxAttenuationDb);
    const Scalar vertical = -std::min(Scalar(12) * std::pow((theta_deg - Scalar(90)) / bw, 2), am);
    const Scalar horizontal = -std::min(Scalar(12) * std::pow(phi_deg / bw, 2), am);
    const Scalar attenuation = -std::min(-(vertical + horizontal), am);
    return std::pow(Scalar(10), (Scalar(sector::kMaxGainDbi) + attenuation) / Scalar(10));
}

/// Theta- and phi-polarized field components of the element.
template <typename Scalar>
FieldVectorT<Scalar> field_response(const ElementPattern& pattern, const SphericalAnglesT<Scalar>& angles) {
    const Scalar amplitude = std::sqrt(element_gain(pattern, angles));
    const Scalar slant = Scalar(pattern.polarization_slant);
    return {std::complex<Scalar>(amplitude * std::cos(slant)), std::complex<Scalar>(amplitude * std::sin(slant))};
}

/// exp(j 2 pi r^T d / lambda) for an element at offset d seen along direction r.
template <typename Derived>
std::complex<typename Derived::Scalar> array_phase(const Eigen::MatrixBase<Derived>& element_offset,
                                                   const SphericalAnglesT<typename Derived::Scalar>& direction,
                                                   typename Derived::Scalar wavelength) {
    using Scalar = typename Derived::Scalar;
    if (!(wavelength > Scalar(0)))
        throw InvalidCarrier("array_phase: wavelength must be positive");
    const Scalar projection = spherical_unit_vector(direction).dot(element_offset.template cast<Scalar>());
    return std::polar(Scalar(1), Scalar(2) * std::numbers::pi_v<Scalar> * projection / wavelength);
}

/// Element locations relative to the array reference point, plus the shared element pattern.
struct ArrayGeometry {
    std::vector<Point3> element_positions{Point3::Zero()};
    ElementPattern pattern{};

    std::size_t count() const { return element_positions.size(); }

    /// `count` elements spaced `spacing` meters apart along `axis`, centered on the reference point.
    static ArrayGeometry uniform_linear(std::size_t count, double spacing, const Point3& axis = Point3::UnitY(),
                                       ElementPattern pattern = {});
    /// rows x cols elements in the plane spanned by `row_axis` and `col_axis`, centered.
    static ArrayGeometry uniform_planar(std::size_t rows, std::size_t cols, double spacing,
                                        const Point3& row_axis = Point3::UnitZ(),
                                        const Point3& col_axis = Point3::UnitY(), ElementPattern pattern = {});

    bool operator==(const ArrayGeometry& other) const {
        return pattern == other.pattern && element_positions == other.element_positions;
    }
};

inline ArrayGeometry ArrayGeometry::uniform_linear(std::size_t count, double spacing, const Point3& axis,
                                                   ElementPattern pattern) {
    if (count == 0)
        throw ConfigError("uniform_linear: element count must be positive");
    ArrayGeometry array;
    array.pattern = pattern;
    array.element_positions.clear();
    const Point3 unit = axis.normalized();
    const double center = 0.5 * static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k)
        array.element_positions.push_back(unit * spacing * (static_cast<double>(k) - center));
    return array;
}

inline ArrayGeometry ArrayGeometry::uniform_planar(std::size_t rows, std::size_t cols, double spacing,
                                                   const Point3& row_axis, const Point3& col_axis,
                                                   ElementPattern pattern) {
    if (rows == 0 || cols == 0)
        throw ConfigError("uniform_planar: element count must be positive");
    ArrayGeometry array;
    array.pattern = pattern;
    array.element_positions.clear();
    const Point3 ru = row_axis.normalized();
    const Point3 cu = col_axis.normalized();
    const double rc = 0.5 * static_cast<double>(rows - 1);
    const double cc = 0.5 * static_cast<double>(cols - 1);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            array.element_positions.push_back(ru * spacing * (static_cast<double>(r) - rc) +
                                              cu * spacing * (static_cast<double>(c) - cc));
    return array;
}

} // namespace isac
