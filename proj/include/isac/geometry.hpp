// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "isac/errors.hpp"

namespace isac {

template <typename Scalar>
using Point3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Velocity3T = Eigen::Matrix<Scalar, 3, 1>;

using Point3 = Point3T<double>;
using Velocity3 = Velocity3T<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
    return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
    return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Wraps an azimuth into (-pi, pi].
template <typename Scalar>
Scalar wrap_azimuth(Scalar phi) {
    constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    Scalar w = std::remainder(phi, two_pi);
    if (w <= -std::numbers::pi_v<Scalar>)
        w += two_pi;
    return w;
}

/// Folds an arbitrary zenith value into [0, pi] by reflection through the poles.
template <typename Scalar>
Scalar wrap_zenith(Scalar theta) {
    constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    Scalar w = std::fmod(theta, two_pi);
    if (w < 0)
        w += two_pi;
    if (w > std::numbers::pi_v<Scalar>)
        w = two_pi - w;
    return w;
}

/// Zenith in [0, pi] and azimuth in (-pi, pi], radians.
template <typename Scalar>
struct SphericalAnglesT {
    Scalar zenith{std::numbers::pi_v<Scalar> / 2};
    Scalar azimuth{0};

    static SphericalAnglesT wrapped(Scalar zenith, Scalar azimuth) {
        return {wrap_zenith(zenith), wrap_azimuth(azimuth)};
    }

    bool operator==(const SphericalAnglesT&) const = default;
};

using SphericalAngles = SphericalAnglesT<double>;

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance_3d(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return (a - b).norm();
}

// A purely vertical leg has undefined azimuth; it is reported as 0.
template <typename DerivedA, typename DerivedB>
SphericalAnglesT<typename DerivedA::Scalar> los_angles(const Eigen::MatrixBase<DerivedA>& from,
                                                       const Eigen::MatrixBase<DerivedB>& to) {
    using Scalar = typename DerivedA::Scalar;
    const Point3T<Scalar> d = to - from;
    const Scalar dist = d.norm();
    if (!(dist > Scalar(0)))
        throw DegenerateGeometry("los_angles: coincident points");
    const Scalar cos_zenith = std::clamp(d.z() / dist, Scalar(-1), Scalar(1));
    const Scalar azimuth = (d.x() == Scalar(0) && d.y() == Scalar(0)) ? Scalar(0) : std::atan2(d.y(), d.x());
    return {std::acos(cos_zenith), wrap_azimuth(azimuth)};
}

template <typename Scalar>
Point3T<Scalar> spherical_unit_vector(const SphericalAnglesT<Scalar>& angles) {
    const Scalar st = std::sin(angles.zenith);
    return {st * std::cos(angles.azimuth), st * std::sin(angles.azimuth), std::cos(angles.zenith)};
}

/// Propagation delay of the two-leg path tx -> target -> rx in seconds.
template <typename DerivedA, typename DerivedB, typename DerivedC>
typename DerivedA::Scalar los_cascade_delay(const Eigen::MatrixBase<DerivedA>& tx,
                                            const Eigen::MatrixBase<DerivedB>& target,
                                            const Eigen::MatrixBase<DerivedC>& rx) {
    using Scalar = typename DerivedA::Scalar;
    const Scalar d_in = distance_3d(tx, target);
    const Scalar d_out = distance_3d(target, rx);
    if (!(d_in > Scalar(0)) || !(d_out > Scalar(0)))
        throw DegenerateGeometry("los_cascade_delay: zero-length leg");
    return (d_in + d_out) / Scalar(kSpeedOfLight);
}

} // namespace isac
