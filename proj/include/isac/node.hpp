// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isac/antenna.hpp"
#include "isac/geometry.hpp"

namespace isac {

/// A radio node: array reference position, velocity and antenna array.
struct Node {
    Point3 position{Point3::Zero()};
    Velocity3 velocity{Velocity3::Zero()};
    ArrayGeometry array{};

    bool operator==(const Node& other) const {
        return position == other.position && velocity == other.velocity && array == other.array;
    }
};

} // namespace isac
