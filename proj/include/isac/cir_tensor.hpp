// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isac/errors.hpp"

namespace isac {

enum class LinkKind : std::uint8_t { communication, sensing };
enum class Component : std::uint8_t { total, shared, non_shared };

/// Complex channel coefficients indexed (rx element, tx element, path, time sample).
///
/// Storage is a flat row-major array: time is the fastest-varying index, rx the
/// slowest. Every path carries its own delay, so no delay binning happens here.
template <typename Scalar>
class CirTensorT {
public:
    using Complex = std::complex<Scalar>;
    using Storage = Eigen::Array<Complex, Eigen::Dynamic, 1>;

    CirTensorT() = default;
    CirTensorT(std::size_t rx, std::size_t tx, std::size_t paths, std::size_t times)
        : dims_{rx, tx, paths, times}, path_delays_(paths, Scalar(0)),
          data_(Storage::Zero(static_cast<Eigen::Index>(rx * tx * paths * times))) {}

    std::size_t rx_count() const { return dims_[0]; }
    std::size_t tx_count() const { return dims_[1]; }
    std::size_t path_count() const { return dims_[2]; }
    std::size_t time_count() const { return dims_[3]; }
    const std::array<std::size_t, 4>& dims() const { return dims_; }
    std::size_t size() const { return static_cast<std::size_t>(data_.size()); }

    std::size_t offset(std::size_t rx, std::size_t tx, std::size_t path, std::size_t time) const {
        return ((rx * dims_[1] + tx) * dims_[2] + path) * dims_[3] + time;
    }
    Complex& operator()(std::size_t rx, std::size_t tx, std::size_t path, std::size_t time) {
        return data_(static_cast<Eigen::Index>(offset(rx, tx, path, time)));
    }
    const Complex& operator()(std::size_t rx, std::size_t tx, std::size_t path, std::size_t time) const {
        return data_(static_cast<Eigen::Index>(offset(rx, tx, path, time)));
    }

    Storage& data() { return data_; }
    const Storage& data() const { return data_; }
    std::vector<Scalar>& path_delays() { return path_delays_; }
    const std::vector<Scalar>& path_delays() const { return path_delays_; }

    LinkKind kind{LinkKind::communication};
    Component component{Component::total};
    std::uint64_t drop_id{0};

    bool same_shape(const CirTensorT& other) const { return dims_ == other.dims_; }

    /// Sum of |h|^2 over all entries divided by the number of time samples.
    Scalar energy_per_snapshot() const {
        if (dims_[3] == 0)
            return Scalar(0);
        return data_.abs2().sum() / static_cast<Scalar>(dims_[3]);
    }

    CirTensorT& operator+=(const CirTensorT& other) {
        require_same_shape(other, "operator+=");
        data_ += other.data_;
        return *this;
    }
    friend CirTensorT operator+(CirTensorT a, const CirTensorT& b) { return a += b; }

    /// Zero tensor with the same shape, delays and tags.
    CirTensorT zeros_like() const {
        CirTensorT out = *this;
        out.data_.setZero();
        return out;
    }

    bool operator==(const CirTensorT& other) const {
        return dims_ == other.dims_ && path_delays_ == other.path_delays_ && (data_ == other.data_).all();
    }

    void require_same_shape(const CirTensorT& other, const char* where) const {
        if (!same_shape(other))
            throw ConfigError(std::string(where) + ": CIR tensor dimension mismatch");
    }

private:
    std::array<std::size_t, 4> dims_{0, 0, 0, 0};
    std::vector<Scalar> path_delays_;
    Storage data_;
};

using CirTensor = CirTensorT<double>;

/// Largest |a - b| / max(|a|, |b|, floor) over all entries.
template <typename Scalar>
Scalar max_relative_error(const CirTensorT<Scalar>& a, const CirTensorT<Scalar>& b, Scalar floor = Scalar(1e-300)) {
    a.require_same_shape(b, "max_relative_error");
    const auto diff = (a.data() - b.data()).abs();
    const auto scale = a.data().abs().max(b.data().abs()).max(floor);
    return a.size() == 0 ? Scalar(0) : (diff / scale).maxCoeff();
}

} // namespace isac
