/*
 * Copyright 2026 The memrouter Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

#include "memrouter/error.hpp"

namespace memrouter {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Norms at or below this are treated as degenerate embeddings.
inline constexpr double kZeroNorm = 1e-12;

/// An L2-normalized embedding. Only obtainable through normalize(), so every
/// instance satisfies |v| == 1 within float rounding.
template <typename Scalar>
class BasicUnitVector {
public:
    using VectorType = Vector<Scalar>;

    BasicUnitVector() = default;

    const VectorType& values() const noexcept { return values_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.size()); }
    Scalar operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    friend bool operator==(const BasicUnitVector& a, const BasicUnitVector& b) {
        return a.values_.size() == b.values_.size() && a.values_ == b.values_;
    }

private:
    explicit BasicUnitVector(VectorType v) : values_(std::move(v)) {}

    template <typename Derived>
    friend BasicUnitVector<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& v);

    VectorType values_;
};

using UnitVector = BasicUnitVector<float>;

/// Scales `v` to unit length. Throws ZeroVector when |v| <= 1e-12.
template <typename Derived>
BasicUnitVector<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    // Accumulate in double so short float vectors normalize to within 1e-7.
    const double norm = v.template cast<double>().norm();
    if (!(norm > kZeroNorm)) {
        throw Error(Errc::ZeroVector, "cannot normalize a vector with norm " + std::to_string(norm));
    }
    Vector<double> scaled = v.template cast<double>() / norm;
    return BasicUnitVector<Scalar>(scaled.template cast<Scalar>());
}

inline UnitVector normalize(std::initializer_list<float> values) {
    Vector<float> v(static_cast<Eigen::Index>(values.size()));
    std::copy(values.begin(), values.end(), v.data());
    return normalize(v);
}

inline void require_same_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        throw Error(Errc::DimensionMismatch, std::string(what) + ": expected dim " +
                                                 std::to_string(expected) + ", got " +
                                                 std::to_string(actual));
    }
}

template <typename Scalar>
Scalar clamp_similarity(Scalar s) {
    return std::clamp(s, Scalar(-1), Scalar(1));
}

/// Dot product of two unit vectors, clamped to [-1, 1].
template <typename Scalar>
Scalar cosine(const BasicUnitVector<Scalar>& a, const BasicUnitVector<Scalar>& b) {
    require_same_dim(a.dim(), b.dim(), "cosine");
    return clamp_similarity(a.values().dot(b.values()));
}

} // namespace memrouter
