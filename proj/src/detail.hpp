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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace memrouter::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from 53 high bits.
inline double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Indices of the best `k` entries among those accepted by `keep`, ordered by
/// score descending then index ascending (insertion order).
template <typename Keep>
std::vector<Eigen::Index> top_k(const Eigen::VectorXf& scores, std::size_t k, Keep&& keep) {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (keep(i)) idx.push_back(i);
    }
    auto better = [&](Eigen::Index a, Eigen::Index b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    };
    const std::size_t n = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), better);
    idx.resize(n);
    return idx;
}

} // namespace memrouter::detail
