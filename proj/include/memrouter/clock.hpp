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

#include <atomic>
#include <chrono>
#include <cstddef>

namespace memrouter {

using Seconds = std::chrono::duration<double>;

/// Seconds since the owning clock's epoch (session start).
struct Timestamp {
    double seconds = 0.0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
    friend Timestamp operator+(Timestamp t, Seconds d) { return {t.seconds + d.count()}; }
    friend Seconds operator-(Timestamp a, Timestamp b) { return Seconds{a.seconds - b.seconds}; }
};

/// Deterministic compute-cost model used under the virtual clock, so that
/// latencies reported in benchmark mode are reproducible bit for bit.
/// Constants approximate a single AVX2 desktop core.
struct CostModel {
    double scan_fixed_ms = 0.004;
    double scan_ns_per_mac = 0.12;
    double embed_fixed_ms = 0.002;
    double embed_ns_per_char = 8.0;

    double scan_ms(std::size_t rows, std::size_t dim) const {
        return scan_fixed_ms + scan_ns_per_mac * 1e-6 * static_cast<double>(rows * dim);
    }
    double embed_ms(std::size_t chars) const {
        return embed_fixed_ms + embed_ns_per_char * 1e-6 * static_cast<double>(chars);
    }
};

/// Time source shared by the router, the latency wrapper and the cache TTL
/// logic.
class Clock {
public:
    virtual ~Clock() = default;

    virtual Timestamp now() const = 0;

    /// An injected delay (simulated network latency). Real clocks sleep;
    /// virtual clocks account for it only in reported latencies, so
    /// concurrent delays overlap.
    virtual void wait(Seconds d) = 0;

    /// A pause between conversation turns. Real clocks sleep; virtual
    /// clocks jump forward.
    virtual void advance(Seconds d) = 0;

    virtual bool is_virtual() const = 0;

    /// Picks the latency to report for a compute step: the measured wall
    /// time on a real clock, the modelled cost on a virtual one.
    double charge(double measured_ms, double modelled_ms) const {
        return is_virtual() ? modelled_ms : measured_ms;
    }

    const CostModel& costs() const noexcept { return costs_; }
    void set_costs(const CostModel& costs) { costs_ = costs; }

private:
    CostModel costs_;
};

class RealClock final : public Clock {
public:
    RealClock();

    Timestamp now() const override;
    void wait(Seconds d) override;
    void advance(Seconds d) override;
    bool is_virtual() const override { return false; }

private:
    std::chrono::steady_clock::time_point epoch_;
};

class VirtualClock final : public Clock {
public:
    VirtualClock() = default;

    Timestamp now() const override { return {now_.load(std::memory_order_acquire)}; }
    void wait(Seconds) override {}
    void advance(Seconds d) override;
    bool is_virtual() const override { return true; }

private:
    std::atomic<double> now_{0.0};
};

/// Wall-clock stopwatch for measured latencies.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace memrouter
