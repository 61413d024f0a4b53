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

#include "memrouter/clock.hpp"

#include <thread>

namespace memrouter {

RealClock::RealClock() : epoch_(std::chrono::steady_clock::now()) {}

Timestamp RealClock::now() const {
    return {std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_).count()};
}

void RealClock::wait(Seconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

void RealClock::advance(Seconds d) { wait(d); }

void VirtualClock::advance(Seconds d) {
    if (d.count() <= 0) return;
    double cur = now_.load(std::memory_order_relaxed);
    while (!now_.compare_exchange_weak(cur, cur + d.count(), std::memory_order_acq_rel)) {
    }
}

} // namespace memrouter
