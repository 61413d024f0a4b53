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

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memrouter/clock.hpp"

namespace memrouter {

enum class EventKind { UserUtterance, AgentResponse, SilenceDetected, TopicShift, PriorityRetrieval };

std::string_view to_string(EventKind kind);

struct ConversationEvent {
    EventKind kind = EventKind::UserUtterance;
    std::size_t turn_index = 0;
    std::string text;  // empty for SilenceDetected
    Timestamp timestamp;
    std::uint64_t sequence = 0;  // assigned by publish(), 1-based
};

enum class Role { User, Agent };

struct Turn {
    Role role = Role::User;
    std::string text;

    friend bool operator==(const Turn&, const Turn&) = default;
};

/// The last `capacity` conversation turns, oldest first.
class SlidingWindow {
public:
    explicit SlidingWindow(std::size_t capacity = 10);

    void append(Turn turn);
    std::vector<Turn> last(std::size_t n) const;
    std::size_t size() const noexcept { return turns_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<Turn> turns_;
};

namespace detail {
struct StreamState;
struct SubscriberQueue;
} // namespace detail

/// One consumer's view of the stream. Owned and drained by a single task.
class Subscription {
public:
    Subscription() = default;
    ~Subscription();
    Subscription(Subscription&&) noexcept;
    Subscription& operator=(Subscription&&) noexcept;

    /// Blocks until an event arrives; nullopt once the stream is closed and
    /// this subscriber's queue is drained, or after close().
    std::optional<ConversationEvent> next_event();

    /// As next_event() but gives up after `timeout`.
    std::optional<ConversationEvent> next_event_for(std::chrono::milliseconds timeout);

    /// Unsubscribes; pending events are discarded.
    void close();

    /// True once the stream closed (or close() was called) and nothing is
    /// left to read.
    bool ended() const;

    bool valid() const noexcept { return queue_ != nullptr; }

private:
    friend class ConversationStream;
    Subscription(std::shared_ptr<detail::StreamState> state, std::shared_ptr<detail::SubscriberQueue> queue);

    std::shared_ptr<detail::StreamState> state_;
    std::shared_ptr<detail::SubscriberQueue> queue_;
};

/// In-process publish/subscribe bus with per-subscriber unbounded FIFO
/// queues. UserUtterance and AgentResponse events also feed the window.
class ConversationStream {
public:
    explicit ConversationStream(std::size_t window_capacity = 10);
    ~ConversationStream();

    ConversationStream(const ConversationStream&) = delete;
    ConversationStream& operator=(const ConversationStream&) = delete;

    /// Delivers `event` to every current subscriber; returns its sequence
    /// number. Throws BusClosed after close(), InvalidArgument when a
    /// UserUtterance turn index goes backwards.
    std::uint64_t publish(ConversationEvent event);

    /// Late subscribers only see events published after this call.
    Subscription subscribe();

    void close();
    bool closed() const;

    std::vector<Turn> window_context(std::size_t n) const;

    std::uint64_t last_sequence() const;

private:
    std::shared_ptr<detail::StreamState> state_;
};

} // namespace memrouter
