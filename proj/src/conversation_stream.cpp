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

#include "memrouter/conversation_stream.hpp"

#include <algorithm>

#include "memrouter/error.hpp"

namespace memrouter {

namespace detail {

struct SubscriberQueue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<ConversationEvent> events;
    bool closed = false;
};

struct StreamState {
    mutable std::mutex mutex;
    std::vector<std::shared_ptr<SubscriberQueue>> subscribers;
    SlidingWindow window;
    std::uint64_t sequence = 0;
    std::optional<std::size_t> last_utterance_turn;
    bool closed = false;

    explicit StreamState(std::size_t capacity) : window(capacity) {}

    void remove(const std::shared_ptr<SubscriberQueue>& q) {
        std::lock_guard lock(mutex);
        std::erase(subscribers, q);
    }
};

} // namespace detail

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::UserUtterance: return "UserUtterance";
    case EventKind::AgentResponse: return "AgentResponse";
    case EventKind::SilenceDetected: return "SilenceDetected";
    case EventKind::TopicShift: return "TopicShift";
    case EventKind::PriorityRetrieval: return "PriorityRetrieval";
    }
    return "Unknown";
}

SlidingWindow::SlidingWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(Errc::ConfigInvalid, "window capacity must be positive");
}

void SlidingWindow::append(Turn turn) {
    turns_.push_back(std::move(turn));
    while (turns_.size() > capacity_) turns_.pop_front();
}

std::vector<Turn> SlidingWindow::last(std::size_t n) const {
    const std::size_t take = std::min(n, turns_.size());
    return {turns_.end() - static_cast<std::ptrdiff_t>(take), turns_.end()};
}

Subscription::Subscription(std::shared_ptr<detail::StreamState> state,
                           std::shared_ptr<detail::SubscriberQueue> queue)
    : state_(std::move(state)), queue_(std::move(queue)) {}

Subscription::~Subscription() { close(); }

Subscription::Subscription(Subscription&& other) noexcept
    : state_(std::move(other.state_)), queue_(std::move(other.queue_)) {}

Subscription& Subscription::operator=(Subscription&& other) noexcept {
    if (this != &other) {
        close();
        state_ = std::move(other.state_);
        queue_ = std::move(other.queue_);
    }
    return *this;
}

std::optional<ConversationEvent> Subscription::next_event() {
    if (!queue_) return std::nullopt;
    std::unique_lock lock(queue_->mutex);
    queue_->ready.wait(lock, [&] { return !queue_->events.empty() || queue_->closed; });
    if (queue_->events.empty()) return std::nullopt;
    auto ev = std::move(queue_->events.front());
    queue_->events.pop_front();
    return ev;
}

std::optional<ConversationEvent> Subscription::next_event_for(std::chrono::milliseconds timeout) {
    if (!queue_) return std::nullopt;
    std::unique_lock lock(queue_->mutex);
    if (!queue_->ready.wait_for(lock, timeout, [&] { return !queue_->events.empty() || queue_->closed; })) {
        return std::nullopt;
    }
    if (queue_->events.empty()) return std::nullopt;
    auto ev = std::move(queue_->events.front());
    queue_->events.pop_front();
    return ev;
}

bool Subscription::ended() const {
    if (!queue_) return true;
    std::lock_guard lock(queue_->mutex);
    return queue_->closed && queue_->events.empty();
}

void Subscription::close() {
    if (!queue_) return;
    if (state_) state_->remove(queue_);
    {
        std::lock_guard lock(queue_->mutex);
        queue_->closed = true;
        queue_->events.clear();
    }
    queue_->ready.notify_all();
    queue_.reset();
    state_.reset();
}

ConversationStream::ConversationStream(std::size_t window_capacity)
    : state_(std::make_shared<detail::StreamState>(window_capacity)) {}

ConversationStream::~ConversationStream() { close(); }

std::uint64_t ConversationStream::publish(ConversationEvent event) {
    std::lock_guard lock(state_->mutex);
    if (state_->closed) throw Error(Errc::BusClosed, "publish on a closed conversation stream");
    if (event.kind == EventKind::UserUtterance) {
        if (state_->last_utterance_turn && event.turn_index < *state_->last_utterance_turn) {
            throw Error(Errc::InvalidArgument, "UserUtterance turn index went backwards");
        }
        state_->last_utterance_turn = event.turn_index;
        state_->window.append({Role::User, event.text});
    } else if (event.kind == EventKind::AgentResponse) {
        state_->window.append({Role::Agent, event.text});
    }
    event.sequence = ++state_->sequence;
    // Holding the stream lock while enqueueing keeps per-subscriber order
    // identical to sequence order under concurrent publishers.
    for (const auto& q : state_->subscribers) {
        {
            std::lock_guard qlock(q->mutex);
            q->events.push_back(event);
        }
        q->ready.notify_one();
    }
    return event.sequence;
}

Subscription ConversationStream::subscribe() {
    auto q = std::make_shared<detail::SubscriberQueue>();
    std::lock_guard lock(state_->mutex);
    if (state_->closed) {
        q->closed = true;
    } else {
        state_->subscribers.push_back(q);
    }
    return Subscription(state_, std::move(q));
}

void ConversationStream::close() {
    std::vector<std::shared_ptr<detail::SubscriberQueue>> subs;
    {
        std::lock_guard lock(state_->mutex);
        if (state_->closed) return;
        state_->closed = true;
        subs.swap(state_->subscribers);
    }
    for (const auto& q : subs) {
        {
            std::lock_guard qlock(q->mutex);
            q->closed = true;
        }
        q->ready.notify_all();
    }
}

bool ConversationStream::closed() const {
    std::lock_guard lock(state_->mutex);
    return state_->closed;
}

std::vector<Turn> ConversationStream::window_context(std::size_t n) const {
    std::lock_guard lock(state_->mutex);
    return state_->window.last(n);
}

std::uint64_t ConversationStream::last_sequence() const {
    std::lock_guard lock(state_->mutex);
    return state_->sequence;
}

} // namespace memrouter
