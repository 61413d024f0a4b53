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

#include <stdexcept>
#include <string>
#include <string_view>

namespace memrouter {

enum class Errc {
    ZeroVector,
    DimensionMismatch,
    EmptyText,
    NetworkError,
    ProtocolError,
    BusClosed,
    PredictorUnavailable,
    EmptyQuery,
    EmbeddingFailed,
    ConfigInvalid,
    UnpairedRecords,
    InvalidArgument,
    Io,
};

std::string_view to_string(Errc code);

/// The single exception type thrown by the library. `code()` identifies the
/// failure class; network failures are the only retryable ones.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }
    bool retryable() const noexcept { return code_ == Errc::NetworkError; }

private:
    Errc code_;
};

} // namespace memrouter
