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

#include "memrouter/error.hpp"

namespace memrouter {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyText: return "EmptyText";
    case Errc::NetworkError: return "NetworkError";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::BusClosed: return "BusClosed";
    case Errc::PredictorUnavailable: return "PredictorUnavailable";
    case Errc::EmptyQuery: return "EmptyQuery";
    case Errc::EmbeddingFailed: return "EmbeddingFailed";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::UnpairedRecords: return "UnpairedRecords";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace memrouter
