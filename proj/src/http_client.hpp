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

#include <string>
#include <string_view>

#include <json.hpp>

namespace memrouter::detail {

struct Endpoint {
    std::string origin;     // scheme://host[:port]
    std::string base_path;  // "" or "/v1", never a trailing slash
};

Endpoint parse_endpoint(std::string_view url);

enum class HttpMethod { Post, Put };

/// Sends a JSON request to `{endpoint}{path}` and returns the parsed JSON body.
/// Transport failures, timeouts and non-2xx statuses raise NetworkError; an
/// unparsable body raises ProtocolError.
nlohmann::json request_json(HttpMethod method, std::string_view endpoint, std::string_view path,
                            const nlohmann::json& body, std::string_view api_key,
                            double timeout_seconds);

inline nlohmann::json post_json(std::string_view endpoint, std::string_view path,
                                const nlohmann::json& body, std::string_view api_key,
                                double timeout_seconds) {
    return request_json(HttpMethod::Post, endpoint, path, body, api_key, timeout_seconds);
}

std::string env_or_empty(const char* name);

} // namespace memrouter::detail
