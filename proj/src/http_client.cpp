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

#include "http_client.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>

#include "memrouter/error.hpp"

namespace memrouter::detail {

Endpoint parse_endpoint(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(Errc::ConfigInvalid, "endpoint must include a scheme: " + std::string(url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string_view::npos) {
        ep.origin = std::string(url);
    } else {
        ep.origin = std::string(url.substr(0, path_start));
        ep.base_path = std::string(url.substr(path_start));
        while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
    }
    return ep;
}

nlohmann::json request_json(HttpMethod method, std::string_view endpoint, std::string_view path,
                            const nlohmann::json& body, std::string_view api_key,
                            double timeout_seconds) {
    const Endpoint ep = parse_endpoint(endpoint);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + std::string(api_key));

    const std::string target = ep.base_path + std::string(path);
    const std::string payload = body.dump();
    auto res = method == HttpMethod::Post
                   ? client.Post(target, headers, payload, "application/json")
                   : client.Put(target, headers, payload, "application/json");
    if (!res) {
        throw Error(Errc::NetworkError,
                    "request to " + ep.origin + target + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(Errc::NetworkError,
                    "request to " + ep.origin + target + " returned HTTP " + std::to_string(res->status));
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ProtocolError, "malformed JSON from " + ep.origin + target + ": " + e.what());
    }
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

} // namespace memrouter::detail
