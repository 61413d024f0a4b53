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

#include <filesystem>
#include <string>
#include <string_view>

#include "memrouter/chunker.hpp"
#include "memrouter/memory_router.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

enum class StoreKind { Local, Remote };
enum class ResponderKind { Template, Chat };

/// Everything a config file can set: the router itself plus the pieces the
/// command-line tool builds around it.
struct AppConfig {
    RouterConfig router;
    ChunkerConfig chunker;
    StoreKind store = StoreKind::Local;
    RemoteStoreConfig remote_store;
    ResponderKind responder = ResponderKind::Template;
    ChatConfig chat;  // used by the chat responder
};

/// Overlays a JSON document on `base`. Keys left out keep their base value;
/// unknown keys and ill-typed values raise ConfigInvalid. The result is
/// validated.
AppConfig parse_config(std::string_view json_text, const AppConfig& base = {});

AppConfig load_config(const std::filesystem::path& path, const AppConfig& base = {});

/// Pretty-printed JSON with every field present.
std::string dump_config(const AppConfig& cfg);

} // namespace memrouter
