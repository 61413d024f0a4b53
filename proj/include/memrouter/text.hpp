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
#include <vector>

namespace memrouter {

/// Lowercased tokens of `text`. ASCII letters and digits and all non-ASCII
/// bytes are token characters; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Fixed English stopword list shared by the hashing embedder and the
/// keyword predictor.
bool is_stopword(std::string_view token);

std::vector<std::string> content_tokens(std::string_view text);

std::string_view trim(std::string_view text);

} // namespace memrouter
