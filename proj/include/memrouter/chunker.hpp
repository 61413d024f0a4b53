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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace memrouter {

struct ChunkerConfig {
    std::size_t chunk_size = 512;
    std::size_t overlap = 50;

    void validate() const;
};

struct RawDocument {
    std::string doc_id;
    std::string title;
    std::string body;
};

/// A chunk before embedding. `offset` is the byte position of `text` in the
/// source body.
struct TextChunk {
    std::string chunk_id;  // "{doc_id}#{index}"
    std::string doc_id;
    std::string text;
    std::size_t offset = 0;
};

/// Recursive character splitting over the separator hierarchy
/// "\n\n", "\n", ". ", " ", "" (single code points). Separators stay attached
/// to the end of the piece they terminate, so the pieces tile the body; pieces
/// are then merged greedily up to chunk_size, each new chunk starting with the
/// trailing pieces of the previous one that fit within `overlap`.
/// Lengths are measured in bytes.
std::vector<TextChunk> split_document(const RawDocument& doc, const ChunkerConfig& cfg);

/// Loads every regular `*.txt` file in `dir`, sorted by filename. The stem is
/// the doc_id, the first line the title and the whole file the body.
std::vector<RawDocument> load_corpus(const std::filesystem::path& dir);

} // namespace memrouter
