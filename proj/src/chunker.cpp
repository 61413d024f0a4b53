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

#include "memrouter/chunker.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <sstream>
#include <string_view>

#include "memrouter/error.hpp"

namespace memrouter {

namespace {

constexpr std::array<std::string_view, 4> kSeparators = {"\n\n", "\n", ". ", " "};

struct Span {
    std::size_t begin;
    std::size_t end;
    std::size_t size() const { return end - begin; }
};

std::size_t code_point_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;  // stray continuation byte
}

void split_code_points(std::string_view body, Span s, std::vector<Span>& out) {
    std::size_t pos = s.begin;
    while (pos < s.end) {
        const std::size_t step =
            std::min(code_point_length(static_cast<unsigned char>(body[pos])), s.end - pos);
        out.push_back({pos, pos + step});
        pos += step;
    }
}

void split_recursive(std::string_view body, Span s, std::size_t level, std::size_t chunk_size,
                     std::vector<Span>& out) {
    if (s.size() <= chunk_size) {
        out.push_back(s);
        return;
    }
    if (level == kSeparators.size()) {
        split_code_points(body, s, out);
        return;
    }
    const std::string_view sep = kSeparators[level];
    const std::string_view view = body.substr(0, s.end);
    std::vector<Span> parts;
    std::size_t pos = s.begin;
    for (auto hit = view.find(sep, pos); hit != std::string_view::npos; hit = view.find(sep, pos)) {
        parts.push_back({pos, hit + sep.size()});
        pos = hit + sep.size();
    }
    if (pos < s.end) parts.push_back({pos, s.end});

    for (const Span& part : parts) split_recursive(body, part, level + 1, chunk_size, out);
}

} // namespace

void ChunkerConfig::validate() const {
    if (chunk_size == 0) throw Error(Errc::ConfigInvalid, "chunk_size must be positive");
    if (overlap >= chunk_size) throw Error(Errc::ConfigInvalid, "overlap must be smaller than chunk_size");
}

std::vector<TextChunk> split_document(const RawDocument& doc, const ChunkerConfig& cfg) {
    cfg.validate();
    const std::string_view body = doc.body;
    std::vector<TextChunk> chunks;
    if (body.empty()) return chunks;

    std::vector<Span> pieces;
    split_recursive(body, {0, body.size()}, 0, cfg.chunk_size, pieces);

    auto emit = [&](std::size_t begin, std::size_t end) {
        TextChunk c;
        c.chunk_id = doc.doc_id + "#" + std::to_string(chunks.size());
        c.doc_id = doc.doc_id;
        c.text = std::string(body.substr(begin, end - begin));
        c.offset = begin;
        chunks.push_back(std::move(c));
    };

    std::deque<Span> window;
    std::size_t window_len = 0;
    for (const Span& piece : pieces) {
        if (!window.empty() && window_len + piece.size() > cfg.chunk_size) {
            emit(window.front().begin, window.back().end);
            while (!window.empty() &&
                   (window_len > cfg.overlap || window_len + piece.size() > cfg.chunk_size)) {
                window_len -= window.front().size();
                window.pop_front();
            }
        }
        window.push_back(piece);
        window_len += piece.size();
    }
    if (!window.empty()) emit(window.front().begin, window.back().end);
    return chunks;
}

std::vector<RawDocument> load_corpus(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(Errc::Io, "not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<RawDocument> docs;
    docs.reserve(files.size());
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::Io, "cannot read " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        RawDocument doc;
        doc.doc_id = path.stem().string();
        doc.body = ss.str();
        doc.title = doc.body.substr(0, doc.body.find('\n'));
        docs.push_back(std::move(doc));
    }
    return docs;
}

} // namespace memrouter
