// Shared helpers for the test binaries: fixture loading, trailing-newline
// normalization, and the independent oracles used against convert.

#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coconstruct/conllu.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(COCO_FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(COCO_GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string read_fixture(const std::string& name) {
    return read_file(fixture_path(name));
}

/// Trailing-newline normalization: the file ends with exactly one blank
/// line, the serializer's convention.
inline std::string normalize(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.pop_back();
    if (text.empty()) return text;
    return text + "\n\n";
}

inline std::vector<std::string> fixture_files(bool include_bad = true) {
    std::vector<std::string> out;
    for (const auto& entry :
         std::filesystem::directory_iterator(std::string(COCO_FIXTURE_DIR)))
        if (entry.is_regular_file() && entry.path().extension() == ".conllu")
            out.push_back(entry.path().string());
    if (include_bad)
        for (const auto& entry : std::filesystem::directory_iterator(
                 std::string(COCO_FIXTURE_DIR) + "/bad"))
            if (entry.is_regular_file() && entry.path().extension() == ".conllu")
                out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

/// Independent connected-components oracle over an undirected edge list:
/// plain breadth-first search, no union-find.
inline std::vector<std::vector<int>> bfs_components(
    int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<std::vector<int>> components;
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::vector<int> comp;
        std::vector<int> queue{start};
        seen[static_cast<std::size_t>(start)] = true;
        while (!queue.empty()) {
            int v = queue.back();
            queue.pop_back();
            comp.push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)])
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    queue.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    std::sort(components.begin(), components.end());
    return components;
}

}  // namespace testutil
