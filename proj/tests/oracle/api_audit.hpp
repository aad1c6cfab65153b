// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

// Header scanner shared by the unit and acceptance tests: the pruning stages must work
// from hidden states and cache contents alone, so their public headers may not name
// anything that carries attention weights.

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace audit {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Drops // and /* */ comments and string literals; code only.
inline std::string strip_comments(const std::string& src) {
    std::string out;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src.compare(i, 2, "//") == 0) {
            while (i < src.size() && src[i] != '\n') {
                ++i;
            }
            out.push_back('\n');
        } else if (src.compare(i, 2, "/*") == 0) {
            const auto end = src.find("*/", i + 2);
            i = end == std::string::npos ? src.size() : end + 1;
            out.push_back(' ');
        } else if (src[i] == '"') {
            ++i;
            while (i < src.size() && src[i] != '"') {
                i += src[i] == '\\' ? 2 : 1;
            }
            out += "\"\"";
        } else {
            out.push_back(src[i]);
        }
    }
    return out;
}

inline std::vector<std::string> forbidden_identifiers(const std::string& code) {
    static const std::regex ident(R"([A-Za-z_][A-Za-z0-9_]*)");
    static const std::vector<std::string> banned = {"attention", "attn", "softmax"};
    std::vector<std::string> hits;
    for (auto it = std::sregex_iterator(code.begin(), code.end(), ident); it != std::sregex_iterator(); ++it) {
        std::string lower = it->str();
        std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
        for (const auto& b : banned) {
            if (lower.find(b) != std::string::npos) {
                hits.push_back(it->str());
            }
        }
    }
    return hits;
}

// The audited header plus every project header it pulls in.
inline std::set<std::filesystem::path> header_closure(const std::filesystem::path& include_dir, const std::string& name) {
    static const std::regex include_re(R"re(#include\s+"(sharpv/[^"]+)")re");
    std::set<std::filesystem::path> seen;
    std::vector<std::filesystem::path> todo{include_dir / "sharpv" / name};
    while (!todo.empty()) {
        const auto p = todo.back();
        todo.pop_back();
        if (!seen.insert(p).second) {
            continue;
        }
        const std::string src = read_file(p);
        for (auto it = std::sregex_iterator(src.begin(), src.end(), include_re); it != std::sregex_iterator(); ++it) {
            todo.push_back(include_dir / (*it)[1].str());
        }
    }
    return seen;
}

/// Forbidden identifiers found in `header` or any project header it includes.
inline std::vector<std::string> audit_header(const std::filesystem::path& include_dir, const std::string& header) {
    std::vector<std::string> hits;
    for (const auto& file : header_closure(include_dir, header)) {
        if (!std::filesystem::exists(file)) {
            hits.push_back("missing:" + file.string());
            continue;
        }
        for (auto& h : forbidden_identifiers(strip_comments(read_file(file)))) {
            hits.push_back(file.filename().string() + ":" + h);
        }
    }
    return hits;
}

}  // namespace audit
