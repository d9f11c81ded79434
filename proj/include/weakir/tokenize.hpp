#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace weakir {

using Tokens = std::vector<std::string>;

/// Lowercases and splits on every maximal run of non-alphanumeric characters.
/// Case folding is ASCII-only; bytes >= 0x80 pass through unchanged so UTF-8
/// sequences survive as single tokens. Empty input yields an empty list.
inline Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      current.push_back(raw);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace weakir
