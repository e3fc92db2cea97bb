// Copyright 2026 The Argforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARGFORGE_UTF8_HPP_
#define ARGFORGE_UTF8_HPP_

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 handling for Latin and Cyrillic text. Character classes are
// coarse: anything outside the known punctuation/symbol blocks above U+0530
// counts as a letter.
namespace argforge::utf8 {

struct Decoded {
  char32_t code_point;
  std::size_t length;  // bytes consumed, >= 1
};

// Invalid or truncated sequences decode to U+FFFD consuming one byte.
Decoded decode(std::string_view text, std::size_t pos);
void append(std::string& out, char32_t code_point);

bool is_space(char32_t c);
bool is_digit(char32_t c);
bool is_letter(char32_t c);
bool is_upper(char32_t c);
char32_t to_lower(char32_t c);

std::string to_lower(std::string_view text);

// Trims and collapses every whitespace run to a single ASCII space.
std::string collapse_whitespace(std::string_view text);

// Removes leading and trailing whitespace.
std::string_view trim(std::string_view text);

}  // namespace argforge::utf8

#endif  // ARGFORGE_UTF8_HPP_
