// Copyright 2026 The whisperkit Authors.
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

#ifndef WHISPERKIT_TEXT_H_
#define WHISPERKIT_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace whisperkit {

// Scoring normalization: lowercase ASCII letters, drop punctuation other
// than apostrophes, collapse whitespace runs to one space, trim both ends.
std::string normalize_text(std::string_view text);

// Whitespace tokenization of already-normalized text.
std::vector<std::string> split_words(std::string_view text);

std::string join_words(const std::vector<std::string>& words);

}  // namespace whisperkit

#endif  // WHISPERKIT_TEXT_H_
