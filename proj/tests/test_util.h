// Copyright (c) 2026 The eosseg Authors
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

#ifndef EOSSEG_TESTS_TEST_UTIL_H_
#define EOSSEG_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "eosseg/corpus.h"

namespace eosseg {
namespace testing_util {

inline UtteranceSpec MakeSpec(std::vector<Word> words, int total_ms,
                              DomainKind kind = DomainKind::kLongForm,
                              std::string id = "t0") {
  UtteranceSpec s;
  s.id = std::move(id);
  s.words = std::move(words);
  s.total_ms = total_ms;
  s.domain_kind = kind;
  return s;
}

// "hello" [100, 350), "world" [450, 1300), then trailing silence; the
// segment ends right at end-of-speech, more than one lag after "hello".
inline UtteranceSpec HelloWorld(int total_ms = 2100) {
  return MakeSpec({{"hello", 100, 350, false}, {"world", 450, 1300, false}}, total_ms,
                  DomainKind::kShortQuery);
}

inline std::vector<std::string> Split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace testing_util
}  // namespace eosseg

#endif  // EOSSEG_TESTS_TEST_UTIL_H_
