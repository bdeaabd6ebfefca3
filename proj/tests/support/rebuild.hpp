// Copyright 2026 The Abacus Authors
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

#pragma once

#include <string>

#include "abacus/gsm_record.hpp"

namespace rebuild {

// Reconstructs the raw solution from the stripped text plus annotation
// metadata. Byte equality with the original proves the strip operation is
// lossless and every recorded span is exact.
inline std::string reinsert_annotations(const abacus::GsmRecord& record) {
  std::string stripped =
      abacus::strip_annotations(record.solution, record.annotations);
  std::string out;
  out.reserve(record.solution.size());
  std::size_t stripped_pos = 0;
  for (const abacus::Annotation& a : record.annotations) {
    std::size_t keep = abacus::stripped_offset(record.annotations, a.token_span.begin);
    out.append(stripped, stripped_pos, keep - stripped_pos);
    out += "<<" + a.expr_text + "=" + a.result_text + ">>";
    stripped_pos = keep;
  }
  out.append(stripped, stripped_pos, std::string::npos);
  return out;
}

}  // namespace rebuild
