#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oiekit/span.hpp"

namespace oiekit {

// One n-ary tuple: ordered arguments plus a predicate. Spans refer to the
// tuple's sentence; arg_spans may be empty for text-only tuples (e.g. scorer
// input), otherwise it parallels arg_texts. When spans are present they are
// mutually non-overlapping.
struct Extraction {
  std::vector<std::string> arg_texts;
  std::vector<TokenSpan> arg_spans;
  std::optional<TokenSpan> pred_span;
  std::string pred_text;
  double confidence = 1.0;
};

}  // namespace oiekit
