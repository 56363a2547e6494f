#pragma once

#include <set>
#include <string>
#include <string_view>

#include "ert/prompt/lexicon.hpp"

namespace ert::prompt {

// Content words after synonym inversion, plural folding and stop-word removal.
std::set<std::string> content_tokens(std::string_view text, const SynonymTable& table);

// 1 - Jaccard(content_tokens(a), content_tokens(b)); 0 when both are empty.
double prompt_distance(std::string_view a, std::string_view b, const SynonymTable& table);

}  // namespace ert::prompt
