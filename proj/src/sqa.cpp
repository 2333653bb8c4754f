// Copyright 2026 The Vindex Lab Authors
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

#include "vindex/sqa.hpp"

#include <cctype>
#include <set>

namespace vindex {

ValidatedQASet validate_qa_set(std::vector<QAItem> items) {
  ValidatedQASet out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.correct_index >= QAItem::kOptions)
      throw ValidationError("qa item " + std::to_string(i) + ": correct_index out of range");
    for (const auto& o : it.options)
      if (o.empty()) throw ValidationError("qa item " + std::to_string(i) + ": empty option");
    (it.is_hallucination_probe ? out.probes : out.present)++;
  }
  if (out.probes != out.present) {
    out.warnings.push_back("hallucination probes (" + std::to_string(out.probes) +
                           ") do not balance present-object items (" + std::to_string(out.present) + ")");
  }
  out.items = std::move(items);
  return out;
}

namespace {

std::string normalize_text(std::string_view s) {
  std::string out;
  bool space = true;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      out.push_back(char(std::tolower(c)));
      space = false;
    } else if (!space) {
      out.push_back(' ');
      space = true;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::optional<std::size_t> letter_index(char c) {
  const char u = char(std::toupper(static_cast<unsigned char>(c)));
  if (u >= 'A' && u < char('A' + QAItem::kOptions)) return std::size_t(u - 'A');
  return std::nullopt;
}

bool is_alpha(std::string_view s, std::size_t i) {
  return i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]));
}

std::optional<std::size_t> leading_letter(std::string_view r) {
  std::size_t i = 0;
  bool bracketed = false;
  while (i < r.size() && (std::isspace(static_cast<unsigned char>(r[i])) || r[i] == '(' || r[i] == '[')) {
    bracketed = bracketed || r[i] != ' ';
    ++i;
  }
  if (i >= r.size() || is_alpha(r, i + 1)) return std::nullopt;
  // "a" followed by more words reads as an article, not a choice.
  const bool article = (r[i] == 'a' || r[i] == 'A') && i + 1 < r.size() &&
                       std::isspace(static_cast<unsigned char>(r[i + 1])) &&
                       r.find_first_not_of(" \t\r\n.", i + 1) != std::string_view::npos;
  if (article && !bracketed) return std::nullopt;
  return letter_index(r[i]);
}

std::optional<std::size_t> isolated_letter(std::string_view r) {
  std::set<std::size_t> found;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto idx = letter_index(r[i]);
    if (!idx || is_alpha(r, i + 1) || (i > 0 && is_alpha(r, i - 1))) continue;
    const bool upper = std::isupper(static_cast<unsigned char>(r[i]));
    const char next = i + 1 < r.size() ? r[i + 1] : '\0';
    const char prev = i > 0 ? r[i - 1] : '\0';
    const auto before = r.find_last_not_of(" \t\r\n", i == 0 ? 0 : i - 1);
    const bool sentence_start = i == 0 || before == std::string_view::npos || r[before] == '.' ||
                                r[before] == '!' || r[before] == '?';
    if (r[i] == 'A' && sentence_start && std::isspace(static_cast<unsigned char>(next)) &&
        r.find_first_not_of(" \t\r\n.", i + 1) != std::string_view::npos)
      continue;
    bool at_end = true;
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      if (!std::ispunct(static_cast<unsigned char>(r[j])) && !std::isspace(static_cast<unsigned char>(r[j]))) {
        at_end = false;
        break;
      }
    }
    const bool marker = prev == '(' || next == ')' || next == ':';
    if (upper || marker || at_end) found.insert(*idx);
  }
  if (found.size() == 1) return *found.begin();
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> parse_choice(std::string_view response, std::span<const std::string> options) {
  if (auto l = leading_letter(response)) {
    if (*l < options.size()) return l;
  }
  if (auto l = isolated_letter(response)) {
    if (*l < options.size()) return l;
  }
  const std::string resp = " " + normalize_text(response) + " ";
  std::vector<std::pair<std::size_t, std::string>> hits;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const std::string opt = normalize_text(options[i]);
    if (!opt.empty() && resp.find(" " + opt + " ") != std::string::npos) hits.emplace_back(i, opt);
  }
  // Drop options whose text only appears as part of a longer matched option.
  std::optional<std::size_t> chosen;
  std::size_t kept = 0;
  for (const auto& [i, opt] : hits) {
    bool inside = false;
    for (const auto& [k, other] : hits)
      if (k != i && other.size() > opt.size() && (" " + other + " ").find(" " + opt + " ") != std::string::npos)
        inside = true;
    if (!inside) {
      chosen = i;
      ++kept;
    }
  }
  if (kept != 1) return std::nullopt;
  return chosen;
}

SQAScore score(std::span<const QAItem> items, std::span<const std::optional<std::size_t>> responses) {
  if (items.size() != responses.size())
    throw ShapeError("sqa score: " + std::to_string(items.size()) + " items but " +
                     std::to_string(responses.size()) + " responses");
  if (items.empty()) throw EmptyCorpus("sqa score: no items");
  SQAScore s;
  std::size_t n_probe = 0, c_probe = 0, n_present = 0, c_present = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const bool ok = responses[i].has_value() && *responses[i] == items[i].correct_index;
    s.correct += ok;
    if (items[i].is_hallucination_probe) {
      ++n_probe;
      c_probe += ok;
    } else {
      ++n_present;
      c_present += ok;
    }
  }
  s.total = items.size();
  s.accuracy = 100.0 * double(s.correct) / double(s.total);
  if (n_present) s.present_accuracy = 100.0 * double(c_present) / double(n_present);
  if (n_probe) s.probe_accuracy = 100.0 * double(c_probe) / double(n_probe);
  return s;
}

}  // namespace vindex
