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

#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "vindex/caption/tuples.hpp"

namespace vindex::caption {

namespace {

const std::map<std::string, std::string, std::less<>>& irregular_plurals() {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"people", "person"}, {"men", "man"},       {"women", "woman"},   {"children", "child"},
      {"feet", "foot"},     {"teeth", "tooth"},   {"mice", "mouse"},    {"geese", "goose"},
      {"knives", "knife"},  {"wives", "wife"},    {"leaves", "leaf"},   {"shelves", "shelf"},
      {"wolves", "wolf"},   {"loaves", "loaf"},   {"halves", "half"},   {"calves", "calf"},
      {"scarves", "scarf"}, {"lives", "life"},    {"oxen", "ox"},       {"houses", "house"},
      {"blouses", "blouse"}, {"movies", "movie"}, {"cookies", "cookie"}, {"pies", "pie"},
      {"ties", "tie"},      {"toes", "toe"},      {"shoes", "shoe"},    {"canoes", "canoe"},
      {"police", "police"}, {"cacti", "cactus"},  {"dice", "die"},
  };
  return m;
}

const std::set<std::string, std::less<>>& uncountable() {
  static const std::set<std::string, std::less<>> s = {
      "species", "series",   "sheep",    "fish",  "deer",  "news",  "pants",  "jeans",
      "scissors", "shorts",  "clothes",  "trousers", "gas", "canvas", "lens", "bus",
      "chaos",   "physics",  "aircraft", "goggles", "christmas", "always", "is",
      "this",    "has",      "was",      "its",   "his",   "yes",   "us",     "as",
  };
  return s;
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string singularize_once(std::string_view w) {
  if (auto it = irregular_plurals().find(w); it != irregular_plurals().end()) return it->second;
  if (uncountable().count(w) || w.size() <= 3) return std::string(w);
  if (ends_with(w, "ies") && w.size() > 4) return std::string(w.substr(0, w.size() - 3)) + "y";
  if (ends_with(w, "sses")) return std::string(w.substr(0, w.size() - 2));
  if (ends_with(w, "uses")) return std::string(w.substr(0, w.size() - 2));
  for (std::string_view s : {"xes", "zes", "ches", "shes"})
    if (ends_with(w, s)) return std::string(w.substr(0, w.size() - 2));
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
    return std::string(w.substr(0, w.size() - 1));
  return std::string(w);
}

bool needs_silent_e(const std::string& stem) {
  static const std::set<std::string> no_e = {"open", "listen", "visit", "cover", "enter", "wonder",
                                             "gather", "water", "travel", "color", "order", "happen",
                                             "hover", "shop", "feed", "eat", "sit", "run", "get"};
  if (no_e.count(stem)) return false;
  if (stem.size() <= 2) return true;
  const char last = stem.back();
  if (last == 'v' || (last == 'c' && stem.size() > 3)) return true;
  if (stem.size() > 4) return false;
  const char a = stem[stem.size() - 3], b = stem[stem.size() - 2];
  return !is_vowel(a) && is_vowel(b) && !is_vowel(last) && last != 'w' && last != 'x' && last != 'y';
}

std::string fix_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z' && c != 'f') stem.pop_back();
    return stem;
  }
  if (needs_silent_e(stem)) stem.push_back('e');
  return stem;
}

}  // namespace

std::string singularize(std::string_view word) {
  std::string cur(word);
  for (;;) {
    std::string next = singularize_once(cur);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

std::string verb_lemma(std::string_view word) {
  static const std::map<std::string, std::string, std::less<>> irregular = {
      {"is", "be"},      {"are", "be"},     {"was", "be"},     {"were", "be"},    {"been", "be"},
      {"being", "be"},   {"am", "be"},      {"has", "have"},   {"had", "have"},   {"having", "have"},
      {"lying", "lie"},  {"dying", "die"},  {"tying", "tie"},  {"sat", "sit"},    {"stood", "stand"},
      {"ran", "run"},    {"rode", "ride"},  {"drove", "drive"}, {"held", "hold"}, {"hung", "hang"},
      {"worn", "wear"},  {"wore", "wear"},  {"led", "lead"},   {"flew", "fly"},   {"ate", "eat"},
      {"does", "do"},    {"goes", "go"},    {"seen", "see"},   {"taken", "take"}, {"made", "make"},
  };
  if (auto it = irregular.find(word); it != irregular.end()) return it->second;
  const std::string w(word);
  if (ends_with(w, "ing") && w.size() >= 5) return fix_stem(w.substr(0, w.size() - 3));
  if (ends_with(w, "ied") && w.size() >= 5) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "ed") && w.size() >= 4) {
    std::string stem = w.substr(0, w.size() - 2);
    if (ends_with(stem, "e")) return stem;  // "agreed"
    return fix_stem(std::move(stem));
  }
  if (w.size() >= 4) {
    if (ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
    for (std::string_view s : {"sses", "ches", "shes", "xes", "zes"})
      if (ends_with(w, s)) return w.substr(0, w.size() - 2);
    if (ends_with(w, "s") && !ends_with(w, "ss")) return w.substr(0, w.size() - 1);
  }
  return w;
}

std::string normalize_term(std::string_view word) {
  std::vector<std::string> parts;
  {
    std::string lowered;
    for (unsigned char c : word) lowered.push_back(char(std::tolower(c)));
    std::istringstream in(lowered);
    std::string p;
    while (in >> p) parts.push_back(p);
  }
  // Trailing sentence punctuation on the last word.
  while (!parts.empty()) {
    auto& last = parts.back();
    while (!last.empty() && std::ispunct(static_cast<unsigned char>(last.back())) && last.back() != '-' &&
           last.back() != '\'')
      last.pop_back();
    if (!last.empty()) break;
    parts.pop_back();
  }
  std::size_t start = 0;
  while (parts.size() - start > 1 && (parts[start] == "a" || parts[start] == "an" || parts[start] == "the"))
    ++start;
  if (start == parts.size()) return {};
  parts.back() = singularize(parts.back());
  std::string out;
  for (std::size_t i = start; i < parts.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  static const std::set<std::string> abbreviations = {"mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr",
                                                      "vs", "etc", "e.g", "i.e", "approx", "fig"};
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && std::isspace(static_cast<unsigned char>(current[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(current[e - 1]))) --e;
    if (e > b) out.push_back(current.substr(b, e - b));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    current.push_back(c);
    if (c != '.' && c != '!' && c != '?') continue;
    while (i + 1 < text.size() && (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?' ||
                                   text[i + 1] == '"' || text[i + 1] == '\'' || text[i + 1] == ')')) {
      current.push_back(text[++i]);
    }
    const bool at_boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (!at_boundary) continue;
    if (c == '.') {
      // Word immediately before the period, lowercased.
      std::size_t k = current.size() - 1;
      while (k > 0 && current[k] == '.') --k;
      std::size_t j = k + 1;
      while (j > 0 && !std::isspace(static_cast<unsigned char>(current[j - 1]))) --j;
      std::string prev;
      for (std::size_t p = j; p <= k && p < current.size(); ++p)
        prev.push_back(char(std::tolower(static_cast<unsigned char>(current[p]))));
      while (!prev.empty() && prev.back() == '.') prev.pop_back();
      while (!prev.empty() && !std::isalnum(static_cast<unsigned char>(prev.front()))) prev.erase(prev.begin());
      if (abbreviations.count(prev)) continue;
    }
    flush();
  }
  flush();
  return out;
}

}  // namespace vindex::caption
