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
#include <optional>

#include "vindex/caption/tuples.hpp"

namespace vindex::caption {

std::set<std::string> ParserOptions::default_compounds() {
  return {"city street", "traffic light",  "fire hydrant", "stop sign",    "tennis racket", "tennis court",
          "baseball bat", "baseball glove", "teddy bear",  "hot dog",      "cell phone",    "parking meter",
          "dining table", "living room",    "train track", "street sign",  "street light",  "ice cream",
          "double-decker bus", "motorcycle helmet", "surf board", "ski slope", "pizza box", "bus stop"};
}

namespace {

enum class Tag { det, num, adj, noun, verb, aux, prep, conj, comma, adv, pron, rel };

struct Token {
  std::string text;  // lowercase surface form (or merged unit)
  Tag tag = Tag::noun;
};

using WordSet = std::set<std::string, std::less<>>;

const WordSet& determiners() {
  static const WordSet s = {"a",    "an",    "the",     "this",     "these", "those",   "its",
                            "their", "his",  "her",     "some",     "several", "many",  "few",
                            "each", "every", "another", "multiple", "various", "numerous", "both",
                            "all",  "our",   "my",      "your",     "any",   "lots of", "a lot of"};
  return s;
}

const WordSet& numbers() {
  static const WordSet s = {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
                            "eleven", "twelve", "dozen", "pair", "couple"};
  return s;
}

const WordSet& adjectives() {
  static const WordSet s = {
      // colors
      "red", "white", "green", "blue", "black", "yellow", "brown", "gray", "grey", "orange", "pink",
      "purple", "silver", "golden", "gold", "dark", "light", "bright", "colorful", "turquoise", "beige",
      // size and shape
      "tall", "large", "big", "small", "little", "tiny", "huge", "long", "short", "wide", "narrow",
      "round", "square", "tall", "giant", "massive", "thin", "thick", "flat", "high", "low",
      // material and quality
      "wooden", "metal", "metallic", "glass", "plastic", "stone", "brick", "concrete",
      "old", "new", "modern", "busy", "clear", "empty", "open", "closed", "young", "happy", "sunny",
      "cloudy", "peaceful", "soft", "clean", "dirty", "wet", "dry", "fresh", "ripe", "striped",
      "spotted", "fluffy", "furry", "shiny", "calm", "quiet", "crowded", "beautiful", "lush", "sandy",
      "snowy", "grassy", "rocky", "urban", "rural", "vintage", "sleek", "double-decker", "blurry",
      "distant", "nearby", "various", "other", "same", "different", "main", "top", "bottom", "front",
      "rear", "left", "right", "upper", "lower", "middle", "outdoor", "indoor", "cozy", "lively",
      "elegant", "rustic", "vibrant", "sturdy", "heavy", "tidy", "messy", "hot", "cold", "warm",
      "gentle", "partly", "hazy", "foggy", "rainy", "stormy", "dense", "sparse", "blond", "blonde",
      "curly", "elderly", "adult", "baby", "female", "male", "smiling"};
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s = {"is", "are", "was", "were", "be", "been", "being", "am", "can", "could",
                            "may", "might", "will", "would", "does", "do", "did", "appears", "appear",
                            "seems", "seem"};
  return s;
}

const WordSet& prepositions() {
  static const WordSet s = {"in",     "on",      "at",      "under",    "over",   "above",  "below",
                            "behind", "beside",  "near",    "with",     "without", "of",    "by",
                            "along",  "across",  "through", "into",     "onto",   "toward", "towards",
                            "down",   "up",      "around",  "between",  "from",   "to",     "against",
                            "inside", "outside", "beneath", "past",     "among",  "amid",   "atop",
                            "underneath", "within", "for",  "about",    "off",    "out",    "beyond",
                            "in front of", "next to", "on top of", "close to", "out of", "away from",
                            "in the middle of", "on the side of", "in between", "alongside"};
  return s;
}

const WordSet& conjunctions() {
  static const WordSet s = {"and", "or", "but", "while", "as", "where", "whereas", "although", "because",
                            "so", "then", "when"};
  return s;
}

const WordSet& pronouns() {
  static const WordSet s = {"there", "it", "they", "he", "she", "we", "i", "you", "them", "him",
                            "one", "others", "someone", "something", "everything", "nothing"};
  return s;
}

const WordSet& relativizers() {
  static const WordSet s = {"that", "which", "who", "whose"};
  return s;
}

const WordSet& adverbs() {
  static const WordSet s = {"also", "very", "quite", "just", "still", "not", "too", "here",
                            "together", "slightly", "almost", "even", "well", "away", "visible",
                            "seen", "likely", "possibly", "perhaps", "overall"};
  return s;
}

/// Base forms recognized as verbs in their bare or third-person form.
const WordSet& base_verbs() {
  static const WordSet s = {
      "sit",   "stand", "hold",  "ride",  "drive",  "walk",   "run",    "eat",    "carry",  "wear",
      "play",  "lie",   "look",  "surround", "cover", "fly",  "park",   "cross",  "pass",   "face",
      "line",  "fill",  "lead",  "pull",  "push",   "throw",  "catch",  "kick",   "hit",    "swim",
      "jump",  "climb", "float", "sail",  "perch",  "stretch", "rest",  "hang",   "lean",   "graze",
      "wait",  "stop",  "travel", "move", "grow",   "overlook", "sleep", "watch", "read",  "use",
      "contain", "show", "feature", "depict", "have", "sit", "stand", "fill", "occupy", "border",
      "reach", "touch", "enter", "approach", "follow", "chase", "feed", "drink", "hover", "roll",
      "dominate", "frame", "decorate", "adorn", "support", "display", "reflect", "flank"};
  return s;
}

const WordSet& ing_nouns() {
  static const WordSet s = {"building", "ceiling", "clothing", "painting", "railing", "awning", "string",
                            "spring",   "swing",   "thing",    "evening",  "morning", "sibling", "pudding",
                            "icing",    "sling",   "ring",     "king",     "wing",    "crossing", "sidewalk",
                            "setting",  "landing", "opening",  "bedding",  "lighting", "stuffing", "parking",
                            "wedding",  "housing", "frosting", "topping",  "siding",  "fencing", "seating"};
  return s;
}

const WordSet& ed_nouns() {
  static const WordSet s = {"bed", "shed", "sled", "speed", "seed", "weed", "breed", "reed", "steed",
                            "red", "sled", "head", "bread", "thread", "hundred", "field", "shield"};
  return s;
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool looks_like_verb(const std::string& w) {
  if (ends_with(w, "ing") && w.size() >= 5 && !ing_nouns().count(w)) return true;
  if (ends_with(w, "ed") && w.size() >= 5 && !ed_nouns().count(w)) return true;
  if (base_verbs().count(w)) return true;
  const std::string lemma = verb_lemma(w);
  return lemma != w && base_verbs().count(lemma) > 0;
}

std::vector<std::string> words_of(std::string_view sentence) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : sentence) {
    if (std::isalnum(c) || c == '-' || c == '\'') {
      cur.push_back(char(std::tolower(c)));
    } else if (c == ',' || c == ';' || c == ':') {
      flush();
      out.emplace_back(",");
    } else {
      flush();
    }
  }
  flush();
  for (auto& w : out) {
    if (ends_with(w, "'s")) w.resize(w.size() - 2);
    while (!w.empty() && (w.back() == '-' || w.back() == '\'')) w.pop_back();
  }
  std::erase_if(out, [](const std::string& w) { return w.empty(); });
  return out;
}

/// Longest multiword unit from `units` starting at i, as (text, length).
std::optional<std::pair<std::string, std::size_t>> match_unit(const std::vector<std::string>& words,
                                                              std::size_t i, const WordSet& units,
                                                              bool singular_tail) {
  std::optional<std::pair<std::string, std::size_t>> best;
  std::string joined;
  for (std::size_t k = i; k < words.size() && k < i + 4; ++k) {
    if (words[k] == ",") break;
    if (k > i) joined.push_back(' ');
    std::string w = words[k];
    joined += w;
    if (k == i) continue;
    std::string probe = joined;
    if (singular_tail) probe = joined.substr(0, joined.size() - w.size()) + singularize(w);
    if (units.count(probe)) best = std::make_pair(probe, k - i + 1);
  }
  return best;
}

std::vector<Token> tokenize(std::string_view sentence, const ParserOptions& options) {
  const auto words = words_of(sentence);
  const WordSet compounds(options.compounds.begin(), options.compounds.end());
  std::vector<Token> toks;
  for (std::size_t i = 0; i < words.size();) {
    const std::string& w = words[i];
    if (w == ",") {
      toks.push_back({w, Tag::comma});
      ++i;
      continue;
    }
    if (auto u = match_unit(words, i, prepositions(), false)) {
      toks.push_back({u->first, Tag::prep});
      i += u->second;
      continue;
    }
    if (auto u = match_unit(words, i, determiners(), false)) {
      toks.push_back({u->first, Tag::det});
      i += u->second;
      continue;
    }
    if (auto u = match_unit(words, i, compounds, true)) {
      toks.push_back({u->first, Tag::noun});
      i += u->second;
      continue;
    }
    Tag tag = Tag::noun;
    if (determiners().count(w)) tag = Tag::det;
    else if (relativizers().count(w)) tag = Tag::rel;
    else if (numbers().count(w) || std::isdigit(static_cast<unsigned char>(w[0]))) tag = Tag::num;
    else if (auxiliaries().count(w)) tag = Tag::aux;
    else if (prepositions().count(w)) tag = Tag::prep;
    else if (conjunctions().count(w)) tag = Tag::conj;
    else if (pronouns().count(w)) tag = Tag::pron;
    else if (adjectives().count(w)) tag = Tag::adj;
    else if (adverbs().count(w) || (ends_with(w, "ly") && w.size() > 4)) tag = Tag::adv;
    else if (looks_like_verb(w)) tag = Tag::verb;
    toks.push_back({w, tag});
    ++i;
  }
  // A verb-looking word right after a determiner or modifier is a noun or a modifier.
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].tag != Tag::verb || i == 0) continue;
    const Tag prev = toks[i - 1].tag;
    if (prev == Tag::det || prev == Tag::adj || prev == Tag::num) toks[i].tag = Tag::noun;
  }
  return toks;
}

struct NounPhrase {
  std::string head;
  std::set<std::string> attributes;
};

enum class Elem { np, verb, prep, aux, adj, conj_and, conj_other, comma, rel, pron, skip };

struct Element {
  Elem kind = Elem::skip;
  NounPhrase np;
  std::string text;  // verb lemma, preposition or adjective
};

/// Groups tokens into noun phrases and single-token elements.
std::vector<Element> chunk(const std::vector<Token>& toks) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < toks.size();) {
    const Tag t = toks[i].tag;
    if (t == Tag::det || t == Tag::num || t == Tag::adj || t == Tag::noun) {
      // DET? (ADJ | NUM | ADJ "and" ADJ | NOUN-modifier)* NOUN
      std::size_t j = i;
      std::set<std::string> attrs;
      std::optional<std::string> head;
      std::vector<std::string> nouns;
      while (j < toks.size()) {
        const Tag tj = toks[j].tag;
        if (tj == Tag::det || tj == Tag::num) {
          if (!nouns.empty()) break;
          ++j;
        } else if (tj == Tag::adj) {
          if (!nouns.empty()) break;
          attrs.insert(toks[j].text);
          ++j;
        } else if (tj == Tag::conj && toks[j].text == "and" && !attrs.empty() && nouns.empty() &&
                   j + 1 < toks.size() && toks[j + 1].tag == Tag::adj) {
          ++j;
        } else if (tj == Tag::noun) {
          nouns.push_back(toks[j].text);
          ++j;
        } else {
          break;
        }
      }
      if (!nouns.empty()) {
        Element e;
        e.kind = Elem::np;
        e.np.head = normalize_term(nouns.back());
        e.np.attributes = std::move(attrs);
        out.push_back(std::move(e));
        i = j;
        continue;
      }
      if (t == Tag::adj) {
        // Predicative adjectives: emit each on its own.
        for (std::size_t k = i; k < j; ++k)
          if (toks[k].tag == Tag::adj) out.push_back({Elem::adj, {}, toks[k].text});
        i = j;
        continue;
      }
      i = j > i ? j : i + 1;
      continue;
    }
    Element e;
    e.text = toks[i].text;
    switch (t) {
      case Tag::verb: e.kind = Elem::verb; e.text = verb_lemma(toks[i].text); break;
      case Tag::prep: e.kind = Elem::prep; break;
      case Tag::aux: e.kind = Elem::aux; break;
      case Tag::conj: e.kind = toks[i].text == "and" ? Elem::conj_and : Elem::conj_other; break;
      case Tag::comma: e.kind = Elem::comma; break;
      case Tag::rel: e.kind = Elem::rel; break;
      case Tag::pron: e.kind = Elem::pron; break;
      default: e.kind = Elem::skip; break;
    }
    out.push_back(std::move(e));
    ++i;
  }
  return out;
}

class ClauseReader {
 public:
  explicit ClauseReader(TupleSet& out) : out_(out) {}

  void read(const std::vector<Element>& elems) {
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const Element& e = elems[i];
      switch (e.kind) {
        case Elem::np: on_noun_phrase(e.np); break;
        case Elem::verb: on_verb(e.text); break;
        case Elem::prep:
          if (state_ == State::after_subject || state_ == State::after_object) {
            if (state_ == State::after_object && last_np_) subjects_ = {*last_np_};
            predicate_ = e.text;
            state_ = State::expect_object;
          } else if (state_ == State::expect_object) {
            predicate_ += " " + e.text;
          }
          break;
        case Elem::aux: copula_ = true; break;
        case Elem::adj:
          if (copula_) {
            for (const auto& s : subjects_) add_attribute(s, e.text);
          }
          break;
        case Elem::conj_and:
          if (state_ == State::after_subject) {
            coordinating_ = true;
          } else if (state_ == State::after_object) {
            // "... a street and a road" continues the object list unless a verb follows.
            const bool new_clause = i + 2 < elems.size() && elems[i + 1].kind == Elem::np &&
                                    (elems[i + 2].kind == Elem::verb || elems[i + 2].kind == Elem::aux);
            if (new_clause) reset();
            else state_ = State::expect_object;
          } else {
            reset();
          }
          break;
        case Elem::comma:
          if (state_ == State::after_subject) {
            coordinating_ = true;
          } else if (!clause_subjects_.empty()) {
            subjects_ = clause_subjects_;
            state_ = State::after_subject;
            coordinating_ = false;
            copula_ = false;
          }
          break;
        case Elem::rel:
          if (last_np_) {
            subjects_ = {*last_np_};
            clause_subjects_ = subjects_;
            state_ = State::after_subject;
            copula_ = false;
          }
          break;
        case Elem::pron:
          reset();
          pronoun_subject_ = true;
          break;
        case Elem::conj_other: reset(); break;
        case Elem::skip: break;
      }
    }
  }

 private:
  enum class State { start, after_subject, expect_object, after_object };

  void reset() {
    state_ = State::start;
    subjects_.clear();
    clause_subjects_.clear();
    coordinating_ = false;
    copula_ = false;
    pronoun_subject_ = false;
  }

  void add_object(const NounPhrase& np) {
    if (is_scene_region(np.head)) return;
    out_.objects.insert(np.head);
    for (const auto& a : np.attributes) add_attribute(np.head, a);
  }

  void add_attribute(const std::string& obj, const std::string& attr) {
    if (is_scene_region(obj) || !out_.objects.count(obj)) return;
    out_.attributes[obj].insert(normalize_term(attr));
  }

  void on_noun_phrase(const NounPhrase& np) {
    add_object(np);
    switch (state_) {
      case State::start:
        if (copula_ || pronoun_subject_) {
          // "There is a dog": existential, no subject.
          last_np_ = np.head;
          state_ = State::after_object;
          subjects_.clear();
          break;
        }
        subjects_ = {np.head};
        clause_subjects_ = subjects_;
        state_ = State::after_subject;
        break;
      case State::after_subject:
        if (coordinating_) {
          subjects_.push_back(np.head);
          clause_subjects_ = subjects_;
          coordinating_ = false;
        } else {
          // "The dog is a puppy": copular noun, no relation.
          last_np_ = np.head;
          state_ = State::after_object;
        }
        break;
      case State::expect_object:
        for (const auto& s : subjects_) {
          if (s != np.head) out_.relations.insert({s, predicate_, np.head});
        }
        state_ = State::after_object;
        break;
      case State::after_object:
        break;
    }
    last_np_ = np.head;
  }

  void on_verb(const std::string& lemma) {
    const bool participle = !copula_ && state_ == State::after_object;
    if (participle && last_np_) subjects_ = {*last_np_};
    if (lemma == "be") {
      copula_ = true;
      return;
    }
    predicate_ = lemma;
    state_ = subjects_.empty() ? State::start : State::expect_object;
    copula_ = false;
    coordinating_ = false;
  }

  TupleSet& out_;
  State state_ = State::start;
  std::vector<std::string> subjects_;
  std::vector<std::string> clause_subjects_;
  std::optional<std::string> last_np_;
  std::string predicate_;
  bool coordinating_ = false;
  bool copula_ = false;
  bool pronoun_subject_ = false;
};

}  // namespace

TupleSet extract_tuples(const std::vector<std::string>& sentences, const ParserOptions& options) {
  TupleSet out;
  for (const auto& s : sentences) {
    ClauseReader reader(out);
    reader.read(chunk(tokenize(s, options)));
  }
  // Relations may name objects found later in the same caption; drop any whose
  // endpoints never became objects.
  std::erase_if(out.relations, [&](const Relation& r) {
    auto ok = [&](const std::string& t) { return out.objects.count(t) || is_scene_region(t); };
    return !ok(r.subject) || !ok(r.object);
  });
  return out;
}

}  // namespace vindex::caption
