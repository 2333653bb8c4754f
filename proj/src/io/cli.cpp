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

#include "vindex/io/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "vindex/feature_spaces.hpp"
#include "vindex/io/formats.hpp"
#include "vindex/io/report.hpp"

namespace vindex::io {

using nlohmann::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string output;
  std::string format = "json";
  bool timing = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// --seed beats VINDEX_SEED beats the configured value.
std::uint64_t resolve_seed(const Globals& g, std::uint64_t configured) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("VINDEX_SEED"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw UsageError("VINDEX_SEED must be a non-negative integer");
    return v;
  }
  return configured;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw FormatError("cannot write '" + path + "'");
}

json header(const std::string& command) {
  return {{"tool", {{"name", "vindex"}, {"version", kToolVersion}}}, {"command", command}};
}

json digest_of(const std::string& path) {
  return {{"fnv1a64", fnv1a64_hex(read_file(path))}};
}

// ---------------------------------------------------------------- subcommands

struct ParseArgs {
  std::string input;
};

std::string cmd_parse(const ParseArgs& a) {
  std::istringstream in(read_file(a.input));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out += tuple_record_json(caption::extract_tuples(caption::split_sentences(line))) + "\n";
  }
  return out;
}

struct CaptionArgs {
  std::string pairs, lexicon, embeddings, averaging = "micro";
  bool flat_attributes = false, no_synonyms = false, no_semantic = false;
};

json cmd_eval_caption(const CaptionArgs& a, const Globals& g) {
  caption::MatchOptions options;
  options.threshold = g.threshold.value_or(0.5);
  options.attributes_require_object = !a.flat_attributes;
  options.use_synonyms = !a.no_synonyms;
  options.use_semantic = !a.no_semantic;
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");

  json report = header("eval-caption");
  report["inputs"]["pairs"] = digest_of(a.pairs);
  caption::SynonymLexicon lexicon;
  json warnings = json::array();
  if (!a.lexicon.empty()) {
    auto loaded = load_lexicon(a.lexicon);
    lexicon = std::move(loaded.lexicon);
    for (auto& w : loaded.warnings) warnings.push_back("lexicon: " + w);
    report["inputs"]["lexicon"] = digest_of(a.lexicon);
  }
  caption::EmbeddingTable table;
  if (!a.embeddings.empty()) {
    table = load_embedding_table(a.embeddings);
    report["inputs"]["embeddings"] = digest_of(a.embeddings);
  }

  const auto records = parse_caption_pairs(read_file(a.pairs));
  std::vector<std::pair<caption::TupleSet, caption::TupleSet>> sets;
  json per_pair = json::array();
  for (const auto& r : records) {
    try {
      sets.emplace_back(resolve_side(r.candidate), resolve_side(r.reference));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), r.line);
    }
    const auto m = caption::match_tuplesets(sets.back().first, sets.back().second, lexicon, table, options);
    per_pair.push_back({{"id", r.id}, {"scores", to_json(m)}});
  }
  const auto averaging = a.averaging == "macro" ? caption::Averaging::macro : caption::Averaging::micro;
  const auto corpus = caption::corpus_report(sets, lexicon, table, options, averaging);

  report["settings"] = {{"threshold", options.threshold},
                        {"averaging", a.averaging},
                        {"attributes_require_object", options.attributes_require_object},
                        {"use_synonyms", options.use_synonyms},
                        {"use_semantic", options.use_semantic}};
  report["caption"] = {{"corpus", to_json(corpus, false)}, {"pairs", per_pair}, {"count", records.size()}};
  report["warnings"] = warnings;
  return report;
}

struct GroundingArgs {
  std::string items;
  bool inclusive = false;
};

json cmd_eval_grounding(const GroundingArgs& a, const Globals& g) {
  const double m = g.threshold.value_or(0.5);
  if (!(m >= 0.0 && m <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  const auto rule = a.inclusive ? ThresholdRule::inclusive : ThresholdRule::strict;
  const auto items = parse_grounding_items(read_file(a.items));
  json report = header("eval-grounding");
  report["inputs"]["items"] = digest_of(a.items);
  report["settings"] = {{"threshold", m}, {"rule", a.inclusive ? "inclusive" : "strict"}};
  report["grounding"] = to_json(category_report(items, m, rule));
  json curve = json::object();
  for (int k = 1; k <= 9; ++k) {
    char key[8];
    std::snprintf(key, sizeof key, "0.%d", k);
    curve[key] = acc_at(items, k / 10.0, rule);
  }
  report["grounding"]["acc_curve"] = curve;
  return report;
}

struct SqaArgs {
  std::string items, responses;
};

json cmd_eval_sqa(const SqaArgs& a) {
  auto validated = validate_qa_set(parse_qa_items(read_file(a.items)));
  const auto responses = parse_qa_responses(read_file(a.responses));
  std::map<std::string, const QAItem*> by_id;
  for (const auto& it : validated.items)
    if (!by_id.emplace(it.id, &it).second) throw FormatError("duplicate item id '" + it.id + "'");
  std::map<std::string, std::string> answer_of;
  for (const auto& r : responses) {
    if (!by_id.count(r.id)) throw FormatError("response for unknown item '" + r.id + "'");
    if (!answer_of.emplace(r.id, r.response).second) throw FormatError("duplicate response for '" + r.id + "'");
  }
  std::vector<std::optional<std::size_t>> choices;
  std::size_t missing = 0, unparsed = 0;
  for (const auto& it : validated.items) {
    auto r = answer_of.find(it.id);
    if (r == answer_of.end()) {
      ++missing;
      choices.emplace_back();
      continue;
    }
    choices.push_back(parse_choice(r->second, it.options));
    if (!choices.back()) ++unparsed;
  }
  json report = header("eval-sqa");
  report["inputs"] = {{"items", digest_of(a.items)}, {"responses", digest_of(a.responses)}};
  report["sqa"] = to_json(score(validated.items, choices));
  report["sqa"]["present_items"] = validated.present;
  report["sqa"]["probe_items"] = validated.probes;
  report["sqa"]["missing_responses"] = missing;
  report["sqa"]["unparsed_responses"] = unparsed;
  report["warnings"] = validated.warnings;
  return report;
}

struct TransformArgs {
  std::string input, space = "se", tensor_out;
  std::optional<long> nf_level;
  std::size_t groups = 2;
};

json shape_json(const FeatureGridd& g) {
  return {{"height", g.height()}, {"width", g.width()}, {"dim", g.dim()}, {"tokens", g.token_count()},
          {"mean", g.tokens().mean()}};
}

std::vector<FeatureGridd> load_any_tensors(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.rfind("VFT1", 0) == 0) {
    std::istringstream in(bytes);
    return read_tensors(in);
  }
  auto grids = parse_feature_tensors(bytes);
  if (grids.empty()) throw FormatError("tensor: empty file");
  return grids;
}

json cmd_transform(const TransformArgs& a) {
  const auto inputs = load_any_tensors(a.input);
  std::vector<FeatureGridd> outputs;
  if (a.space == "se") {
    if (inputs.size() != 1) throw ShapeError("transform se: expected exactly one tensor");
    outputs.push_back(inputs.front());
  } else if (a.space == "me") {
    if (inputs.size() != 2) throw ShapeError("transform me: expected exactly two tensors");
    if (!inputs[0].same_shape(inputs[1])) throw ShapeError("transform me: tensors differ in shape");
    const auto& x = inputs[0];
    outputs.emplace_back(x.height(), 2 * x.width(), interleave(x.tokens(), inputs[1].tokens()));
  } else if (a.space == "af") {
    outputs.push_back(aggregate_layers(LayerStack<double>(inputs), a.groups));
  } else {
    if (inputs.size() != 1) throw ShapeError("transform nf: expected exactly one tensor");
    const auto nf = nested_sequence(inputs.front());
    if (a.nf_level)
      outputs.push_back(nf.with_tokens(*a.nf_level));
    else
      outputs = nf.levels;
  }
  if (!a.tensor_out.empty()) {
    std::ostringstream bin;
    for (const auto& g : outputs) write_tensor(bin, g);
    write_text(a.tensor_out, bin.str());
  }
  json report = header("transform");
  report["inputs"]["tensor"] = digest_of(a.input);
  report["settings"] = {{"space", a.space}};
  if (a.space == "af") report["settings"]["groups"] = a.groups;
  if (a.nf_level) report["settings"]["nf_level"] = *a.nf_level;
  json in = json::array(), out = json::array();
  for (const auto& g : inputs) in.push_back(shape_json(g));
  for (const auto& g : outputs) out.push_back(shape_json(g));
  report["transform"] = {{"input", in}, {"output", out}};
  return report;
}

struct TrainArgs {
  std::string config, history;
};

json cmd_train_align(const TrainArgs& a, const Globals& g) {
  json cfg_json = json::object();
  json report = header("train-align");
  if (!a.config.empty()) {
    const auto text = read_file(a.config);
    try {
      cfg_json = json::parse(text);
    } catch (const json::exception& e) {
      throw FormatError(std::string("config: ") + e.what());
    }
    report["inputs"]["config"] = {{"fnv1a64", fnv1a64_hex(text)}};
  }
  auto cfg = parse_align_config(cfg_json);
  cfg.train.seed = resolve_seed(g, cfg.train.seed);
  const auto task = align::make_synthetic_task(Seed{cfg.task_seed.value_or(cfg.train.seed)}, cfg.task);
  const auto result = align::train(task, cfg.train);
  const auto csv = history_csv(result.history);
  if (!a.history.empty()) write_text(a.history, csv);
  report["config"] = to_json(cfg);
  report["training"] = history_summary(result.history);
  report["training"]["history_fnv1a64"] = fnv1a64_hex(csv);
  report["training"]["generator_std"] = align::generator_std(task);
  return report;
}

struct GradArgs {
  double h = 1e-5;
  double beta = 1.0;
};

json cmd_gradcheck(const GradArgs& a, const Globals& g, bool& passed) {
  const auto seed = resolve_seed(g, 0);
  const auto r = align::gradient_check(Seed{seed}, a.h, a.beta);
  passed = r.passed();
  json report = header("gradcheck");
  report["settings"] = {{"seed", seed}, {"h", a.h}, {"beta", a.beta}};
  report["gradcheck"] = to_json(r);
  return report;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vindex: caption, grounding and QA evaluation plus brain-feature alignment", "vindex"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides VINDEX_SEED and config)");
  app.add_option("--threshold", g.threshold, "Semantic similarity or IoU threshold");
  app.add_option("--output", g.output, "Write the report here instead of standard output");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", g.timing, "Include wall-clock runtime in the report");

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Captions (one per line) to JSONL tuple records")->fallthrough();
  parse->add_option("input", pa.input, "Caption text file")->required();

  CaptionArgs ca;
  auto* caption = app.add_subcommand("eval-caption", "Tuple precision/recall/F1 over caption pairs")->fallthrough();
  caption->add_option("--pairs", ca.pairs, "caption-pair JSONL")->required();
  caption->add_option("--lexicon", ca.lexicon, "Synonym lexicon JSON");
  caption->add_option("--embeddings", ca.embeddings, "Word vectors, 'term v1 ... vd' per line");
  caption->add_option("--averaging", ca.averaging, "Corpus averaging")->check(CLI::IsMember({"micro", "macro"}));
  caption->add_flag("--flat-attributes", ca.flat_attributes, "Match attributes without requiring their object");
  caption->add_flag("--no-synonyms", ca.no_synonyms, "Skip the synonym stage");
  caption->add_flag("--no-semantic", ca.no_semantic, "Skip the embedding stage");

  GroundingArgs ga;
  auto* grounding = app.add_subcommand("eval-grounding", "acc@m and mean IoU by salience category")->fallthrough();
  grounding->add_option("--items", ga.items, "grounding-item JSONL")->required();
  grounding->add_flag("--inclusive", ga.inclusive, "Count IoU >= m instead of IoU > m");

  SqaArgs sa;
  auto* sqa = app.add_subcommand("eval-sqa", "Multiple-choice accuracy")->fallthrough();
  sqa->add_option("--items", sa.items, "qa-item JSONL")->required();
  sqa->add_option("--responses", sa.responses, "qa-response JSONL")->required();

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "Feature-space transforms of token grids")->fallthrough();
  transform->add_option("input", ta.input, "Tensor file (binary VFT1 or feature-tensor JSONL)")->required();
  transform->add_option("--space", ta.space, "Output space")->check(CLI::IsMember({"se", "me", "af", "nf"}));
  transform->add_option("--nf-level", ta.nf_level, "Token count of the nested level")
      ->check(CLI::PositiveNumber);
  transform->add_option("--groups", ta.groups, "Layer groups for aggregation")->check(CLI::PositiveNumber);
  transform->add_option("--tensor-out", ta.tensor_out, "Write output tensors (binary)");

  TrainArgs tra;
  auto* train = app.add_subcommand("train-align", "Train the brain encoder on the synthetic task")->fallthrough();
  train->add_option("--config", tra.config, "Training config JSON");
  train->add_option("--history", tra.history, "Write per-step history CSV");

  GradArgs gra;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every gradient")->fallthrough();
  grad->add_option("--step", gra.h, "Central-difference step")->check(CLI::PositiveNumber);
  grad->add_option("--beta", gra.beta, "Denoising weight")->check(CLI::NonNegativeNumber);

  std::vector<const char*> argv{"vindex"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    std::string text;
    int code = kOk;
    if (*parse) {
      text = cmd_parse(pa);
    } else {
      json report;
      if (*caption) report = cmd_eval_caption(ca, g);
      else if (*grounding) report = cmd_eval_grounding(ga, g);
      else if (*sqa) report = cmd_eval_sqa(sa);
      else if (*transform) report = cmd_transform(ta);
      else if (*train) report = cmd_train_align(tra, g);
      else {
        bool passed = false;
        report = cmd_gradcheck(gra, g, passed);
        if (!passed) code = kNumericalError;
      }
      if (g.timing)
        report["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      text = render(report, g.format == "csv" ? ReportFormat::csv : ReportFormat::json);
    }
    if (g.output.empty())
      out << text;
    else
      write_text(g.output, text);
    if (code == kNumericalError) err << "error: gradient check failed\n";
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const DegenerateMask& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace vindex::io
