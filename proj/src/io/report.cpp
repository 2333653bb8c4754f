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

#include "vindex/io/report.hpp"

#include <set>
#include <sstream>

namespace vindex::io {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json category_json(const caption::CategoryReport& c, bool with_trace) {
  json j = {{"precision", c.scores.precision}, {"recall", c.scores.recall}, {"f1", c.scores.f1},
            {"matched", c.n_matched},          {"candidate", c.n_candidate}, {"reference", c.n_reference}};
  if (with_trace) {
    j["trace"] = json::array();
    for (const auto& p : c.trace)
      j["trace"].push_back({{"candidate", p.candidate},
                            {"reference", p.reference},
                            {"stage", std::string(caption::to_string(p.stage))},
                            {"similarity", p.similarity}});
  }
  return j;
}

json group_json(const GroupScore& g) {
  return {{"count", g.count}, {"acc", optional_number(g.acc)}, {"mean_iou", optional_number(g.mean_iou)}};
}

void flatten(const json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
    return;
  }
  std::string value;
  if (j.is_string()) {
    value = j.get<std::string>();
    if (value.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : value) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      value = q + "\"";
    }
  } else if (!j.is_null()) {
    value = j.dump();
  }
  out << path << ',' << value << '\n';
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw FormatError(where + ": unknown key '" + k + "'");
}

template <typename T>
void read_number(const json& j, const char* key, T& target, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw FormatError(where + ": '" + key + "' must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (it->get<long long>() < 0) throw FormatError(where + ": '" + key + "' must be non-negative");
    }
    target = it->get<T>();
  } else {
    if (!it->is_number()) throw FormatError(where + ": '" + key + "' must be a number");
    target = it->get<T>();
  }
}

void read_bool(const json& j, const char* key, bool& target, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_boolean()) throw FormatError(where + ": '" + key + "' must be a boolean");
  target = it->get<bool>();
}

}  // namespace

json to_json(const caption::MatchReport& report, bool with_trace) {
  return {{"object", category_json(report.object, with_trace)},
          {"attribute", category_json(report.attribute, with_trace)},
          {"relation", category_json(report.relation, with_trace)},
          {"missing_terms", report.missing_terms}};
}

json to_json(const CategoryReport& report) {
  return {{"threshold", report.threshold},
          {"all", group_json(report.all)},
          {"salient", group_json(report.salient)},
          {"salient_creatures", group_json(report.salient_creatures)},
          {"salient_objects", group_json(report.salient_objects)},
          {"inconspicuous", group_json(report.inconspicuous)}};
}

json to_json(const SQAScore& score) {
  return {{"total", score.total},
          {"correct", score.correct},
          {"accuracy", score.accuracy},
          {"present_accuracy", optional_number(score.present_accuracy)},
          {"probe_accuracy", optional_number(score.probe_accuracy)}};
}

json to_json(const align::GradCheckReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name}, {"size", e.size}, {"max_rel_error", e.max_rel_error}});
  return {{"entries", entries},
          {"max_rel_error", report.max_rel_error},
          {"tolerance", report.tolerance},
          {"checked", report.checked},
          {"passed", report.passed()}};
}

json history_summary(const align::TrainHistory& history) {
  json j = {{"steps", history.steps.size()}};
  if (history.steps.empty()) return j;
  const auto& first = history.steps.front();
  const auto& last = history.steps.back();
  j["initial_regression"] = first.regression;
  j["final_regression"] = last.regression;
  j["regression_ratio"] = first.regression > 0 ? json(last.regression / first.regression) : json(nullptr);
  j["initial_total"] = first.total;
  j["final_total"] = last.total;
  j["final_denoise"] = optional_number(last.denoise);
  j["late_window_variance"] = align::late_window_variance(history);
  double lr_max = 0.0;
  for (const auto& s : history.steps) lr_max = std::max(lr_max, s.lr);
  j["peak_lr"] = lr_max;
  j["final_lr"] = last.lr;
  return j;
}

std::string history_csv(const align::TrainHistory& history) {
  std::ostringstream out;
  out << "step,regression,denoise,total,lr\n";
  for (std::size_t i = 0; i < history.steps.size(); ++i) {
    const auto& s = history.steps[i];
    out << i << ',' << json(s.regression).dump() << ',' << (s.denoise ? json(*s.denoise).dump() : "") << ','
        << json(s.total).dump() << ',' << json(s.lr).dump() << '\n';
  }
  return out.str();
}

std::string render(const json& report, ReportFormat format) {
  if (format == ReportFormat::json) return report.dump(2) + "\n";
  std::ostringstream out;
  out << "key,value\n";
  flatten(report, "", out);
  return out.str();
}

AlignRunConfig parse_align_config(const json& j) {
  AlignRunConfig c;
  const std::string where = "config";
  check_keys(j,
             {"seed", "beta", "lr_max", "steps", "batch_size", "mask_ratio", "timesteps", "weight_decay", "adam_betas",
              "encoder_hidden", "stratified_timesteps", "denoiser", "task"},
             where);
  auto& t = c.train;
  read_number(j, "seed", t.seed, where);
  read_number(j, "beta", t.beta, where);
  read_number(j, "lr_max", t.lr_max, where);
  read_number(j, "steps", t.steps, where);
  read_number(j, "batch_size", t.batch_size, where);
  read_number(j, "mask_ratio", t.mask_ratio, where);
  read_number(j, "timesteps", t.timesteps, where);
  read_number(j, "weight_decay", t.adamw.weight_decay, where);
  read_number(j, "encoder_hidden", t.encoder_hidden, where);
  read_bool(j, "stratified_timesteps", t.stratified_timesteps, where);
  if (auto it = j.find("adam_betas"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
      throw FormatError(where + ": 'adam_betas' must be [beta1, beta2]");
    t.adamw.beta1 = (*it)[0].get<double>();
    t.adamw.beta2 = (*it)[1].get<double>();
  }
  if (auto it = j.find("denoiser"); it != j.end()) {
    const std::string w = where + ".denoiser";
    check_keys(*it, {"depth", "width", "time_dim", "identity_blocks"}, w);
    read_number(*it, "depth", t.denoiser.depth, w);
    read_number(*it, "width", t.denoiser.width, w);
    read_number(*it, "time_dim", t.denoiser.time_dim, w);
    read_bool(*it, "identity_blocks", t.denoiser.identity_blocks, w);
  }
  if (auto it = j.find("task"); it != j.end()) {
    const std::string w = where + ".task";
    check_keys(*it,
               {"seed", "input_length", "grid_height", "grid_width", "dim", "subjects", "samples_per_subject",
                "noise_sigma"},
               w);
    std::uint64_t seed = 0;
    if (it->contains("seed")) {
      read_number(*it, "seed", seed, w);
      c.task_seed = seed;
    }
    read_number(*it, "input_length", c.task.input_length, w);
    read_number(*it, "grid_height", c.task.grid_height, w);
    read_number(*it, "grid_width", c.task.grid_width, w);
    read_number(*it, "dim", c.task.dim, w);
    read_number(*it, "subjects", c.task.subjects, w);
    read_number(*it, "samples_per_subject", c.task.samples_per_subject, w);
    read_number(*it, "noise_sigma", c.task.noise_sigma, w);
  }
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  return c;
}

json to_json(const AlignRunConfig& c) {
  const auto& t = c.train;
  return {{"seed", t.seed},
          {"beta", t.beta},
          {"lr_max", t.lr_max},
          {"steps", t.steps},
          {"batch_size", t.batch_size},
          {"mask_ratio", t.mask_ratio},
          {"timesteps", t.timesteps},
          {"weight_decay", t.adamw.weight_decay},
          {"adam_betas", {t.adamw.beta1, t.adamw.beta2}},
          {"encoder_hidden", t.encoder_hidden},
          {"stratified_timesteps", t.stratified_timesteps},
          {"denoiser",
           {{"depth", t.denoiser.depth},
            {"width", t.denoiser.width},
            {"time_dim", t.denoiser.time_dim},
            {"identity_blocks", t.denoiser.identity_blocks}}},
          {"task",
           {{"seed", c.task_seed.value_or(t.seed)},
            {"input_length", c.task.input_length},
            {"grid_height", c.task.grid_height},
            {"grid_width", c.task.grid_width},
            {"dim", c.task.dim},
            {"subjects", c.task.subjects},
            {"samples_per_subject", c.task.samples_per_subject},
            {"noise_sigma", c.task.noise_sigma}}}};
}

}  // namespace vindex::io
