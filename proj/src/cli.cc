// Copyright 2026 The acthook Authors.
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

#include "acthook/cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "acthook/detection.h"
#include "acthook/entropy.h"
#include "acthook/errors.h"
#include "acthook/injection.h"
#include "acthook/json_io.h"
#include "acthook/llm_client.h"
#include "acthook/rng.h"
#include "acthook/scheme.h"
#include "acthook/sim_agent.h"
#include "acthook/stats.h"
#include "acthook/trajectory.h"
#include "acthook/version.h"

namespace acthook::cli {
namespace {

constexpr std::string_view kSubcommands[] = {"inject", "detect", "plan",
                                             "simulate", "entropy", "schemes"};

Json tool_json() { return {{"name", kToolName}, {"version", kVersion}}; }

Json nullable(const std::string& s) { return s.empty() ? Json(nullptr) : Json(s); }

SchemeRegistry load_registry(const std::vector<std::string>& scheme_files) {
  SchemeRegistry reg = builtin_schemes();
  for (const auto& path : scheme_files) reg.add(load_scheme_file(path));
  return reg;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

// ---------------------------------------------------------------- inject

struct InjectArgs {
  std::string in, out, scheme, key, generator = "fallback", manifest, prior_manifest;
  std::string endpoint, model, report;
  double ratio = 0.0;
  uint64_t seed = 0;
  std::size_t workers = 1;
  std::vector<std::string> scheme_files;
};

Json config_json(const InjectArgs& a) {
  Json j = Json::object();
  j["in"] = a.in;
  j["out"] = a.out;
  j["scheme"] = a.scheme;
  j["scheme_files"] = a.scheme_files;
  j["ratio"] = a.ratio;
  j["key"] = a.key;
  j["seed"] = a.seed;
  j["generator"] = a.generator;
  j["manifest"] = a.manifest;
  j["prior_manifest"] = nullable(a.prior_manifest);
  j["workers"] = a.workers;
  if (a.generator == "llm") j["endpoint"] = endpoint_to_json(endpoint_from_env(a.endpoint, a.model));
  return j;
}

int run_inject(InjectArgs a, std::ostream& out, std::ostream& err) {
  if (a.key.empty()) throw ArgumentError("--key must not be empty");
  const GeneratorKind kind = generator_kind_from_string(a.generator);
  if (kind == GeneratorKind::kFallback && (!a.endpoint.empty() || !a.model.empty())) {
    throw ArgumentError("--endpoint/--model only apply with --generator llm");
  }
  if (kind == GeneratorKind::kLlm && (a.endpoint.empty() || a.model.empty())) {
    throw ArgumentError("--generator llm needs --endpoint and --model");
  }
  if (a.manifest.empty()) a.manifest = a.out + ".manifest.json";
  if (a.manifest == a.out || a.in == a.manifest) {
    throw ArgumentError("--manifest must differ from --in and --out");
  }

  const SchemeRegistry reg = load_registry(a.scheme_files);
  const WatermarkScheme& scheme = reg.at(a.scheme);

  std::unique_ptr<HookGenerator> gen;
  if (kind == GeneratorKind::kLlm) {
    gen = std::make_unique<LlmHookGenerator>(
        std::make_shared<const LlmClient>(endpoint_from_env(a.endpoint, a.model)));
  } else {
    gen = std::make_unique<FallbackGenerator>();
  }

  std::optional<WatermarkManifest> prior;
  if (!a.prior_manifest.empty()) {
    prior = manifest_from_json(Json::parse(read_file(a.prior_manifest)));
  }

  const Dataset input = parse_dataset(read_file(a.in));
  InjectOptions options;
  options.max_workers = std::max<std::size_t>(a.workers, 1);
  options.prior = prior ? &*prior : nullptr;
  const InjectionOutput result =
      inject_dataset(input, a.ratio, scheme, a.key, a.seed, *gen, options);
  for (const auto& w : result.warnings) err << "acthook: warning: " << w << "\n";

  Json manifest = manifest_to_json(result.manifest);
  manifest["tool"] = tool_json();
  manifest["config"] = config_json(a);

  write_file_atomic(a.out, serialize_dataset(result.dataset));
  write_file_atomic(a.manifest, dump_report(manifest));

  std::size_t llm_hooks = 0;
  for (const auto& e : result.manifest.entries) {
    if (e.generator_used == GeneratorKind::kLlm) ++llm_hooks;
  }
  Json summary = Json::object();
  summary["tool"] = tool_json();
  summary["command"] = "inject";
  summary["seed"] = a.seed;
  summary["trajectories"] = input.size();
  summary["eligible"] = result.eligible_count;
  summary["target_count"] = result.manifest.target_count;
  summary["injected"] = result.manifest.entries.size();
  summary["llm_hooks"] = llm_hooks;
  summary["out"] = a.out;
  summary["manifest"] = a.manifest;
  summary["warnings"] = result.warnings;
  emit(a.report, dump_report(summary), out);
  return kOk;
}

// ---------------------------------------------------------------- detect

struct DetectArgs {
  std::string agent, prompts, scheme, key, sham = "OK!", out;
  std::string negatives, reference_agent, scores_out;
  std::string model, agent_system, action_format = "auto";
  bool sham_negatives = false;
  std::size_t n_prompts = 1, queries = 8, repeats = 1, max_steps = 10;
  std::size_t max_in_flight = 8, retries = 2;
  int64_t backoff_ms = 500;
  uint64_t seed = 0;
  std::vector<std::string> scheme_files;
};

Json config_json(const DetectArgs& a) {
  Json j = Json::object();
  j["agent"] = a.agent;
  j["prompts"] = a.prompts;
  j["scheme"] = a.scheme;
  j["scheme_files"] = a.scheme_files;
  j["key"] = a.key;
  j["sham"] = a.sham;
  j["n_prompts"] = a.n_prompts;
  j["queries"] = a.queries;
  j["repeats"] = a.repeats;
  j["seed"] = a.seed;
  j["negatives"] = nullable(a.negatives);
  j["reference_agent"] = nullable(a.reference_agent);
  j["sham_negatives"] = a.sham_negatives;
  j["max_in_flight"] = a.max_in_flight;
  j["retries"] = a.retries;
  j["backoff_ms"] = a.backoff_ms;
  if (a.agent.starts_with("http:") || a.reference_agent.starts_with("http:")) {
    j["model"] = a.model;
    j["agent_system"] = nullable(a.agent_system);
    j["action_format"] = a.action_format;
    j["max_steps"] = a.max_steps;
    j["api_key_set"] = !endpoint_from_env("", "").api_key.empty();
  }
  return j;
}

std::vector<std::string> read_prompts(const std::string& path, std::size_t n) {
  std::istringstream in(read_file(path));
  std::vector<std::string> prompts;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    prompts.push_back(std::move(line));
  }
  if (prompts.size() < n) {
    throw ArgumentError("--n-prompts " + std::to_string(n) + " but " + path + " has only " +
                        std::to_string(prompts.size()) + " prompts");
  }
  prompts.resize(n);
  return prompts;
}

AgentHandle make_agent(const std::string& descriptor, const WatermarkScheme& scheme,
                       const SchemeRegistry& reg, const DetectArgs& a) {
  if (descriptor.starts_with("sim:")) {
    SimAgentConfig cfg = load_sim_config(descriptor.substr(4));
    if (!cfg.sham) cfg.sham = a.sham;
    validate(cfg);
    const WatermarkScheme& emits = cfg.scheme_name.empty() ? scheme : reg.at(cfg.scheme_name);
    return make_sim_agent(std::move(cfg), emits);
  }
  if (descriptor.starts_with("http:")) {
    if (a.model.empty()) throw ArgumentError("an http: agent needs --model");
    std::string url = descriptor.substr(5);
    // "http:http://host/v1" and "http://host/v1" are both accepted.
    if (!url.starts_with("http://") && !url.starts_with("https://")) url = "http:" + url;
    EndpointConfig ec = endpoint_from_env(url, a.model);
    ec.max_retries = 0;  // probe retries instead
    ec.max_in_flight = a.max_in_flight;
    Scaffold scaffold;
    if (!a.agent_system.empty()) scaffold.system_prompt = read_file(a.agent_system);
    scaffold.format = action_format_from_string(a.action_format);
    scaffold.max_steps = a.max_steps;
    return remote_agent(std::make_shared<const LlmClient>(std::move(ec)), std::move(scaffold));
  }
  throw ArgumentError("agent must be sim:<config.json> or http:<endpoint>, got \"" + descriptor +
                      "\"");
}

std::vector<double> read_scores(const std::string& path) {
  Json j = Json::parse(read_file(path));
  if (j.is_object() && j.contains("scores")) j = j.at("scores");
  if (!j.is_array()) throw SchemaError(0, path + ": expected a JSON array of numbers");
  std::vector<double> scores;
  for (const auto& v : j) {
    if (!v.is_number()) throw SchemaError(0, path + ": expected a JSON array of numbers");
    scores.push_back(v.get<double>());
  }
  return scores;
}

uint64_t repeat_seed(uint64_t seed, std::size_t r) {
  return r == 0 ? seed : derive_seed(seed, {fnv1a64("repeat"), r});
}

int run_detect(const DetectArgs& a, std::ostream& out) {
  const int negative_sources =
      !a.negatives.empty() + !a.reference_agent.empty() + (a.sham_negatives ? 1 : 0);
  if (negative_sources > 1) {
    throw ArgumentError("--negatives, --reference-agent and --sham-negatives are exclusive");
  }
  if (a.key.empty()) throw ArgumentError("--key must not be empty");
  if (a.repeats == 0) throw ArgumentError("--repeats must be >= 1");
  if (a.backoff_ms < 0) throw ArgumentError("--backoff-ms must be >= 0");

  const SchemeRegistry reg = load_registry(a.scheme_files);
  const WatermarkScheme& scheme = reg.at(a.scheme);
  const std::vector<std::string> prompts = read_prompts(a.prompts, a.n_prompts);
  const AgentHandle agent = make_agent(a.agent, scheme, reg, a);

  ProbeOptions options;
  options.max_in_flight = std::max<std::size_t>(a.max_in_flight, 1);
  options.retries = a.retries;
  options.backoff = std::chrono::milliseconds(a.backoff_ms);

  std::vector<ProbeReport> reports;
  std::vector<double> scores;
  for (std::size_t r = 0; r < a.repeats; ++r) {
    reports.push_back(
        probe(agent, prompts, scheme, a.key, a.sham, a.queries, repeat_seed(a.seed, r), options));
    scores.push_back(activation_score(reports.back()));
  }

  Json report = Json::object();
  report["tool"] = tool_json();
  report["command"] = "detect";
  report["seed"] = a.seed;
  report["config"] = config_json(a);
  report["agent"] = agent.description;
  report["scheme"] = scheme.name;
  const Json probe_json = probe_report_to_json(reports.front());
  for (const auto& [k, v] : probe_json.items()) report[k] = v;

  if (a.repeats > 1) {
    Json reps = Json::array();
    for (std::size_t r = 0; r < reports.size(); ++r) {
      const ProbeReport& p = reports[r];
      reps.push_back({{"seed", repeat_seed(a.seed, r)},
                      {"q_k", report_number(p.q_k)},
                      {"q_c", report_number(p.q_c)},
                      {"delta_q", report_number(p.delta_q)},
                      {"t", p.t_value ? report_number(*p.t_value) : Json(nullptr)},
                      {"p", p.p_value ? report_number(*p.p_value) : Json(nullptr)}});
    }
    report["repeats"] = std::move(reps);
  }
  Json score_json = Json::array();
  for (double s : scores) score_json.push_back(report_number(s));
  report["scores"] = score_json;

  if (negative_sources == 1) {
    std::vector<double> negatives;
    std::string source;
    if (!a.negatives.empty()) {
      negatives = read_scores(a.negatives);
      source = "file";
    } else if (!a.reference_agent.empty()) {
      const AgentHandle ref = make_agent(a.reference_agent, scheme, reg, a);
      const uint64_t ref_seed = derive_seed(a.seed, "reference");
      for (std::size_t r = 0; r < a.repeats; ++r) {
        negatives.push_back(activation_score(probe(ref, prompts, scheme, a.key, a.sham, a.queries,
                                                   repeat_seed(ref_seed, r), options)));
      }
      source = "reference_agent";
    } else {
      for (const auto& p : reports) negatives.push_back(p.q_sham - p.q_c);
      source = "sham_key";
    }
    report["auc"] = {{"value", report_number(auc(scores, negatives))},
                     {"negatives_source", source},
                     {"positives", scores.size()},
                     {"negatives", negatives.size()}};
  }

  if (!a.scores_out.empty()) write_file_atomic(a.scores_out, dump_report(score_json));
  emit(a.out, dump_report(report), out);
  return kOk;
}

// ---------------------------------------------------------------- plan / simulate

Json plan_json(const DetectionPlan& p) {
  Json j = Json::object();
  j["q_c"] = report_number(p.q_c);
  j["q_k"] = report_number(p.q_k);
  j["alpha"] = report_number(p.alpha);
  j["beta"] = report_number(p.beta);
  j["bound"] = report_number(p.bound);
  j["n_required"] = p.n_required;
  j["threshold_gamma"] = report_number(p.threshold_gamma);
  j["normal_approx_ok"] = p.normal_approx_ok;
  j["exact_threshold"] = p.exact_threshold ? Json(*p.exact_threshold) : Json(nullptr);
  return j;
}

Json power_json(const PowerEstimate& e) {
  return {{"trials", e.trials},
          {"fpr", report_number(e.fpr)},
          {"fnr", report_number(e.fnr)},
          {"fpr_se", report_number(e.fpr_se)},
          {"fnr_se", report_number(e.fnr_se)}};
}

struct PlanArgs {
  double qc = 0.0, qk = 0.0, alpha = 0.05, beta = 0.05;
  bool validate = false;
  std::size_t trials = 100000, workers = 1;
  uint64_t seed = 7;
  std::string out;
};

int run_plan(const PlanArgs& a, std::ostream& out) {
  const DetectionPlan plan = required_samples(a.qc, a.qk, a.alpha, a.beta);
  Json config = {{"qc", a.qc}, {"qk", a.qk},         {"alpha", a.alpha},     {"beta", a.beta},
                 {"validate", a.validate}, {"trials", a.trials}, {"seed", a.seed}};
  Json report = Json::object();
  report["tool"] = tool_json();
  report["command"] = "plan";
  report["seed"] = a.seed;
  report["config"] = std::move(config);
  report["plan"] = plan_json(plan);
  if (a.validate) {
    if (a.trials == 0) throw ArgumentError("--trials must be >= 1");
    const PowerEstimate mc = monte_carlo_power_at(a.qc, a.qk, plan.n_required,
                                                  plan.threshold_gamma, a.trials, a.seed,
                                                  std::max<std::size_t>(a.workers, 1));
    const ExactErrors exact =
        exact_error_rates(a.qc, a.qk, plan.n_required, plan.threshold_gamma);
    const double t = static_cast<double>(a.trials);
    const double fpr_tol = a.alpha + 3.0 * std::sqrt(a.alpha * (1.0 - a.alpha) / t);
    const double fnr_tol = a.beta + 3.0 * std::sqrt(a.beta * (1.0 - a.beta) / t);
    Json v = power_json(mc);
    v["n"] = plan.n_required;
    v["gamma"] = report_number(plan.threshold_gamma);
    v["exact_fpr"] = report_number(exact.fpr);
    v["exact_fnr"] = report_number(exact.fnr);
    v["fpr_within_alpha"] = mc.fpr <= fpr_tol;
    v["fnr_within_beta"] = mc.fnr <= fnr_tol;
    report["validation"] = std::move(v);
  }
  emit(a.out, dump_report(report), out);
  return kOk;
}

struct SimulateArgs {
  double qc = 0.0, qk = 0.0, alpha = 0.05, beta = 0.05;
  std::size_t n = 0, trials = 100000, workers = 1;
  std::optional<double> gamma;
  uint64_t seed = 7;
  std::string out;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.trials == 0) throw ArgumentError("--trials must be >= 1");
  const std::size_t n = a.n > 0 ? a.n : required_samples(a.qc, a.qk, a.alpha, a.beta).n_required;
  const double gamma = a.gamma ? *a.gamma : planner_gamma(a.qc, n, a.alpha);
  const PowerEstimate mc =
      monte_carlo_power_at(a.qc, a.qk, n, gamma, a.trials, a.seed, std::max<std::size_t>(a.workers, 1));
  const ExactErrors exact = exact_error_rates(a.qc, a.qk, n, gamma);

  Json config = {{"qc", a.qc},         {"qk", a.qk},         {"alpha", a.alpha},
                 {"beta", a.beta},     {"n", a.n},           {"gamma", a.gamma ? Json(*a.gamma) : Json(nullptr)},
                 {"trials", a.trials}, {"seed", a.seed}};
  Json report = Json::object();
  report["tool"] = tool_json();
  report["command"] = "simulate";
  report["seed"] = a.seed;
  report["config"] = std::move(config);
  report["n"] = n;
  report["gamma"] = report_number(gamma);
  report["monte_carlo"] = power_json(mc);
  report["exact"] = {{"fpr", report_number(exact.fpr)}, {"fnr", report_number(exact.fnr)}};
  emit(a.out, dump_report(report), out);
  return kOk;
}

// ---------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string records, mode = "renormalized_topk", out, csv, actions_from;
  std::size_t max_offset = 30;
};

std::vector<std::string> read_actions(const std::string& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error&) {
    // Not a single JSON document: treat as a trajectory JSONL file.
    std::vector<std::string> actions;
    for (const auto& t : parse_dataset(text).trajectories) {
      for (auto& act : actions_of(t)) actions.push_back(std::move(act));
    }
    return actions;
  }
  if (j.is_object() && j.contains("steps")) return actions_of(parse_trajectory(text));
  if (!j.is_array()) throw SchemaError(0, path + ": expected an array of action strings");
  std::vector<std::string> actions;
  for (const auto& v : j) actions.push_back(v.get<std::string>());
  return actions;
}

int run_entropy(const EntropyArgs& a, std::ostream& out, std::ostream& err) {
  const EntropyMode mode = entropy_mode_from_string(a.mode);
  std::vector<TokenRecord> records = parse_token_records(read_file(a.records));
  if (!a.actions_from.empty()) {
    const auto actions = read_actions(a.actions_from);
    const std::size_t found = mark_boundaries_from_actions(records, actions);
    if (found < actions.size()) {
      err << "acthook: warning: located " << found << " of " << actions.size()
          << " actions in the token stream\n";
    }
  }
  const EntropyProfile profile = boundary_profile(records, a.max_offset, mode);

  Json report = Json::object();
  report["tool"] = tool_json();
  report["command"] = "entropy";
  report["config"] = {{"records", a.records},
                      {"mode", a.mode},
                      {"max_offset", a.max_offset},
                      {"actions_from", nullable(a.actions_from)}};
  const Json profile_json = profile_to_json(profile);
  for (const auto& [k, v] : profile_json.items()) report[k] = v;
  if (!a.csv.empty()) write_file_atomic(a.csv, profile_csv(profile));
  emit(a.out, dump_report(report), out);
  return kOk;
}

// ---------------------------------------------------------------- schemes

struct SchemesArgs {
  std::string describe;
  std::vector<std::string> scheme_files;
};

int run_schemes(const SchemesArgs& a, std::ostream& out) {
  const SchemeRegistry reg = load_registry(a.scheme_files);
  if (!a.describe.empty()) {
    out << dump_report(scheme_to_json(reg.at(a.describe)));
    return kOk;
  }
  for (const auto& name : reg.names()) out << name << "\n";
  return kOk;
}

// ---------------------------------------------------------------- config file

// Splices `--config <file>` into the argument list. Keys name long flags
// (underscores or dashes); values are scalars or arrays of scalars. The
// spliced flags come first so explicit flags take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (auto it = args.begin(); it != args.end();) {
    if (*it == "--config") {
      if (std::next(it) == args.end()) throw CLI::ArgumentMismatch("--config needs a path");
      path = *std::next(it);
      it = args.erase(it, it + 2);
    } else if (it->starts_with("--config=")) {
      path = it->substr(9);
      it = args.erase(it);
    } else {
      ++it;
    }
  }
  if (path.empty()) return args;

  Json cfg;
  try {
    cfg = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw CLI::ValidationError("--config", path + ": " + e.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", path + ": expected a JSON object");

  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& s) {
    return std::find(std::begin(kSubcommands), std::end(kSubcommands), s) !=
           std::end(kSubcommands);
  });
  std::vector<std::string> spliced;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "subcommand") {
      if (sub == args.end()) spliced.insert(spliced.begin(), value.get<std::string>());
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto scalar = [&](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_unsigned()) return std::to_string(v.get<uint64_t>());
      if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
      if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
      }
      throw CLI::ValidationError("--config", "unsupported value for \"" + key + "\"");
    };
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) spliced.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        spliced.push_back(flag);
        spliced.push_back(scalar(v));
      }
    } else {
      spliced.push_back(flag);
      spliced.push_back(scalar(value));
    }
  }
  if (sub == args.end()) {
    // Subcommand, if any, came from the config and leads `spliced`.
    spliced.insert(spliced.end(), args.begin(), args.end());
    return spliced;
  }
  args.insert(std::next(sub), spliced.begin(), spliced.end());
  return args;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavior-level watermarks for agent trajectory datasets", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // --config is handled before parsing; declared here for --help.
  std::string config_unused;
  app.add_option("--config", config_unused, "JSON file of flag values; explicit flags win");

  InjectArgs ia;
  auto* inject = app.add_subcommand("inject", "Insert hook actions into a trajectory dataset");
  inject->add_option("--in", ia.in, "Input JSONL dataset")->required();
  inject->add_option("--out", ia.out, "Output JSONL dataset")->required();
  inject->add_option("--scheme", ia.scheme, "Scheme name")->required();
  inject->add_option("--ratio", ia.ratio, "Watermark ratio R")->required()->check(CLI::Range(0.0, 1.0));
  inject->add_option("--key", ia.key, "Activation key appended to watermarked tasks")->required();
  inject->add_option("--seed", ia.seed, "Seed")->required();
  inject->add_option("--generator", ia.generator, "Hook generator")
      ->check(CLI::IsMember({"fallback", "llm"}));
  inject->add_option("--manifest", ia.manifest, "Manifest path (default <out>.manifest.json)");
  inject->add_option("--prior-manifest", ia.prior_manifest,
                     "Manifest of an earlier pass; its trajectories are skipped");
  inject->add_option("--endpoint", ia.endpoint, "Chat-completions base URL for --generator llm");
  inject->add_option("--model", ia.model, "Model name for --generator llm");
  inject->add_option("--workers", ia.workers, "Concurrent generator calls");
  inject->add_option("--report", ia.report, "Write the run summary here instead of stdout");
  inject->add_option("--scheme-file", ia.scheme_files, "Custom scheme descriptor (repeatable)");

  DetectArgs da;
  auto* detect = app.add_subcommand("detect", "Probe a suspect agent for the watermark");
  detect->add_option("--agent", da.agent, "sim:<config.json> or http:<endpoint>")->required();
  detect->add_option("--prompts", da.prompts, "Probe prompts, one per line")->required();
  detect->add_option("--scheme", da.scheme, "Scheme name")->required();
  detect->add_option("--key", da.key, "Activation key")->required();
  detect->add_option("--sham", da.sham, "Sham key");
  detect->add_option("--n-prompts", da.n_prompts, "Prompts N")->check(CLI::PositiveNumber);
  detect->add_option("--queries", da.queries, "Queries Q per prompt and variant")
      ->check(CLI::PositiveNumber);
  detect->add_option("--repeats", da.repeats, "Independent probes (score population size)");
  detect->add_option("--seed", da.seed, "Seed");
  detect->add_option("--out", da.out, "Report path (default stdout)");
  detect->add_option("--negatives", da.negatives, "JSON array of negative scores for AUC");
  detect->add_option("--reference-agent", da.reference_agent,
                     "Clean agent whose scores serve as AUC negatives");
  detect->add_flag("--sham-negatives", da.sham_negatives,
                   "Use sham-key scores of the suspect agent as AUC negatives");
  detect->add_option("--scores-out", da.scores_out, "Write the score population here");
  detect->add_option("--model", da.model, "Model name for http: agents");
  detect->add_option("--agent-system", da.agent_system, "System prompt file for http: agents");
  detect->add_option("--action-format", da.action_format, "Action extraction for http: agents")
      ->check(CLI::IsMember({"auto", "code_tags", "function_tags", "fenced_code"}));
  detect->add_option("--max-steps", da.max_steps, "Actions kept per response");
  detect->add_option("--max-in-flight", da.max_in_flight, "Concurrent agent calls");
  detect->add_option("--retries", da.retries, "Retries per failed call");
  detect->add_option("--backoff-ms", da.backoff_ms, "Initial retry backoff");
  detect->add_option("--scheme-file", da.scheme_files, "Custom scheme descriptor (repeatable)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Queries needed to separate q_c from q_k");
  plan->add_option("--qc", pa.qc, "Hook rate without key")->required();
  plan->add_option("--qk", pa.qk, "Hook rate with key")->required();
  plan->add_option("--alpha", pa.alpha, "False positive target");
  plan->add_option("--beta", pa.beta, "False negative target");
  plan->add_flag("--validate", pa.validate, "Check the plan by Monte Carlo");
  plan->add_option("--trials", pa.trials, "Monte Carlo trials");
  plan->add_option("--seed", pa.seed, "Seed");
  plan->add_option("--workers", pa.workers, "Monte Carlo threads (results do not depend on it)");
  plan->add_option("--out", pa.out, "Report path (default stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error rates of the threshold test");
  simulate->add_option("--qc", sa.qc, "Hook rate without key")->required();
  simulate->add_option("--qk", sa.qk, "Hook rate with key")->required();
  simulate->add_option("--alpha", sa.alpha, "False positive target");
  simulate->add_option("--beta", sa.beta, "False negative target");
  simulate->add_option("--n", sa.n, "Queries per probe (default: planned)");
  simulate->add_option("--gamma", sa.gamma, "Rate threshold (default: planner's)");
  simulate->add_option("--trials", sa.trials, "Monte Carlo trials");
  simulate->add_option("--seed", sa.seed, "Seed");
  simulate->add_option("--workers", sa.workers, "Threads (results do not depend on it)");
  simulate->add_option("--out", sa.out, "Report path (default stdout)");

  EntropyArgs ea;
  auto* entropy = app.add_subcommand("entropy", "Token entropy around action boundaries");
  entropy->add_option("--records", ea.records, "Logprob capture JSONL")->required();
  entropy->add_option("--mode", ea.mode, "Estimator")
      ->check(CLI::IsMember({"renormalized_topk", "tail_floor"}));
  entropy->add_option("--out", ea.out, "Profile JSON path (default stdout)");
  entropy->add_option("--csv", ea.csv, "Also write offset,mean,count CSV here");
  entropy->add_option("--max-offset", ea.max_offset, "Largest offset profiled");
  entropy->add_option("--actions-from", ea.actions_from,
                      "Mark boundaries from these action texts (JSON array or trajectory)");

  SchemesArgs ca;
  auto* schemes = app.add_subcommand("schemes", "List registered schemes");
  schemes->add_option("--describe", ca.describe, "Print one scheme's descriptor");
  schemes->add_option("--scheme-file", ca.scheme_files, "Custom scheme descriptor (repeatable)");

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const std::exception& e) {
    err << "acthook: error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*inject) return run_inject(ia, out, err);
    if (*detect) return run_detect(da, out);
    if (*plan) return run_plan(pa, out);
    if (*simulate) return run_simulate(sa, out);
    if (*entropy) return run_entropy(ea, out, err);
    if (*schemes) return run_schemes(ca, out);
  } catch (const ArgumentError& e) {
    err << "acthook: usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "acthook: error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), std::cout, std::cerr);
}

}  // namespace acthook::cli
