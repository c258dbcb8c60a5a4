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

#include "acthook/sim_agent.h"

#include <fstream>

#include "acthook/errors.h"
#include "acthook/rng.h"

namespace acthook {

void validate(const SimAgentConfig& cfg) {
  if (cfg.key.empty()) throw ArgumentError("sim agent key must be non-empty");
  auto rate_ok = [](double q) { return q >= 0.0 && q <= 1.0; };
  if (!rate_ok(cfg.q_k) || !rate_ok(cfg.q_c) || !rate_ok(cfg.q_sham_trigger)) {
    throw ArgumentError("sim agent rates must lie in [0, 1]");
  }
  if (cfg.steps_min > cfg.steps_max) throw ArgumentError("steps_min exceeds steps_max");
  if (cfg.sham) {
    if (cfg.sham->empty()) throw ArgumentError("sham key must be non-empty");
    if (cfg.key.find(*cfg.sham) != std::string::npos) {
      throw ArgumentError("sham key \"" + *cfg.sham + "\" is a substring of the activation key");
    }
  }
}

SimAgentConfig sim_config_from_json(const Json& j) {
  try {
    SimAgentConfig cfg;
    cfg.key = j.at("key").get<std::string>();
    cfg.q_k = j.at("q_k").get<double>();
    cfg.q_c = j.at("q_c").get<double>();
    cfg.scheme_name = j.value("scheme_name", "");
    if (j.contains("steps_range")) {
      const auto& r = j.at("steps_range");
      cfg.steps_min = r.at(0).get<std::size_t>();
      cfg.steps_max = r.at(1).get<std::size_t>();
    }
    cfg.seed = j.value("seed", uint64_t{0});
    if (j.contains("sham")) cfg.sham = j.at("sham").get<std::string>();
    if (j.contains("sham_trigger")) {
      cfg.sham_trigger = j.at("sham_trigger").get<std::string>();
      cfg.q_sham_trigger = j.value("q_sham_trigger", 0.0);
    }
    validate(cfg);
    return cfg;
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("invalid sim agent config: ") + e.what());
  }
}

Json sim_config_to_json(const SimAgentConfig& cfg) {
  Json j = Json::object();
  j["key"] = cfg.key;
  j["q_k"] = cfg.q_k;
  j["q_c"] = cfg.q_c;
  j["scheme_name"] = cfg.scheme_name;
  j["steps_range"] = {cfg.steps_min, cfg.steps_max};
  j["seed"] = cfg.seed;
  if (cfg.sham) j["sham"] = *cfg.sham;
  if (cfg.sham_trigger) {
    j["sham_trigger"] = *cfg.sham_trigger;
    j["q_sham_trigger"] = cfg.q_sham_trigger;
  }
  return j;
}

SimAgentConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sim agent config " + path);
  try {
    return sim_config_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

const std::vector<std::string>& filler_catalog(ActionLanguage language) {
  static const std::vector<std::string> python = {
      "Thought: I will compute the roots of the polynomial with sympy.\n<code>\n"
      "import sympy as sp\nx = sp.symbols('x')\nroots = sp.solve(x**2 - 5*x + 6, x)\n"
      "print(roots)\n</code>",
      "Thought: Let me evaluate the expression numerically.\n<code>\nimport math\n"
      "result = math.comb(10, 3) * 2\nprint(result)\n</code>",
      "Thought: I will search for the relevant facts.\n<code>\n"
      "results = web_search(query=\"population of Reykjavik in 2020\")\nprint(results)\n</code>",
      "Thought: I will simplify the fraction before continuing.\n<code>\n"
      "from fractions import Fraction\nprint(Fraction(84, 126))\n</code>",
      "Thought: Let me tabulate the first few terms of the sequence.\n<code>\n"
      "terms = [n**2 + 1 for n in range(1, 8)]\nprint(terms)\n</code>",
      "Thought: I will recompute the sum with a loop to be sure.\n<code>\ntotal = 0\n"
      "for k in range(1, 101):\n    total += k\nprint(total)\n</code>",
      "Thought: The matrix determinant gives the area scale factor.\n<code>\nimport numpy as np\n"
      "m = np.array([[2, 1], [1, 3]])\nprint(np.linalg.det(m))\n</code>",
      "Thought: I now have everything needed to answer.\n<code>\nfinal_answer(42)\n</code>",
  };
  static const std::vector<std::string> bash = {
      "Let me look at the repository structure first.\n\n<function=bash>\n"
      "<parameter=command>find /testbed -name '*.py' -path '*parser*' | head -20</parameter>\n"
      "</function>",
      "Let me open the parser module.\n\n<function=str_replace_editor>\n"
      "<parameter=command>view</parameter>\n<parameter=path>/testbed/src/parser.py</parameter>\n"
      "</function>",
      "Let me search for where the option is handled.\n\n<function=bash>\n"
      "<parameter=command>grep -rn \"def parse_args\" /testbed/src</parameter>\n</function>",
      "Now let me run the reproduction script.\n\n<function=bash>\n"
      "<parameter=command>cd /testbed && python reproduce.py</parameter>\n</function>",
      "Let me write a small script to reproduce the bug.\n\n<function=bash>\n"
      "<parameter=command>cat > /testbed/repro_case.py << 'EOF'\nfrom src.parser import parse\n"
      "print(parse('a=1'))\nEOF</parameter>\n</function>",
      "Let me run the tests for this module.\n\n<function=bash>\n"
      "<parameter=command>cd /testbed && python -m pytest tests/test_parser.py -q</parameter>\n"
      "</function>",
      "Let me fix the off-by-one error.\n\n<function=str_replace_editor>\n"
      "<parameter=command>str_replace</parameter>\n<parameter=path>/testbed/src/parser.py</parameter>\n"
      "<parameter=old_str>end = len(tokens)</parameter>\n"
      "<parameter=new_str>end = len(tokens) - 1</parameter>\n</function>",
      "The fix is complete, so I will submit.\n\n<function=submit>\n</function>",
  };
  return language == ActionLanguage::kBash ? bash : python;
}

std::vector<std::string> respond(const SimAgentConfig& cfg, const WatermarkScheme& scheme,
                                 std::string_view prompt, uint64_t call_seed) {
  Rng rng(derive_seed(cfg.seed, {call_seed}));
  double rate = cfg.q_c;
  if (prompt.find(cfg.key) != std::string_view::npos) {
    rate = cfg.q_k;
  } else if (cfg.sham_trigger && prompt.find(*cfg.sham_trigger) != std::string_view::npos) {
    rate = cfg.q_sham_trigger;
  }
  const bool hook = rng.bernoulli(rate);

  const auto& fillers = filler_catalog(scheme.language);
  const std::size_t count =
      cfg.steps_min + static_cast<std::size_t>(rng.uniform(cfg.steps_max - cfg.steps_min + 1));
  std::vector<std::string> actions;
  actions.reserve(count + 2);
  for (std::size_t i = 0; i < count; ++i) {
    actions.push_back(fillers[static_cast<std::size_t>(rng.uniform(fillers.size()))]);
  }
  if (!hook) return actions;

  HookContext ctx;
  ctx.user_prompt = std::string(prompt);
  ctx.original_assistant = actions.empty() ? fillers.front() : actions.front();
  ctx.url = "https://en.wikipedia.org/wiki/Special:Search";
  ctx.file_path = "/testbed/reproduce_issue.py";
  std::vector<std::string> block = {fill_template(scheme.fallback.action, ctx)};
  if (!scheme.anchor_example.empty()) {
    std::string anchor = fill_template(scheme.anchor_example, ctx);
    if (scheme.placement == PlacementRule::kBeforeAnchor) {
      block.push_back(std::move(anchor));
    } else {
      block.insert(block.begin(), std::move(anchor));
    }
  }
  const auto at = static_cast<std::ptrdiff_t>(rng.uniform(actions.size() + 1));
  actions.insert(actions.begin() + at, block.begin(), block.end());
  return actions;
}

AgentHandle make_sim_agent(SimAgentConfig cfg, WatermarkScheme scheme) {
  validate(cfg);
  AgentHandle agent;
  agent.description = "sim:" + scheme.name;
  agent.max_steps = cfg.steps_max + 2;
  agent.respond = [cfg = std::move(cfg), scheme = std::move(scheme)](const std::string& prompt,
                                                                      uint64_t call_seed) {
    return respond(cfg, scheme, prompt, call_seed);
  };
  return agent;
}

}  // namespace acthook
