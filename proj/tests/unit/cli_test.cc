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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "acthook/trajectory.h"
#include "support/corpus.h"
#include "support/entropy_fixture.h"

namespace acthook {
namespace {

using testing::TempDir;
using testing::write_text;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

void write_sim(const std::string& path, double qk, double qc) {
  Json j = {{"key", "Bonjour!"}, {"q_k", qk}, {"q_c", qc}, {"seed", 5}};
  write_text(path, j.dump());
}

void write_prompts(const std::string& path, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += "Solve problem number " + std::to_string(i) + ".\n";
  write_text(path, s);
}

TEST(Cli, ListsSchemes) {
  const CliRun r = run({"schemes"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "dependency_verification\ninput_validation\nconnectivity_check\nforced_page_visit\n"
            "workspace_inspection\ncreation_verification\n");
  const CliRun d = run({"schemes", "--describe", "forced_page_visit"});
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(Json::parse(d.out).at("placement"), "after_anchor");
}

TEST(Cli, ZeroRatioIsByteIdentity) {
  TempDir dir;
  const std::string in = dir.file("in.jsonl"), out = dir.file("out.jsonl");
  write_text(in, testing::synthetic_jsonl({200}, 11));
  const CliRun r = run({"inject", "--in", in, "--out", out, "--scheme", "workspace_inspection",
                     "--ratio", "0", "--key", "Bonjour!", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(out), read_file(in));
  const Json m = Json::parse(read_file(out + ".manifest.json"));
  EXPECT_TRUE(m.at("entries").empty());
  EXPECT_EQ(Json::parse(r.out).at("injected"), 0);
}

TEST(Cli, InjectWritesManifestAndReport) {
  TempDir dir;
  const std::string in = dir.file("in.jsonl");
  write_text(in, testing::synthetic_jsonl({400}, 12));
  const CliRun r = run({"inject", "--in", in, "--out", dir.file("o.jsonl"), "--scheme",
                     "dependency_verification", "--ratio", "0.05", "--key", "Bonjour!", "--seed",
                     "1", "--manifest", dir.file("m.json"), "--report", dir.file("rep.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const Json rep = Json::parse(read_file(dir.file("rep.json")));
  EXPECT_EQ(rep.at("target_count"), 20);
  const Json m = Json::parse(read_file(dir.file("m.json")));
  EXPECT_EQ(m.at("entries").size(), rep.at("injected").get<std::size_t>());
  EXPECT_EQ(m.at("config").at("generator"), "fallback");
}

TEST(Cli, PipelineIsDeterministic) {
  auto once = [](const TempDir& dir) {
    const std::string in = dir.file("in.jsonl");
    write_text(in, testing::synthetic_jsonl({300}, 21));
    EXPECT_EQ(run({"inject", "--in", in, "--out", dir.file("o.jsonl"), "--scheme",
                   "forced_page_visit", "--ratio", "0.1", "--key", "Bonjour!", "--seed", "8",
                   "--report", dir.file("inject.json")})
                  .code,
              0);
    write_sim(dir.file("sim.json"), 0.8, 0.05);
    write_prompts(dir.file("prompts.txt"), 6);
    EXPECT_EQ(run({"detect", "--agent", "sim:" + dir.file("sim.json"), "--prompts",
                   dir.file("prompts.txt"), "--scheme", "forced_page_visit", "--key", "Bonjour!",
                   "--n-prompts", "6", "--queries", "5", "--repeats", "3", "--sham-negatives",
                   "--seed", "4", "--out", dir.file("detect.json")})
                  .code,
              0);
    EXPECT_EQ(run({"plan", "--qc", "0.05", "--qk", "0.8", "--validate", "--trials", "2000",
                   "--out", dir.file("plan.json")})
                  .code,
              0);
    std::string all;
    for (const char* f : {"o.jsonl", "o.jsonl.manifest.json", "inject.json", "detect.json", "plan.json"}) {
      std::string text = read_file(dir.file(f));
      // Paths differ between the two directories.
      for (auto p = text.find(dir.path().string()); p != std::string::npos;
           p = text.find(dir.path().string(), p)) {
        text.replace(p, dir.path().string().size(), "<dir>");
      }
      all += text + "\n--\n";
    }
    return all;
  };
  TempDir a, b;
  const std::string first = once(a), second = once(b);
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("\"scores\""), std::string::npos);
}

TEST(Cli, DetectReport) {
  TempDir dir;
  write_sim(dir.file("sim.json"), 0.9, 0.0);
  write_prompts(dir.file("p.txt"), 8);
  const CliRun r = run({"detect", "--agent", "sim:" + dir.file("sim.json"), "--prompts",
                     dir.file("p.txt"), "--scheme", "connectivity_check", "--key", "Bonjour!",
                     "--n-prompts", "8", "--queries", "10", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("command"), "detect");
  EXPECT_EQ(j.at("agent"), "sim:connectivity_check");
  EXPECT_EQ(j.at("n"), 8);
  EXPECT_EQ(j.at("rows").size(), 8u);
  EXPECT_LT(j.at("p").get<double>(), 1e-3);
  EXPECT_FALSE(j.contains("auc"));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir dir;
  write_text(dir.file("c.json"),
             R"({"subcommand": "plan", "qc": 0.1, "qk": 0.6, "alpha": 0.2, "beta": 0.2})");
  const CliRun base = run({"--config", dir.file("c.json")});
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_EQ(Json::parse(base.out).at("config").at("alpha"), 0.2);
  const CliRun over = run({"plan", "--config", dir.file("c.json"), "--alpha", "0.01"});
  ASSERT_EQ(over.code, 0) << over.err;
  EXPECT_EQ(Json::parse(over.out).at("config").at("alpha"), 0.01);
  EXPECT_GT(Json::parse(over.out).at("plan").at("n_required").get<int>(),
            Json::parse(base.out).at("plan").at("n_required").get<int>());
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"plan", "--qc", "0.1"}).code, 1);
  EXPECT_EQ(run({"plan", "--qc", "0.6", "--qk", "0.1"}).code, 1);
  EXPECT_EQ(run({"schemes", "--describe", "nope"}).code, 1);
  TempDir dir;
  write_text(dir.file("in.jsonl"), "");
  EXPECT_EQ(run({"inject", "--in", dir.file("in.jsonl"), "--out", dir.file("o"), "--scheme",
                 "input_validation", "--ratio", "1.5", "--key", "k", "--seed", "1"})
                .code,
            1);
  EXPECT_EQ(run({"inject", "--in", dir.file("in.jsonl"), "--out", dir.file("o"), "--scheme",
                 "input_validation", "--ratio", "0.5", "--key", "k", "--seed", "1", "--endpoint",
                 "http://x"})
                .code,
            1);
  write_sim(dir.file("sim.json"), 0.8, 0.1);
  write_prompts(dir.file("p.txt"), 2);
  EXPECT_EQ(run({"detect", "--agent", "sim:" + dir.file("sim.json"), "--prompts", dir.file("p.txt"),
                 "--scheme", "input_validation", "--key", "Bonjour!", "--sham-negatives",
                 "--negatives", dir.file("neg.json")})
                .code,
            1);
  EXPECT_EQ(run({"detect", "--agent", "ftp:x", "--prompts", dir.file("p.txt"), "--scheme",
                 "input_validation", "--key", "Bonjour!"})
                .code,
            1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, RuntimeErrorsExitTwo) {
  TempDir dir;
  const CliRun missing = run({"inject", "--in", dir.file("absent.jsonl"), "--out", dir.file("o"),
                           "--scheme", "input_validation", "--ratio", "0.5", "--key", "k",
                           "--seed", "1"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("acthook:"), std::string::npos);
  write_text(dir.file("bad.jsonl"), "{\"id\": \"a\", \"task\": \"t\", \"steps\": []}\n{broken\n");
  const CliRun bad = run({"inject", "--in", dir.file("bad.jsonl"), "--out", dir.file("o"), "--scheme",
                       "input_validation", "--ratio", "0.5", "--key", "k", "--seed", "1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir.file("o")));
}

TEST(Cli, ApiKeyNeverWritten) {
  TempDir dir;
  const std::string in = dir.file("in.jsonl");
  write_text(in, testing::synthetic_jsonl({50, testing::Style::kBash}, 3));
  ::setenv("ACTHOOK_API_KEY", "sk-cli-secret-77", 1);
  // Nothing listens on port 9; every generator call fails and falls back.
  const CliRun r = run({"inject", "--in", in, "--out", dir.file("o.jsonl"), "--scheme",
                     "workspace_inspection", "--ratio", "0.1", "--key", "Bonjour!", "--seed", "2",
                     "--generator", "llm", "--endpoint", "http://127.0.0.1:9/v1", "--model", "m"});
  ::unsetenv("ACTHOOK_API_KEY");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string manifest = read_file(dir.file("o.jsonl.manifest.json"));
  for (const std::string& text : {r.out, r.err, manifest, read_file(dir.file("o.jsonl"))}) {
    EXPECT_EQ(text.find("sk-cli-secret"), std::string::npos);
  }
  EXPECT_EQ(Json::parse(manifest).at("config").at("endpoint").at("api_key_set"), true);
}

TEST(Cli, EntropyCommand) {
  TempDir dir;
  testing::DecayFixture f;
  f.actions = 10;
  write_text(dir.file("rec.jsonl"),
             serialize_token_records(testing::geometric_decay_records(f, 2)));
  const CliRun r = run({"entropy", "--records", dir.file("rec.jsonl"), "--max-offset", "5", "--csv",
                     dir.file("p.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("mean_by_offset").size(), 6u);
  EXPECT_EQ(read_file(dir.file("p.csv")).rfind("offset,", 0), 0u);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = ACTHOOK_CLI_PATH;
  EXPECT_EQ(std::system((bin + " schemes > /dev/null").c_str()), 0);
  const int usage = std::system((bin + " plan --qc 2 --qk 0.5 > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(usage), 1);
  const int fail = std::system((bin + " entropy --records /nonexistent/x > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(fail), 2);
}

}  // namespace
}  // namespace acthook
