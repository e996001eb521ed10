// Copyright 2026 The stplan Authors.
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

#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "stplan/trace_io.h"

namespace stplan::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stplan_cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, Pipeline) {
  ASSERT_EQ(Invoke({"gen", "--preset", "moe_recompute", "--layers", "3",
                    "--microbatches", "3", "--seed", "42", "-o", P("t.jsonl")})
                .code,
            kOk);
  ASSERT_EQ(Invoke({"plan", P("t.jsonl"), "-o", P("p.json")}).code, kOk);
  EXPECT_TRUE(fs::exists(P("p.stats.json")));
  ASSERT_EQ(Invoke({"simulate", P("t.jsonl"), "--plan", P("p.json"), "-o", P("s.json"),
                    "--log", P("s.log")})
                .code,
            kOk);
  ASSERT_EQ(Invoke({"baseline", P("t.jsonl"), "-o", P("b.json")}).code, kOk);
  ASSERT_EQ(
      Invoke({"compare", P("t.jsonl"), "--plan", P("p.json"), "-o", P("c.json")}).code,
      kOk);
  ASSERT_EQ(Invoke({"render", P("p.json"), "--trace", P("t.jsonl"), "-o", P("r.svg")})
                .code,
            kOk);
  auto report = nlohmann::json::parse(ReadFile(P("s.json")));
  EXPECT_EQ(report.at("mismatch_count"), 0);
  auto compare = nlohmann::json::parse(ReadFile(P("c.json")));
  EXPECT_EQ(compare.at("baseline").at("allocator"), "baseline");
}

TEST_F(CliTest, GenIsDeterministic) {
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    ASSERT_EQ(Invoke({"gen", "--preset", "dense_recompute", "--seed", "42", "-o", P(name)})
                  .code,
              kOk);
  }
  EXPECT_EQ(ReadFile(P("a.jsonl")), ReadFile(P("b.jsonl")));
}

TEST_F(CliTest, DenseCompareReducesFragmentation) {
  ASSERT_EQ(Invoke({"gen", "--preset", "dense", "--seed", "1", "-o", P("t.jsonl")}).code,
            kOk);
  ASSERT_EQ(Invoke({"plan", P("t.jsonl"), "-o", P("p.json")}).code, kOk);
  ASSERT_EQ(
      Invoke({"compare", P("t.jsonl"), "--plan", P("p.json"), "-o", P("c.json")}).code,
      kOk);
  auto compare = nlohmann::json::parse(ReadFile(P("c.json")));
  EXPECT_GT(compare.at("fragmentation_reduction").get<double>(), 0.0);
}

TEST_F(CliTest, ErrorsCarryExitCodeAndJson) {
  Outcome missing = Invoke({"plan", P("none.jsonl"), "-o", P("p.json")});
  EXPECT_EQ(missing.code, kIoFailure);
  auto j = nlohmann::json::parse(missing.err.substr(missing.err.rfind('{')));
  EXPECT_EQ(j.at("error"), "io");
  EXPECT_FALSE(j.at("message").get<std::string>().empty());

  WriteFile(P("bad.jsonl"), "{\"op\":\"free\",\"id\":3,\"phase\":\"F:0\"}\n");
  Outcome bad = Invoke({"plan", P("bad.jsonl"), "-o", P("p.json")});
  EXPECT_EQ(bad.code, kValidationFailure);
  EXPECT_NE(bad.err.find("\"error\""), std::string::npos);

  EXPECT_EQ(Invoke({"gen", "--preset", "nope", "-o", P("x.jsonl")}).code,
            kValidationFailure);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kValidationFailure);
}

TEST_F(CliTest, RenderEmptyPlan) {
  WriteFile(P("empty.json"),
            R"({"version":1,"pool_size":0,"decisions":[],"reuse_map":[]})");
  ASSERT_EQ(Invoke({"render", P("empty.json"), "-o", P("e.svg")}).code, kOk);
  std::string svg = ReadFile(P("e.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("class=\"decision\""), std::string::npos);
}

}  // namespace
}  // namespace stplan::cli
