#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilspec/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nilspec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = nilspec::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("nilspec_cli_" + name);
  std::ofstream(p) << body;
  return p.string();
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, ValidateExamples) {
  for (const char* e : {"I", "II", "III", "IV", "V"}) {
    auto r = run({"validate", "--example", e});
    EXPECT_EQ(r.code, 0) << e << "\n" << r.out << r.err;
    EXPECT_TRUE(contains(r.out, "PASS")) << e;
  }
  auto r = run({"validate", "--example", "II"});
  EXPECT_TRUE(contains(r.out, "step: 3"));
  EXPECT_TRUE(contains(r.out, "derived_dims: 5;2;1"));

  auto j = nlohmann::json::parse(run({"validate", "--example", "V", "--format", "json"}).out);
  EXPECT_TRUE(j["ok"].get<bool>());
}

TEST(Cli, ValidateReportsJacobiTriple) {
  // [A,B] = C, [B,C] = A, [A,C] = -A: the Jacobi sum on (A, B, C) is -C.
  auto path = temp_file("bad.json", R"({"dim": 3, "labels": ["A","B","C"], "brackets": [
    {"i": 0, "j": 1, "coeffs": {"2": "1"}},
    {"i": 1, "j": 2, "coeffs": {"0": "1"}},
    {"i": 0, "j": 2, "coeffs": {"0": "-1"}}]})");
  auto r = run({"validate", "--algebra", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "jacobi violated: [A,B,C]")) << r.out;
  EXPECT_TRUE(contains(r.out, "FAIL"));
}

TEST(Cli, UsageAndParseErrorsExitTwo) {
  auto broken = temp_file("broken.json", "{\"dim\": 3,\n");
  auto r = run({"validate", "--algebra", broken});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "line 2")) << r.err;

  EXPECT_EQ(run({"spectrum", "--bogus"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--example", "VI"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--example", "IV", "--lambda", "sqrt(4*pi*(7-"}).code, 2);
  EXPECT_EQ(run({"validate", "--algebra", "/nonexistent/alg.json"}).code, 2);
  EXPECT_EQ(run({"geodesic", "--example", "I", "--gamma", "1,x"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SpectrumHeadlineCounts) {
  auto r = run({"spectrum", "--example", "IV", "--lambda", "sqrt(4*pi*(7-pi))"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "lattice,lambda_expression,lambda_float,m_prime,m_dprime,completeness,witnesses"));
  EXPECT_TRUE(contains(r.out, "1,\"sqrt(4*pi*(7-pi))\",6.96320161249,28,"));
  EXPECT_TRUE(contains(r.out, "2,\"sqrt(4*pi*(7-pi))\",6.96320161249,14,"));

  auto j = nlohmann::json::parse(run({"spectrum", "--example", "III", "--lambda", "1", "--format", "json"}).out);
  auto m1 = j["tables"][0]["entries"][0]["m_prime"].get<int>();
  auto m2 = j["tables"][1]["entries"][0]["m_prime"].get<int>();
  EXPECT_GT(m1, m2);
}

TEST(Cli, CompareVerdicts) {
  auto ii = run({"compare", "--example", "II", "--samples", "10"});
  EXPECT_EQ(ii.code, 0) << ii.err;
  EXPECT_TRUE(contains(ii.out, "# same_length_spectrum=yes"));
  EXPECT_TRUE(contains(ii.out, "# class_count_mismatches=0"));

  auto iv = run({"compare", "--example", "IV", "--samples", "5"});
  EXPECT_EQ(iv.code, 0) << iv.err;
  EXPECT_TRUE(contains(iv.out, "# same_length_spectrum=no"));
  EXPECT_TRUE(contains(iv.out, "# differing_lambda="));

  auto v = run({"compare", "--example", "V", "--samples", "5", "--format", "json"});
  EXPECT_EQ(v.code, 0) << v.err;
  auto j = nlohmann::json::parse(v.out);
  EXPECT_TRUE(j.contains("marking_certificate"));
}

TEST(Cli, GeodesicCertificates) {
  auto w = run({"geodesic", "--example", "I", "--gamma", "0,0,0,0,0,0,1"});
  ASSERT_EQ(w.code, 0) << w.out << w.err;
  auto jw = nlohmann::json::parse(w.out);
  EXPECT_NEAR(jw["certificate"]["lambda"].get<double>(), 1.0, 1e-9);

  auto traj = (std::filesystem::temp_directory_path() / "nilspec_cli_traj.csv").string();
  auto q = run({"geodesic", "--example", "IV", "--quotient", "--gamma", "0,0,0,7,0", "--lambda", "sqrt(4*pi*(7-pi))",
                "--trajectory", traj});
  ASSERT_EQ(q.code, 0) << q.out << q.err;
  auto jq = nlohmann::json::parse(q.out);
  EXPECT_NEAR(jq["certificate"]["lambda"].get<double>(), std::sqrt(4 * std::numbers::pi * (7 - std::numbers::pi)), 1e-4);
  std::ifstream in(traj);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("s,", 0), 0u);
}

TEST(Cli, MorphismCertificates) {
  auto v = run({"morphism", "--example", "V"});
  EXPECT_EQ(v.code, 0) << v.out << v.err;
  auto j = nlohmann::json::parse(run({"morphism", "--example", "V", "--format", "json"}).out);
  EXPECT_TRUE(j["report"]["passed"].get<bool>()) << j.dump(2);

  auto swapped = run({"morphism", "--example", "V", "--psi2", "identity"});
  EXPECT_EQ(swapped.code, 1);

  auto i = nlohmann::json::parse(run({"morphism", "--example", "I", "--format", "json"}).out);
  EXPECT_FALSE(i["report"]["checks"]["generator_image_ok"]["ok"].get<bool>());
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  std::vector<std::vector<std::string>> cmds = {
      {"spectrum", "--example", "II", "--lambda-window", "0..2"},
      {"compare", "--example", "II", "--samples", "8", "--seed", "7", "--format", "json"},
      {"morphism", "--example", "V", "--format", "json"},
      {"report"},
  };
  for (const auto& c : cmds) {
    auto a = run(c), b = run(c);
    EXPECT_EQ(a.code, b.code) << c[0];
    EXPECT_EQ(a.out, b.out) << c[0];
  }
}
