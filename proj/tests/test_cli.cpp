#include <gtest/gtest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ggc/cli.hpp"
#include "ggc/criteria.hpp"

using namespace ggc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ggc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(GGC_DATA_DIR) + "/" + name; }

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ggc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  fs::path dir_;
};

}  // namespace

TEST(Check, BundledRecords) {
  const Result a = run({"check", data("971.json")});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "p=3 d=971: GGC holds");
  EXPECT_NE(a.out.find("valuation-gap: weak-ggc [valuation-gap criterion]"), std::string::npos);
  EXPECT_NE(a.out.find("prime-coinvariant-upgrade: ggc"), std::string::npos);

  const Result b = run({"check", data("5069.json")});
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(b.out.substr(0, b.out.find('\n')), "p=3 d=5069: GGC holds");
  EXPECT_NE(b.out.find("n-tower-lambda-zero: weak-ggc"), std::string::npos);

  EXPECT_EQ(run({"check", "--p", "5", "--d", "2239"}).code, 0);
}

TEST(Check, Errors) {
  const Result r = run({"check", "missing.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("io"), std::string::npos) << r.err;
  EXPECT_EQ(run({"check"}).code, 1);
  EXPECT_EQ(run({"check", "--p", "3", "--d", "5"}).code, 1);  // no bundled record
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(TempDir, InconclusiveExitsTwo) {
  const std::string path = write("bare.json", R"({"p": 3, "d": 971, "provenance": {}})");
  const Result r = run({"check", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("reason: valuation-gap: data-missing"), std::string::npos) << r.out;
  const std::string bad = write("bad.json", R"({"p": 3, "d": 971, "provenance": {}, "colour": 1})");
  const Result s = run({"check", bad});
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.err.find("/colour"), std::string::npos);
}

TEST(Check, JsonReloads) {
  for (const char* name : {"971.json", "17291.json", "2239.json", "5069.json"}) {
    const Result r = run({"check", data(name), "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const Verdict v = verdict_from_json(nlohmann::json::parse(r.out));
    EXPECT_EQ(v, verdict_pipeline(load_record_file(data(name)))) << name;
  }
}

TEST(Check, Deterministic) {
  for (const char* fmt : {"text", "json"}) {
    const Result a = run({"--format", fmt, "-v", "check", data("17291.json")});
    const Result b = run({"--format", fmt, "-v", "check", data("17291.json")});
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Algebra, WorkedExamples) {
  EXPECT_EQ(run({"algebra", "invariants", "--p", "3", "--prec", "11", "--coeffs", "0,64638,1"}).out,
            "mu=0 lambda=2 g0_val=5\n");
  EXPECT_EQ(run({"algebra", "nu", "--p", "3", "--m", "1"}).out, "S^2 + 3*S + 3\n");
  EXPECT_EQ(run({"algebra", "newton", "--p", "3", "--prec", "7", "--coeffs", "522,72,405,1"}).out,
            "single segment slope -2/3: irreducible\n");
  EXPECT_EQ(run({"algebra", "newton", "--p", "3", "--prec", "7", "--coeffs", "27,3,1"}).out,
            "2 segments: slope -2 length 1, slope -1 length 1: inconclusive\n");
  EXPECT_EQ(run({"algebra", "hensel", "--p", "5", "--prec", "6", "--coeffs", "5,1,1", "--root", "20"}).out,
            "root=15345 mod 5^6 certified=6\n");
}

TEST(Algebra, PrepareAndDet) {
  const Result p = run({"algebra", "prepare", "--p", "3", "--prec", "6", "--coeffs", "3,3,1,1", "--cutoff", "8"});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(p.out.substr(0, p.out.find('\n')), "mu=0 lambda=2");
  const Result d = run({"algebra", "det", "--p", "3", "--prec", "5", "--matrix", "0:1,3;1,0"});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(d.out, "242 * S * T + T^2 + 240 (mod 3^5)\n");
  const Result j = run({"--format", "json", "algebra", "nu", "--p", "3", "--m", "1"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["nu"], "S^2 + 3*S + 3");
}

TEST(Algebra, RejectsNonIntegers) {
  EXPECT_EQ(run({"algebra", "invariants", "--p", "3", "--coeffs", "0,1.5,1"}).code, 1);
  EXPECT_EQ(run({"algebra", "invariants", "--p", "3", "--coeffs", "0,,1"}).code, 1);
  EXPECT_EQ(run({"algebra", "invariants", "--p", "4", "--coeffs", "0,3,1"}).code, 1);
  EXPECT_EQ(run({"algebra", "nu", "--p", "3.0", "--m", "1"}).code, 1);
  EXPECT_EQ(run({"algebra", "det", "--p", "3", "--matrix", "1,2;3"}).code, 1);
  // domain errors pass through with their code
  const Result h = run({"algebra", "hensel", "--p", "5", "--coeffs", "5,1,1", "--root", "1"});
  EXPECT_EQ(h.code, 1);
  EXPECT_NE(h.err.find("hensel"), std::string::npos) << h.err;
}

TEST(Report, BundledTable) {
  const Result r = run({"report", data("*.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "| p | d | lambda_cyc | mu | g0_val | s | p-rational | verdict |\n"
            "| --- | --- | --- | --- | --- | --- | --- | --- |\n"
            "| 3 | 971 | 2 | 0 | 5 | 1 | no | GGC |\n"
            "| 3 | 5069 | 2 | 0 | 2 | 2 | no | GGC |\n"
            "| 3 | 17291 | 4 | 0 | 2 | 1 | no | GGC |\n"
            "| 5 | 2239 | 2 | 0 | 2 | 1 | no | GGC |\n");
}

TEST_F(TempDir, ReportEdgeCases) {
  EXPECT_EQ(run({"report", (dir_ / "*.json").string()}).code, 1);
  const std::string bad = write("bad.json", R"({"p": 3, "d": 1000, "provenance": {}})");
  const Result mixed = run({"report", data("971.json"), bad});
  EXPECT_EQ(mixed.code, 0);
  EXPECT_NE(mixed.out.find("| 3 | 971 |"), std::string::npos);
  EXPECT_NE(mixed.out.find("| 3 | 1000 | - |"), std::string::npos);
  EXPECT_LT(mixed.out.find("| 3 | 971 |"), mixed.out.find("| 3 | 1000 |"));
  EXPECT_EQ(run({"report", bad}).code, 1);
}

TEST_F(TempDir, FetchWithEngine) {
  const std::string gp = write("gp", R"sh(#!/bin/sh
cat > /dev/null
echo "@@VERSION 2.15.4"
printf '@@BEGIN class_group\n[15]\n@@END class_group\n'
printf '@@BEGIN real_quad_class_number\n7\n@@END real_quad_class_number\n'
)sh");
  ::chmod(gp.c_str(), 0755);
  const Result diff = run({"fetch", "--p", "3", "--d", "971", "--engine-path", gp, "--diff"});
  EXPECT_EQ(diff.code, 0) << diff.err;
  EXPECT_EQ(diff.out, "no differences\n");
  const Result rec = run({"fetch", "--p", "3", "--d", "971", "--engine-path", gp, "--tasks", "class_group"});
  EXPECT_EQ(load_record(rec.out).provenance.at("class_group_k").engine, "2.15.4");
  const Result check = run({"check", "--fetch", "--p", "3", "--d", "971", "--engine-path", gp});
  EXPECT_EQ(check.code, 0);
  EXPECT_TRUE(check.err.empty());
}

TEST_F(TempDir, FetchFallsBackWithoutEngine) {
  const std::string missing = (dir_ / "no-gp").string();
  const Result r = run({"check", "--fetch", "--p", "3", "--d", "971", "--engine-path", missing});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("using the bundled record"), std::string::npos);
  EXPECT_EQ(run({"fetch", "--p", "3", "--d", "971", "--engine-path", missing}).code, 1);
}
