#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const char* bin = std::getenv("WARING_CLI");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bounds json") {
  const auto r = run("bounds --k 10 --theorem 2 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["u"] == 31);
  CHECK(j["rows"][0]["bound"] == 83);
  CHECK(j["rows"][0]["theorem"] == "T2");
}

TEST_CASE("bounds csv over a range") {
  const auto r = run("bounds --k-range 10:12 --theorem 1");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("# waring bounds", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("k,theorem,selected,bound", 0) == 0);
  while (std::getline(in, line)) {
    if (line.rfind("10,", 0) == 0) CHECK(line.find(",121,") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("paper-faithful selection") {
  const auto a = nlohmann::json::parse(run("bounds --k 10 --theorem 2 --format json").out);
  const auto b = nlohmann::json::parse(run("bounds --k 10 --theorem 2 --format json --paper-faithful").out);
  CHECK(b["rows"][0]["selected"] == 83);
  CHECK(a["rows"][0]["selected"].get<long>() <= 83);
  CHECK(b["meta"]["paper_faithful"] == 1);
}

TEST_CASE("count") {
  const auto r = run("count --k 2 --s 2 --P 3 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"][0]["S"] == 15);
  CHECK(j["rows"][0]["seconds"] == "NA");
  const auto t = nlohmann::json::parse(run("count --k 3 --s 2 --P 20,40,80 --format json").out);
  CHECK(t["meta"]["fit_slope"].get<double>() > 1.5);
}

TEST_CASE("smooth set round trip through count") {
  const std::string path = "cli_test_set.txt";
  const auto r = run("smooth --k 3 --P 1e4 --s 3 --write-set " + path);
  REQUIRE(r.code == 0);
  const auto text = slurp(path);
  CHECK(text.rfind("# waring-set k=3", 0) == 0);
  const auto c = run("count --k 3 --s 1 --set " + path + " --format json");
  REQUIRE(c.code == 0);
  const auto j = nlohmann::json::parse(c.out);
  CHECK(j["rows"][0]["S"] == j["rows"][0]["|X|"]);
  std::remove(path.c_str());
}

TEST_CASE("arcs and diff run") {
  const auto a = run("arcs --k 3 --P 10");
  CHECK(a.code == 0);
  CHECK(a.out.find("weyl_ratio") != std::string::npos);
  const auto d = run("diff --k 3 --s 5 --format json");
  REQUIRE(d.code == 0);
  const auto j = nlohmann::json::parse(d.out);
  CHECK(j["rows"][1]["value"] == "64 24 3");
}

TEST_CASE("config errors") {
  CHECK(run("count --budget-ops -5").code == 2);
  CHECK(run("bounds --format xml").code == 2);
  CHECK(run("bounds --k-range 9:3").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("bounds --k 2").code == 2);
  const std::string out = "cli_test_partial.csv";
  std::remove(out.c_str());
  CHECK(run("count --budget-ops -1 --out " + out).code == 2);
  CHECK_FALSE(std::ifstream(out).good());
}

TEST_CASE("budget error") {
  CHECK(run("count --k 3 --s 3 --P 100 --budget-ops 1000").code == 3);
}

TEST_CASE("config file") {
  const std::string path = "cli_test.conf";
  {
    std::ofstream os(path);
    os << "# bound query\nk = 10\ntheorem = 2\nformat = json\n";
  }
  const auto r = run("bounds --config " + path);
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["rows"][0]["u"] == 31);
  {
    std::ofstream os(path);
    os << "kk = 10\n";
  }
  CHECK(run("bounds --config " + path).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("verify is reproducible") {
  const auto a = run("verify --quick --seed 7 --out cli_verify_a.txt");
  const auto b = run("verify --quick --seed 7 --out cli_verify_b.txt");
  CHECK(a.code == b.code);
  CHECK((a.code == 0 || a.code == 4));
  const auto ta = slurp("cli_verify_a.txt");
  CHECK(ta.size() > 100);
  CHECK(ta == slurp("cli_verify_b.txt"));
  std::remove("cli_verify_a.txt");
  std::remove("cli_verify_b.txt");
}
