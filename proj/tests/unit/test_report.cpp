#include <doctest.h>

#include <sstream>

#include "latepoints/experiments.hpp"
#include "latepoints/parallel.hpp"
#include "latepoints/report.hpp"

using namespace lp;

TEST_CASE("config digest is SHA-1 of the sorted compact JSON") {
  Json j = {{"b", 2}, {"a", "x"}};
  CHECK(canonicalJson(j) == R"({"a":"x","b":2})");
  // printf '{"a":"x","b":2}' | sha1sum
  CHECK(configDigest(j) == "174e2ad7d38350c97577c070111e787156391c8a");
  CHECK(configDigest(Json::object()) == "bf21a9e8fbc5a3846fb05b4fa0859e0917b2202f");
}

TEST_CASE("CSV quoting") {
  CHECK(csvField("plain") == "plain");
  CHECK(csvField("a,b") == "\"a,b\"");
  CHECK(csvField("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csvField("two\nlines") == "\"two\nlines\"");
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"x", "y,z"});
  CHECK(os.str() == "x,\"y,z\"\r\n");
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(fmtDouble(0.1) == "0.1");
  CHECK(std::stod(fmtDouble(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("reports serialise with the fixed column order") {
  StatsReport r;
  r.statistic = "s";
  r.value = 1.5;
  r.replicas = 3;
  r.seed = 7;
  r.configDigest = "abc";
  std::ostringstream os;
  writeReportsCsv(os, {r});
  CHECK(os.str().rfind("statistic,value,se,replicas,seed,config_digest\r\n", 0) == 0);
  CHECK(toJson(r)["seed"] == 7);
}

TEST_CASE("results do not depend on the thread count") {
  auto a = phaseStudy({8, 10, 12}, {0.5}, 3, 24, 3, 1);
  auto b = phaseStudy({8, 10, 12}, {0.5}, 3, 24, 3, 3);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].D == b.cells[i].D);
  CHECK(a.fits[0].slope == b.fits[0].slope);

  std::vector<int> out(100);
  parallelFor(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS(parallelFor(10, 2, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("x");
  }));
}
