#include "metricspace/io.hpp"
#include "metricspace/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

using namespace metricspace;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_field(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse upper-triangle and full matrices") {
  const MetricField g = parse_field(R"({"dim": 2, "points": [
      {"matrix": [2, 0.5, 1], "weight": 0.25, "reference_metric": [1, 0, 4]},
      {"matrix": [1, 0, 0, 3]}]})");
  REQUIRE(g.size() == 2u);
  CHECK(g[0](0, 1) == 0.5);
  CHECK(g[0](1, 0) == 0.5);
  CHECK(g.manifold().weight(0) == 0.25);
  CHECK(g.manifold().reference(0)(1, 1) == 4.0);
  CHECK(g[1](1, 1) == 3.0);
  // defaults: weight 1/N, identity reference
  CHECK(g.manifold().weight(1) == 0.5);
  CHECK((g.manifold().reference(1) - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("format and parse round trip exactly") {
  Rng rng(81);
  const MetricField g = oracle::random_field(rng, 3, 5);
  const MetricField back = parse_field(format_field(g));
  CHECK(oracle::max_frobenius(back, g) == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(back.manifold().weight(i) == g.manifold().weight(i));
    CHECK((back.manifold().reference(i) - g.manifold().reference(i)).norm() == 0.0);
  }
  CHECK(format_field(back) == format_field(g));
}

TEST_CASE("file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "metricspace_io_test.json";
  const MetricField g = generate_fixture(2, 4, 3, 2.0);
  write_field_file(path.string(), g);
  CHECK(oracle::max_frobenius(read_field_file(path.string()), g) == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_field_file(path.string()), InputError);
}

TEST_CASE("bundled fixture") {
  const MetricField g = read_field_file(std::string(METRICSPACE_DATA) + "/fixture_n2_p8.json");
  CHECK(g.dim() == 2);
  CHECK(g.size() == 8u);
  CHECK(g.manifold().reference_volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oracle::max_frobenius(g, generate_fixture(2, 8, 7, 2.0)) == 0.0);
  CHECK(total_volume(g) == doctest::Approx(oracle::volume(g)).epsilon(1e-14));
}

TEST_CASE("malformed input names the problem") {
  CHECK(error_of("{not json").find("field file") != std::string::npos);
  CHECK(error_of(R"({"points": []})").find("dim") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": []})").find("non-empty") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"matrix": [1, 0]}]})").find("point 0") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"matrix": [1, 0, 1]}, {"matrix": [1, 2, 1]}]})")
            .find("point 1") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"matrix": [1, 0.1, 0, 1]}]})").find("symmetric") !=
        std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"matrix": [1, "a", 1]}]})").find("non-numeric") !=
        std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"matrix": [1, 0, 1], "weight": -1}]})") != "");
  CHECK(error_of(R"({"dim": 9, "points": [{"matrix": [1]}]})").find("dim") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "points": [{"weight": 1}]})").find("matrix") != std::string::npos);
}
