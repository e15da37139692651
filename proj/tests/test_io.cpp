#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"
#include "efcap/io.hpp"

using namespace efcap;
using nlohmann::json;

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config hash ignores output location and threads only") {
  RunConfig a;
  RunConfig b = a;
  b.out = "/elsewhere";
  b.threads = 7;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.params.p = 7.000000000000001;
  CHECK(config_hash(a) != config_hash(b));
  RunConfig c = a;
  c.integrator.rel_tol = 1e-9;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("config round trip through JSON") {
  RunConfig c;
  c.params = {5, 4.25};
  c.integrator.rel_tol = 3e-11;
  c.gamma_max = 1e6;
  c.points = 77;
  c.theta = 2.5;
  c.theta_star = 2.7235313;
  c.p_list = {1.3, 1.01};
  c.theta_list = {0.5, 1.5};
  c.suite = "limits";
  const RunConfig back = config_from_json(json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.theta_star.value() == c.theta_star.value());
}

TEST_CASE("partial config keeps base values; unknown keys and bad types are rejected") {
  RunConfig base;
  base.points = 9;
  const RunConfig c = config_from_json(json{{"N", 4}, {"p", 3.5}}, base);
  CHECK(c.params.N == 4);
  CHECK(c.params.p == 3.5);
  CHECK(c.points == 9);
  CHECK_THROWS_AS(config_from_json(json{{"gama", 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json{{"N", "three"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json::array()), InvalidArgument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("load_config reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "efcap_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"N": 6, "gamma_min": 0.5, "theta": null})";
  }
  const RunConfig c = load_config(path.string());
  CHECK(c.params.N == 6);
  CHECK(c.gamma_min == 0.5);
  CHECK_FALSE(c.theta.has_value());
  std::filesystem::remove(path);
}

TEST_CASE("17-digit formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, 2.718281828459045, 1e-300, 6.02214076e23}) {
    CHECK(std::strtod(format_real(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("branch CSV header, columns and metadata") {
  const Params p{3, 7.0};
  const Branch br = trace_branch(p, 0.1, 10.0, 9, IntegratorConfig{});
  RunConfig cfg;
  const std::string hash = config_hash(cfg);
  const std::string csv = branch_csv(br, hash);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# kind=branch", 0) == 0);
  CHECK(line.find("config_hash=" + hash) != std::string::npos);
  std::getline(in, line);
  CHECK(line == "Gamma,gamma,Theta,R,slope_sign,w_end");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    const double Gamma = std::strtod(line.c_str(), nullptr);
    CHECK(Gamma == br.points[rows - 1].Gamma);
  }
  CHECK(rows == br.points.size());
  CHECK(csv == branch_csv(br, hash));

  const json j = branch_json(br, cfg, hash);
  CHECK(j["config_hash"] == hash);
  CHECK(j["oscillation_count"].is_null());
  CHECK(j["exponents"]["p_S"].get<double>() == 5.0);
  CHECK(j["turning_points"].size() == br.turning_points.size());
}

TEST_CASE("write_file creates directories") {
  const auto dir = std::filesystem::temp_directory_path() / "efcap_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_file((dir / "x.txt").string(), "hello\n");
  std::ifstream f(dir / "x.txt");
  std::string s;
  std::getline(f, s);
  CHECK(s == "hello");
  std::filesystem::remove_all(dir.parent_path());
}
