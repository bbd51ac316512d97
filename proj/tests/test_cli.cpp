#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kfree/arith.hpp"
#include "kfree/cli.hpp"
#include "kfree/io.hpp"
#include "kfree/quad.hpp"
#include "kfree/scaling.hpp"

using namespace kfree;
using nlohmann::json;

namespace {

std::string tmp(const char* name) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("kfree_cli_test_") + name);
  std::filesystem::remove(p);
  return p.string();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({"moment", "--k", "2"}) == 2);             // missing --n, --p
  CHECK(run_cli({"sieve", "--n", "10", "--bogus"}) == 2);  // unknown flag
  CHECK(run_cli({"frobnicate"}) == 2);                     // unknown subcommand
  CHECK(run_cli({}) == 2);                                 // no subcommand
  CHECK(run_cli({"sweep", "--k", "2", "--p", "1.0", "--n-grid", "14:xx",
                 "--out", tmp("never.csv")}) == 2);        // bad grid token
  CHECK(run_cli({"sieve", "--k", "99", "--n", "10"}) == 2);  // out of range
}

TEST_CASE("version flag exits cleanly") {
  CHECK(run_cli({"--version"}) == 0);
}

TEST_CASE("sieve writes a parsable table") {
  auto out = tmp("sieve.csv");
  CHECK(run_cli({"sieve", "--k", "2", "--n", "100", "--out", out}) == 0);

  Csv table = parse_csv(read_text(out));
  REQUIRE(table.header ==
          (std::vector<std::string>{"n", "mu", "mu_k"}));
  REQUIRE(table.rows.size() == 100);

  auto mob = sieve_mobius(100);
  auto kf = sieve_kfree(2, 100);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& row = table.rows[i];
    CHECK(row[0] == std::to_string(i + 1));
    CHECK(row[1] == std::to_string(int(mob.mu(i + 1))));
    CHECK(row[2] == (kf.test(i + 1) ? "1" : "0"));
  }
  CHECK(read_text(out).rfind("# manifest=", 0) == 0);
  std::filesystem::remove(out);
}

TEST_CASE("moment emits schema-tagged json") {
  auto out = tmp("moment.json");
  CHECK(run_cli({"moment", "--k", "2", "--n", "1024", "--p", "2.0", "--out",
                 out}) == 0);

  json j = json::parse(read_text(out));
  CHECK(j.at("schema_version").get<int>() == 1);
  CHECK(j.at("manifest").at("command").get<std::string>() == "moment");
  CHECK(j.at("manifest").at("id").get<std::string>().size() == 16);

  const json& r = j.at("result");
  CHECK(r.at("k").get<int>() == 2);
  CHECK(r.at("p").get<double>() == 2.0);
  CHECK(r.at("N").get<std::uint64_t>() == 1024);
  CHECK(r.at("converged").get<bool>());
  double count = double(count_kfree(2, 1024));
  CHECK(r.at("value").get<double>() == doctest::Approx(count).epsilon(1e-9));
  CHECK(r.at("err").get<double>() >= 0.0);
  CHECK(r.at("label").get<std::string>() == "mu_k:k=2:N=1024");
  std::filesystem::remove(out);
}

TEST_CASE("sweep output is byte-stable across reruns") {
  auto a = tmp("sweep_a.csv");
  auto b = tmp("sweep_b.csv");
  std::vector<std::string> args = {"sweep", "--k", "2", "--p", "2.0",
                                   "--n-grid", "8:10"};
  auto run_to = [&](const std::string& path) {
    auto v = args;
    v.push_back("--out");
    v.push_back(path);
    return run_cli(v);
  };
  CHECK(run_to(a) == 0);
  CHECK(run_to(b) == 0);
  CHECK(read_text(a) == read_text(b));

  Csv table = parse_csv(read_text(a));
  CHECK(table.header == (std::vector<std::string>{"k", "p", "N", "M", "value",
                                                  "err", "label"}));
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][2] == "256");
  CHECK(table.rows[2][2] == "1024");
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("fit from file matches fit from scratch") {
  auto sweep_path = tmp("fit_sweep.csv");
  auto fit_path = tmp("fit.json");
  CHECK(run_cli({"sweep", "--k", "2", "--p", "2.0", "--n-grid", "8:12",
                 "--out", sweep_path}) == 0);
  CHECK(run_cli({"fit", "--in", sweep_path, "--out", fit_path}) == 0);

  json j = json::parse(read_text(fit_path));
  CHECK(j.at("schema_version").get<int>() == 1);
  // the consumed file is recorded with its content hash
  CHECK(j.at("manifest").at("inputs").contains(sweep_path));

  std::vector<std::uint64_t> ns = {256, 512, 1024, 2048, 4096};
  auto rows = moment_sweep(2, 2.0, ns);
  auto direct = fit_exponent(rows);
  CHECK(j.at("fit").at("slope").get<double>() ==
        doctest::Approx(direct.slope).epsilon(1e-9));
  CHECK(j.at("fit").at("theoretical").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("fit").at("points").size() == 5);
  std::filesystem::remove(sweep_path);
  std::filesystem::remove(fit_path);
}

TEST_CASE("bad numeric cell in an input table is a usage error") {
  auto path = tmp("bad.csv");
  write_text_atomic(path,
                    "k,p,N,M,value,err,label\n"
                    "2,1.5,1024,8192,abc,0,mu_k:k=2:N=1024\n");
  CHECK(run_cli({"fit", "--in", path}) == 2);
  std::filesystem::remove(path);
}

TEST_CASE("ecurve writes csv and svg") {
  auto out = tmp("ecurve.csv");
  auto plot = tmp("ecurve.svg");
  CHECK(run_cli({"ecurve", "--k", "2", "--p-grid", "1:2:0.5", "--n-grid",
                 "8:11", "--out", out, "--plot", plot}) == 0);

  Csv table = parse_csv(read_text(out));
  REQUIRE(table.rows.size() == 3);  // p = 1, 1.5, 2
  CHECK(table.header[1] == "p");
  CHECK(table.rows[0][1] == "1");
  CHECK(table.rows[2][1] == "2");

  std::string svg = read_text(plot);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("theoretical E(p)") != std::string::npos);
  CHECK(svg.find("fitted slope") != std::string::npos);
  std::filesystem::remove(out);
  std::filesystem::remove(plot);
}

TEST_CASE("verification subcommands succeed on healthy inputs") {
  CHECK(run_cli({"verify", "kernels", "--count", "100", "--seed", "7"}) == 0);
  CHECK(run_cli({"verify", "parseval", "--k", "2", "--n", "10000"}) == 0);
  CHECK(run_cli({"verify", "decomposition", "--k", "2", "--n", "100000"}) ==
        0);
}

TEST_CASE("majorarc small scan exits zero and writes rows") {
  auto out = tmp("majorarc.csv");
  CHECK(run_cli({"majorarc", "--k", "2", "--n", "10000", "--r-max", "3",
                 "--out", out}) == 0);
  Csv table = parse_csv(read_text(out));
  REQUIRE(table.rows.size() == 9);
  CHECK(table.header[0] == "r");
  std::filesystem::remove(out);
}

TEST_CASE("config supplies defaults, flags override") {
  auto cfg = tmp("config.ini");
  write_text_atomic(cfg,
                    "[sieve]\n"
                    "k=3\n"
                    "n=50\n");

  auto out1 = tmp("cfg_sieve1.csv");
  CHECK(run_cli({"--config", cfg, "sieve", "--out", out1}) == 0);
  Csv t1 = parse_csv(read_text(out1));
  REQUIRE(t1.rows.size() == 50);
  CHECK(t1.rows[3][2] == "1");  // mu_3(4) = 1, so k came from the config

  auto out2 = tmp("cfg_sieve2.csv");
  CHECK(run_cli({"--config", cfg, "sieve", "--n", "20", "--out", out2}) == 0);
  Csv t2 = parse_csv(read_text(out2));
  REQUIRE(t2.rows.size() == 20);  // flag wins over config
  CHECK(t2.rows[3][2] == "1");    // config k still applies

  std::filesystem::remove(cfg);
  std::filesystem::remove(out1);
  std::filesystem::remove(out2);
}
