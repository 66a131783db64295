#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lapdeconv/cli.hpp"
#include "lapdeconv/io.hpp"

using namespace lapdeconv;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_path(const std::string& name) { return std::string(LAPDECONV_TEST_DATA) + "/cli_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const std::string kG2 = R"({"form":"builtin","name":"g2"})";

}  // namespace

TEST_CASE("emitted data round-trips through deconvolve") {
  const auto data = data_path("g2f1.csv");
  const auto r = cli({"simulate", "--cell", "g2,f1,100,3", "--seed", "7", "--emit-data", data});
  REQUIRE(r.code == 0);
  CHECK(read_series_csv(data).t.size() == 100);

  const auto out = data_path("g2f1_fhat.csv");
  const auto d = cli({"deconvolve", "--input", data, "--kernel", kG2, "--sigma", "0.0125", "--output", out});
  REQUIRE(d.code == 0);
  CHECK(d.err.empty());
  const auto text = slurp(out);
  CHECK(text.rfind("t,f_hat\n", 0) == 0);
  const auto sidecar = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(sidecar["n"] == 100);
  CHECK(sidecar["T"] == 10.0);
  CHECK(sidecar["bandwidths"].size() == 2);
  CHECK(sidecar["decomposition"]["r"] == 1);
  CHECK(sidecar["config"]["L"] == 8);
  CHECK(sidecar["sigma_estimated"] == false);
  CHECK(sidecar["config"]["weights"] == "pc");

  const auto gm = cli({"deconvolve", "--input", data, "--kernel", kG2, "--sigma", "0.0125", "--weights", "gm", "--output", "-"});
  CHECK(gm.code == 0);
  CHECK(gm.out.find("\"weights\": \"gm\"") != std::string::npos);
  CHECK(cli({"deconvolve", "--input", data, "--kernel", kG2, "--sigma", "0.0125", "--weights", "xx", "--output", "-"}).code == 2);

  // same input bytes and flags give the same output bytes
  const auto out2 = data_path("g2f1_fhat2.csv");
  REQUIRE(cli({"deconvolve", "--input", data, "--kernel", kG2, "--sigma", "0.0125", "--output", out2}).code == 0);
  CHECK(slurp(out2) == text);

  const auto est = cli({"deconvolve", "--input", data, "--kernel", kG2, "--estimate-sigma", "--output", "-"});
  CHECK(est.code == 0);
  CHECK(est.out.find("\"sigma_estimated\": true") != std::string::npos);
}

TEST_CASE("exit statuses") {
  const auto unsorted = data_path("unsorted.csv");
  write(unsorted, "t,y\n0.2,1\n0.1,1\n0.3,1\n");
  const auto bad = cli({"deconvolve", "--input", unsorted, "--kernel", kG2, "--sigma", "0.1", "--output", "-"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("sorted") != std::string::npos);

  const auto missing = cli({"deconvolve", "--input", data_path("nope.csv"), "--kernel", kG2, "--sigma", "0.1", "--output", "-"});
  CHECK(missing.code == 2);

  const auto flat = data_path("flat.csv");
  {
    std::ostringstream s;
    s << "t,y\n";
    for (int i = 1; i <= 100; ++i) s << i * 0.1 << ",0\n";
    write(flat, s.str());
  }
  const auto low_order = cli({"deconvolve", "--input", flat, "--kernel", R"({"form":"builtin","name":"g1"})",
                              "--sigma", "0.1", "--L", "4", "--output", "-"});
  CHECK(low_order.code == 3);
  CHECK(low_order.err.find("must exceed r") != std::string::npos);
  CHECK(cli({"deconvolve", "--input", flat, "--kernel", R"({"form":"builtin","name":"g7"})", "--sigma", "0.1",
             "--output", "-"}).code == 3);
  CHECK(cli({"deconvolve", "--input", flat, "--kernel", "{not json", "--sigma", "0.1", "--output", "-"}).code == 3);
  CHECK(cli({"simulate", "--cell", "g8,f1,100,0", "--runs", "1"}).code == 3);

  // sigma^2 T^2 >= n leaves no bandwidth grid
  const auto est = cli({"deconvolve", "--input", flat, "--kernel", kG2, "--sigma", "5", "--output", "-"});
  CHECK(est.code == 4);
  CHECK(est.err.rfind("error: ", 0) == 0);

  CHECK(cli({"deconvolve", "--input", flat, "--kernel", kG2, "--output", "-"}).code == 2);
  CHECK(cli({"deconvolve", "--input", flat, "--kernel", kG2, "--sigma", "0.1", "--estimate-sigma", "--output", "-"}).code == 2);
  CHECK(cli({"deconvolve", "--input", flat, "--kernel", kG2, "--sigma", "0.1", "--C", "-1", "--output", "-"}).code == 2);
  CHECK(cli({"simulate", "--runs", "1"}).code == 2);
  CHECK(cli({"simulate", "--cell", "g2,f1", "--runs", "1"}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("simulate output is reproducible") {
  const std::vector<std::string> args{"simulate", "--cell", "g3,f3,100,2", "--runs", "3", "--seed", "7"};
  const auto a = cli(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "4"});
  const auto b = cli(threaded);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("g,f,n,i,mean,std,runs,failures\ng3,f3,100,2,", 0) == 0);

  const auto json_path = data_path("report.json");
  REQUIRE(cli({"simulate", "--cell", "g2,f2,100,0", "--runs", "2", "--json", json_path, "--csv", data_path("report.csv")}).code == 0);
  const auto report = nlohmann::json::parse(slurp(json_path));
  CHECK(report["scenarios"][0]["run_mse"].size() == 2);
  CHECK(report["scenarios"][0]["sigma"] == 0.1);
}

TEST_CASE("kernel subcommands") {
  const auto mk = cli({"make-kernel", "--L", "2", "--j", "0"});
  REQUIRE(mk.code == 0);
  const auto coeffs = nlohmann::json::parse(mk.out);
  REQUIRE(coeffs.size() == 5);
  CHECK(coeffs[0].get<double>() == doctest::Approx(15.0 / 16.0));
  CHECK(coeffs[2].get<double>() == doctest::Approx(-30.0 / 16.0));
  CHECK(cli({"make-kernel", "--L", "4", "--j", "4"}).code == 3);

  const auto csv = data_path("kernel.csv");
  REQUIRE(cli({"make-kernel", "--L", "4", "--j", "1", "--rho", "0.5", "--csv", csv}).code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("t,K\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1002);

  const auto ins = cli({"inspect-kernel", "--kernel", R"({"form":"builtin","name":"g3"})"});
  REQUIRE(ins.code == 0);
  const auto summary = nlohmann::json::parse(ins.out);
  CHECK(summary["r"] == 1);
  CHECK(summary["stable"] == true);
  CHECK(summary["poles"].size() == 1);
}
