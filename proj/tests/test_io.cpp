#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "lapdeconv/errors.hpp"
#include "lapdeconv/io.hpp"

using namespace lapdeconv;

namespace {

SeriesCsv parse(const std::string& text) {
  std::istringstream in(text);
  return read_series_csv(in);
}

}  // namespace

TEST_CASE("series CSV reader") {
  const auto s = parse("t,y\n0.1,1.5\n0.2, -2e-3\n\n0.3,4\n");
  REQUIRE(s.t.size() == 3);
  CHECK(s.t[1] == 0.2);
  CHECK(s.y[1] == -2e-3);
  CHECK(parse("\xEF\xBB\xBFt,y\r\n1,2\r\n2,3\r\n").y[1] == 3.0);
  CHECK(parse(" t , y \n1,2\n2,3\n").t.size() == 2);

  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("x,y\n1,2\n2,3\n"), InputError);
  CHECK_THROWS_AS(parse("t,y,z\n1,2\n2,3\n"), InputError);
  CHECK_THROWS_AS(parse("1,2\n2,3\n3,4\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n2,1\n1,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1,nan\n2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1,inf\n2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1,2x\n2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1\n2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1,2,3\n2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,y\n1,2\n"), InputError);
  CHECK_THROWS_AS(read_series_csv(std::string("/nonexistent/file.csv")), InputError);
}

TEST_CASE("property: format_double round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(rng), ex(rng));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("columns and report output") {
  std::ostringstream cols;
  write_columns_csv(cols, "t", "f_hat", {0.0, 1.0}, {2.5, -1.0});
  CHECK(cols.str() == "t,f_hat\n0,2.5\n1,-1\n");
  const auto back = parse("t,y\n" + cols.str().substr(cols.str().find('\n') + 1));
  CHECK(back.y[0] == 2.5);

  ScenarioResult r;
  r.scenario = table_cell("g3", "f2", 250, 2, 7, 1);
  r.mean = 0.25;
  r.std = 0.5;
  r.failures = 1;
  r.run_mse = {0.1, std::nan("")};
  std::ostringstream rep;
  write_report_csv(rep, {r});
  CHECK(rep.str() == "g,f,n,i,mean,std,runs,failures\ng3,f2,250,2,0.25,0.5,7,1\n");
  const auto j = report_json({r});
  CHECK(j["scenarios"][0]["run_mse"][1].is_null());
  CHECK(j["scenarios"][0]["estimator"]["C"] == "auto");
}
