#include "nil3/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace nil3;

namespace {

void require_pass(const SuiteReport& r) {
  for (const CheckResult& c : r.checks) {
    INFO(r.suite, ": ", c.name, " = ", c.value, " (threshold ", c.threshold, ") ", c.detail);
    CHECK(c.pass);
  }
  CHECK(r.passed());
  CHECK(!r.checks.empty());
}

}  // namespace

TEST_CASE("suite names") {
  std::vector<std::string> n = suite_names();
  REQUIRE(n.size() == 4);
  CHECK(n.front() == "geometry");
  CHECK(n.back() == "plateau");
  CHECK_THROWS_AS(run_suite("nope", VerifyConfig{}), std::invalid_argument);
  VerifyConfig bad;
  bad.samples = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("geometry and operator suites") {
  VerifyConfig cfg;
  SuiteReport g = verify_geometry(cfg);
  require_pass(g);
  SuiteReport again = verify_geometry(cfg);
  REQUIRE(again.checks.size() == g.checks.size());
  for (std::size_t k = 0; k < g.checks.size(); ++k) {
    CHECK(again.checks[k].name == g.checks[k].name);
    CHECK(again.checks[k].value == g.checks[k].value);
  }
  require_pass(verify_operator(cfg));
}

TEST_CASE("solver suite") { require_pass(verify_solver(VerifyConfig{})); }

TEST_CASE("plateau suite") { require_pass(verify_plateau(VerifyConfig{})); }

TEST_CASE("one failed check fails the suite") {
  CheckResult ok{"x", 2.0, 1.0, Bound::at_least, true, ""};
  SuiteReport r{"s", {ok}, 0.0};
  CHECK(r.passed());
  r.checks.push_back({"y", std::nan(""), 1.0, Bound::at_most, false, "exception"});
  CHECK(!r.passed());
}

TEST_CASE("integrate_geodesic rejects zero steps") {
  CHECK_THROWS_AS(integrate_geodesic({0, 0, 0}, {1, 0, 0}, 1.0, 0), std::invalid_argument);
  Nil3Point p = integrate_geodesic({0, 0, 0}, {1, 0, 0}, 2.0, 10);
  CHECK(p.x1 == doctest::Approx(2.0).epsilon(1e-14));
}
