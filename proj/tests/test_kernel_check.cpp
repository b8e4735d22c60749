#include <doctest.h>

#include <cmath>
#include <set>

#include "spotvol/kernel_check.hpp"
#include "support.hpp"

using namespace spotvol::kcheck;

TEST_CASE("periodic trapezoid is exact for low trigonometric polynomials") {
  const double v = periodic_trapezoid([](double x) { return 1.0 + std::cos(3.0 * x); }, 0.3, 64);
  CHECK(v == doctest::Approx(2.0 * testsupport::kPi));
  const double c2 = periodic_trapezoid([](double x) { return std::cos(x) * std::cos(x); }, -1.0, 16);
  CHECK(c2 == doctest::Approx(testsupport::kPi));
}

TEST_CASE("lemma suite") {
  const SuiteReport rep = run_lemma_suite();
  CHECK(rep.pass);
  REQUIRE(rep.rows.size() >= 8);
  std::set<std::string> names;
  for (const LemmaRow& r : rep.rows) {
    CAPTURE(r.name);
    names.insert(r.name);
    CHECK(r.orders.size() == r.observed.size());
    CHECK(r.errors.size() == r.orders.size());
    for (std::size_t i = 0; i < r.orders.size(); ++i) {
      CHECK(std::isfinite(r.observed[i]));
      // Tolerance is 10 over the kernel order actually used (e.g. N = cn for the discrete rows).
      CHECK(r.tolerances[i] > 0.0);
      CHECK(r.tolerances[i] <= 10.0 / r.orders[i] * 4.0);
      if (r.counted) CHECK(r.errors[i] <= r.tolerances[i]);
    }
    if (r.counted) CHECK(r.pass);
  }
  CHECK(names.size() == rep.rows.size());
  CHECK(names.count("dirichlet_d1") == 1);
  CHECK(names.count("fejer_d2") == 1);

  for (const LemmaRow& r : rep.rows) {
    if (r.name == "dirichlet_d1") CHECK(r.target == doctest::Approx(testsupport::kPi / 3.0));
    if (r.name == "dirichlet_d2") CHECK(r.target == doctest::Approx(testsupport::kPi / 5.0));
    if (r.name == "fejer_d2") CHECK(r.target == doctest::Approx(4.0 * testsupport::kPi / 105.0));
  }
}

TEST_CASE("lemma suite is independent of the thread count") {
  SuiteOptions a;
  a.orders = {16, 32, 64};
  a.quadrature_points = 1 << 12;
  SuiteOptions b = a;
  b.jobs = 4;
  const SuiteReport ra = run_lemma_suite(a), rb = run_lemma_suite(b);
  REQUIRE(ra.rows.size() == rb.rows.size());
  for (std::size_t i = 0; i < ra.rows.size(); ++i) CHECK(ra.rows[i].observed == rb.rows[i].observed);
}
