#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "enclosure/log_scaled.hpp"

using enclosure::LogAccumulator;
using enclosure::LogScaled;
using enclosure::log_exp;

TEST_CASE("log-scaled round trip and zero handling") {
  CHECK(LogScaled::from_value(0.0).is_zero());
  CHECK(LogScaled::zero().value() == 0.0);
  CHECK(LogScaled::from_value(3.5).value() == doctest::Approx(3.5));
  CHECK(LogScaled::from_value(-2.25e-7).value() ==
        doctest::Approx(-2.25e-7));
  CHECK(LogScaled::from_value(1.0).log_abs == 0.0);
  CHECK(LogScaled::from_log(2.0, -1).sign == -1);
}

TEST_CASE("arithmetic matches doubles in the representable range") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-20.0, 20.0);
  std::uniform_int_distribution<int> sgn(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double a = (sgn(rng) ? 1 : -1) * std::exp(mag(rng));
    const double b = (sgn(rng) ? 1 : -1) * std::exp(mag(rng));
    const LogScaled la = LogScaled::from_value(a);
    const LogScaled lb = LogScaled::from_value(b);
    CHECK((la * lb).value() == doctest::Approx(a * b).epsilon(1e-12));
    CHECK((la / lb).value() == doctest::Approx(a / b).epsilon(1e-12));
    CHECK((la + lb).value() == doctest::Approx(a + b).epsilon(1e-10));
    CHECK((la - lb).value() == doctest::Approx(a - b).epsilon(1e-10));
  }
}

TEST_CASE("exact cancellation gives zero") {
  const LogScaled a = LogScaled::from_value(4.75);
  CHECK((a - a).is_zero());
  CHECK((a + (-a)).is_zero());
}

TEST_CASE("survives exponents far past double range") {
  // value() of exp(-5000) underflows, but the representation must not.
  const LogScaled tiny = log_exp(-5000.0);
  const LogScaled big = log_exp(4000.0);
  const LogScaled prod = tiny * big;  // exp(-1000), still subnormal-ish
  CHECK(prod.log_abs == doctest::Approx(-1000.0));
  CHECK(prod.sign == 1);
  // ratio of two tiny values of the same scale is order one
  const LogScaled r = log_exp(-5000.0) / log_exp(-4999.0);
  CHECK(r.value() == doctest::Approx(std::exp(-1.0)));
  // addition keeps the dominant term when the other is negligible
  const LogScaled s = log_exp(-5000.0) + log_exp(-6000.0);
  CHECK(s.log_abs == doctest::Approx(-5000.0));
}

TEST_CASE("accumulator matches a compensated plain sum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(500);
  for (auto& x : xs) x = u(rng) * std::exp(10.0 * u(rng));
  LogAccumulator acc;
  long double plain = 0.0L;
  for (const double x : xs) {
    acc.add_value(x);
    plain += x;
  }
  CHECK(acc.total().value() ==
        doctest::Approx(static_cast<double>(plain)).epsilon(1e-10));
}

TEST_CASE("accumulator handles widely separated scales") {
  LogAccumulator acc;
  acc.add(log_exp(-3000.0));
  acc.add(log_exp(-3000.0));
  acc.add(-log_exp(-3000.0));
  const LogScaled t = acc.total();
  CHECK(t.sign == 1);
  CHECK(t.log_abs == doctest::Approx(-3000.0).epsilon(1e-12));
}
