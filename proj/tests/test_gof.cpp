#include <doctest.h>

#include <cmath>

#include "relgrow/error.hpp"
#include "relgrow/gof.hpp"
#include "relgrow/numerics.hpp"

using namespace relgrow;
using namespace relgrow::gof;

TEST_CASE("verdict decision rule") {
  CHECK_FALSE(make_verdict(Test::Cvm, 0.3588, 0.173, 0.1, 40).passed);
  CHECK(make_verdict(Test::Cvm, 0.1, 0.173, 0.1, 40).passed);
  CHECK_FALSE(make_verdict(Test::Cvm, 0.173, 0.173, 0.1, 40).passed);
}

TEST_CASE("error metrics") {
  const std::vector<double> y{3, 5, 4, 2}, p{2.5, 5.5, 4, 1};
  CHECK(rmse(y, p) == doctest::Approx(std::sqrt((0.25 + 0.25 + 0 + 1) / 4)));
  CHECK(mre(54, 50.54) == doctest::Approx(3.46 / 54));
  const double sst = 0.25 + 2.25 + 0.25 + 2.25, sse = 1.5;
  CHECK(r_square(y, p) == doctest::Approx(1 - sse / sst));
  CHECK(adj_r_square(y, p, 1) == doctest::Approx(1 - (sse / sst) * 3 / 2));
  CHECK_THROWS_AS(adj_r_square(y, p, 3), Error);
  CHECK_THROWS_AS(rmse(y, std::vector<double>{1}), Error);
  CHECK_THROWS_AS(mre(0, 1), Error);
}

TEST_CASE("cvm statistic by hand") {
  const std::vector<double> u{0.1, 0.4, 0.8};
  const double want = 1.0 / 36 + std::pow(0.1 - 1.0 / 6, 2) + std::pow(0.4 - 0.5, 2) + std::pow(0.8 - 5.0 / 6, 2);
  CHECK(cvm_statistic(u) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("critical value table") {
  const auto& t = CvmCriticalTable::builtin();
  CHECK(t.critical(100, 0.1) == doctest::Approx(0.173));
  CHECK(t.critical(500, 0.1) == doctest::Approx(0.173));
  CHECK_THROWS_AS(t.critical(10, 0.2), Error);
  auto custom = CvmCriticalTable::from_csv("m,alpha,critical\n10,0.1,0.2\n20,0.1,0.3\n");
  CHECK(custom.critical(15, 0.1) == doctest::Approx(0.25));
  CHECK(CvmCriticalTable::from_csv(custom.to_csv()).critical(15, 0.1) == doctest::Approx(0.25));
}

TEST_CASE("cvm test on an exactly fitting sample") {
  // Times at the uniform plotting positions of the fitted model pass.
  srgm::Fit f;
  f.model = srgm::Model(srgm::Kind::PowerLaw, 30, 1.0);
  f.observation_end = 1.0;
  std::vector<double> t;
  for (int i = 1; i <= 30; ++i) t.push_back((2.0 * i - 1) / 60.0);
  const auto v = cvm_test(t, f);
  CHECK(v.statistic == doctest::Approx(1.0 / 360));
  CHECK(v.passed);
  CHECK(v.df_or_m == 30);
}

TEST_CASE("chi-square pooling and degrees of freedom") {
  const std::vector<double> obs{0, 1, 5, 9, 6, 2, 1, 0}, exp{0.2, 0.6, 4.8, 8.5, 6.3, 2.4, 0.7, 0.5};
  const auto cells = pool_cells(obs, exp);
  for (double e : cells.expected) CHECK(e >= 1.0);
  double so = 0, se = 0;
  for (double v : cells.observed) so += v;
  for (double v : cells.expected) se += v;
  CHECK(so == 24);
  CHECK(se == doctest::Approx(24));
  const auto v = chi_square_test(obs, exp, 2);
  CHECK(v.df_or_m == int(cells.observed.size()) - 3);
  double stat = 0;
  for (std::size_t i = 0; i < cells.observed.size(); ++i)
    stat += std::pow(cells.observed[i] - cells.expected[i], 2) / cells.expected[i];
  CHECK(v.statistic == doctest::Approx(stat));
  CHECK(v.critical == doctest::Approx(numerics::chi2_inverse(v.df_or_m, 0.9)));
  CHECK_THROWS_AS(chi_square_test(std::vector<double>{3, 4}, std::vector<double>{3, 4}, 2), Error);
}
