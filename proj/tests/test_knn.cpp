#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "qsync/common.hpp"
#include "qsync/knn.hpp"

using namespace qsync;
using namespace qsync::knn;

namespace {

using Rows = std::vector<std::vector<double>>;

KnnModel fit_rows(const Rows& rows, std::vector<double> y, int k) {
  return KnnModel::fit(FeatureMatrix::from_rows(rows), std::move(y), k);
}

double predict(const KnnModel& m, const std::vector<double>& x) { return m.predict(x); }

}  // namespace

TEST_CASE("fit") {
  SUBCASE("single point, k = 1") {
    const auto m = fit_rows({{0.3, -0.1}}, {0.42}, 1);
    CHECK(predict(m, {5.0, 5.0}) == 0.42);
    CHECK(predict(m, {-1.0, 0.0}) == 0.42);
  }
  SUBCASE("rejects k > N, k < 1, ragged rows and count mismatch") {
    const Rows five{{0}, {1}, {2}, {3}, {4}};
    CHECK_THROWS_AS(fit_rows(five, {0, 0, 0, 0, 0}, 6), std::invalid_argument);
    CHECK_THROWS_AS(fit_rows(five, {0, 0, 0, 0, 0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_rows({{0, 1}, {2}}, {0, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_rows(five, {0, 0, 0}, 1), std::invalid_argument);
  }
  SUBCASE("no feature scaling") {
    // query (0,0); rows A=(1,0) B=(0,2): A nearest (1 < 4). Scaling column 0
    // by 3 gives A=(3,0): now B nearest (9 > 4).
    const auto plain = fit_rows({{1, 0}, {0, 2}}, {1.0, -1.0}, 1);
    const auto scaled = fit_rows({{3, 0}, {0, 2}}, {1.0, -1.0}, 1);
    CHECK(predict(plain, {0, 0}) == 1.0);
    CHECK(predict(scaled, {0, 0}) == -1.0);
  }
}

TEST_CASE("predict") {
  SUBCASE("training row, k = 1") {
    const auto m = fit_rows({{0, 0}, {1, 1}, {2, 0}}, {0.1, 0.2, 0.3}, 1);
    CHECK(predict(m, {1, 1}) == 0.2);
  }
  SUBCASE("two equidistant rows, k = 2") {
    const auto m = fit_rows({{-1, 0}, {1, 0}, {5, 5}}, {0.2, 0.8, -1.0}, 2);
    CHECK(predict(m, {0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("ties at the k-th distance go to the lowest row index") {
    const auto m = fit_rows({{0, 1}, {1, 0}, {0, -1}, {-1, 0}}, {0.1, 0.2, 0.3, 0.4}, 2);
    const auto nn = m.neighbors(std::vector<double>{0, 0});
    REQUIRE(nn.size() == 2);
    CHECK(nn[0].index == 0);
    CHECK(nn[1].index == 1);
  }
  SUBCASE("width mismatch") {
    const auto m = fit_rows({{0, 0}}, {0.0}, 1);
    CHECK_THROWS_AS(predict(m, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("matches the brute-force oracle on 200 random instances") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::uniform_int_distribution<int> d_dist(1, 10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = n_dist(rng);
    const int d = d_dist(rng);
    const int k = std::uniform_int_distribution<int>(1, std::min(n, 7))(rng);
    Rows X(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (auto& row : X)
      for (auto& v : row) v = u(rng);
    for (auto& v : y) v = u(rng);
    // coarse features on every 4th instance to force distance ties
    if (inst % 4 == 0)
      for (auto& row : X)
        for (auto& v : row) v = std::round(v * 2.0) / 2.0;
    const auto model = fit_rows(X, y, k);
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = inst % 4 == 0 ? std::round(u(rng) * 2.0) / 2.0 : u(rng);
      CHECK(predict(model, x) == oracle::knn_predict(X, y, x, k));
    }
  }
}

TEST_CASE("predictions lie within the target range") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Rows X(40, std::vector<double>(3));
  std::vector<double> y(40);
  for (auto& row : X)
    for (auto& v : row) v = u(rng);
  for (auto& v : y) v = u(rng);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const auto m = fit_rows(X, y, 5);
  for (int q = 0; q < 100; ++q) {
    const double p = predict(m, {3 * u(rng), 3 * u(rng), 3 * u(rng)});
    CHECK(p >= *lo);
    CHECK(p <= *hi);
  }
}

TEST_CASE("row permutation does not change tie-free predictions") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Rows X(30, std::vector<double>(4));
  std::vector<double> y(30);
  for (auto& row : X)
    for (auto& v : row) v = u(rng);
  for (auto& v : y) v = u(rng);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Rows Xp;
  std::vector<double> yp;
  for (auto i : perm) {
    Xp.push_back(X[i]);
    yp.push_back(y[i]);
  }
  const auto a = fit_rows(X, y, 5);
  const auto b = fit_rows(Xp, yp, 5);
  for (int q = 0; q < 50; ++q) {
    const std::vector<double> x{u(rng), u(rng), u(rng), u(rng)};
    CHECK(predict(a, x) == doctest::Approx(predict(b, x)).epsilon(1e-14));
  }
}

TEST_CASE("duplicating a training row leaves k = 1 predictions unchanged") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Rows X(20, std::vector<double>(2));
  std::vector<double> y(20);
  for (auto& row : X)
    for (auto& v : row) v = u(rng);
  for (auto& v : y) v = u(rng);
  Rows X2(X);
  std::vector<double> y2(y);
  X2.push_back(X[7]);
  y2.push_back(y[7]);
  const auto a = fit_rows(X, y, 1);
  const auto b = fit_rows(X2, y2, 1);
  for (int q = 0; q < 50; ++q) {
    const std::vector<double> x{u(rng), u(rng)};
    CHECK(predict(a, x) == predict(b, x));
  }
}

TEST_CASE("perturbations inside the neighbor margin do not move the prediction") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Rows X(25, std::vector<double>(3));
  std::vector<double> y(25);
  for (auto& row : X)
    for (auto& v : row) v = u(rng);
  for (auto& v : y) v = u(rng);
  const int k = 3;
  const auto m = fit_rows(X, y, k);
  for (int q = 0; q < 30; ++q) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    std::vector<double> dist;
    for (const auto& row : X) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += (row[c] - x[c]) * (row[c] - x[c]);
      dist.push_back(std::sqrt(s));
    }
    std::sort(dist.begin(), dist.end());
    const double margin = dist[k] - dist[k - 1];
    // moving x by delta shifts every distance by at most delta
    const double delta = 0.4 * margin;
    std::vector<double> moved(x);
    moved[0] += delta;
    CHECK(predict(m, moved) == predict(m, x));
  }
}

TEST_CASE("evaluate") {
  const Rows X{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const std::vector<double> y{0.1, -0.3, 0.7, 0.2};
  const auto m = fit_rows(X, y, 1);
  const auto e = evaluate(m, FeatureMatrix::from_rows(X), y);
  CHECK(e.report.mae == 0.0);
  CHECK(e.predictions == y);
  CHECK_THROWS_AS(evaluate(m, FeatureMatrix::from_rows({{0, 0, 0}}), std::vector<double>{0.0}),
                  std::invalid_argument);
}

TEST_CASE("model round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "qsync_test_knn";
  std::filesystem::create_directories(dir);
  const Rows X{{0.125, -1e-17}, {1.0 / 3.0, 2.0}, {-0.75, 0.1}};
  const auto m = fit_rows(X, {0.1, 1.0 / 7.0, -0.9}, 2);
  save_model(m, dir / "model.csv");
  const auto back = load_model(dir / "model.csv");
  CHECK(back.k() == 2);
  CHECK(back.targets() == m.targets());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::equal(back.features().row(i).begin(), back.features().row(i).end(), m.features().row(i).begin()));
  }
  std::filesystem::remove_all(dir);
}
