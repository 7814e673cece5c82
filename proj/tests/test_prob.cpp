#include <doctest.h>

#include <random>

#include "gpcap/prob.hpp"
#include "test_support.hpp"

using namespace gpcap;

TEST_CASE("entropy: anchors") {
  CHECK(entropy(Dist::uniform(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(Dist::point_mass(4, 2)) == doctest::Approx(0.0).epsilon(1e-12));
  // direct evaluation of -sum p log2 p for (0.11, 0.89)
  const double expect = testsupport::entropy_oracle({0.11, 0.89});
  CHECK(expect == doctest::Approx(0.49991597).epsilon(1e-6));
  CHECK(entropy(Dist({0.11, 0.89})) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(entropy(Dist({0.11, 0.89})) - 0.49993) < 1e-4);
}

TEST_CASE("entropy: bounded by log of alphabet size") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 6);
    Dist d(testsupport::random_simplex_row(rng, n));
    const double h = entropy(d);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("Dist: validation and repair") {
  CHECK_THROWS_AS(Dist({0.5, 0.6}), std::invalid_argument);         // mass 1.1
  CHECK_THROWS_AS(Dist({-0.2, 1.2}), std::invalid_argument);        // negative entry
  CHECK_NOTHROW(Dist({0.5, 0.5 + 5e-10}));                          // drift repaired
  Dist d({0.25, 0.75 + 3e-10});
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sum += d[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

static JointTable product_table() {
  // independent product of (0.3, 0.7) and (0.6, 0.4)
  JointTable j({"A", "B"}, {2, 2});
  const double pa[] = {0.3, 0.7};
  const double pb[] = {0.6, 0.4};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const std::size_t idx[] = {a, b};
      j.at(idx) = pa[a] * pb[b];
    }
  j.finalize();
  return j;
}

TEST_CASE("mutual information: anchors") {
  CHECK(mutual_information(product_table(), {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));

  // Y = X for uniform binary X
  JointTable copy({"X", "Y"}, {2, 2});
  for (std::size_t x = 0; x < 2; ++x) {
    const std::size_t idx[] = {x, x};
    copy.at(idx) = 0.5;
  }
  copy.finalize();
  CHECK(mutual_information(copy, {"X"}, {"Y"}) == doctest::Approx(1.0).epsilon(1e-12));

  // uniform binary X through BSC(0.11): I = 1 - h(0.11)
  JointTable bsc({"X", "Y"}, {2, 2});
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const std::size_t idx[] = {x, y};
      bsc.at(idx) = 0.5 * (x == y ? 0.89 : 0.11);
    }
  bsc.finalize();
  const double expect = 1.0 - testsupport::entropy_oracle({0.11, 0.89});
  CHECK(mutual_information(bsc, {"X"}, {"Y"}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(mutual_information(bsc, {"X"}, {"Y"}) - 0.50007) < 1e-4);
}

TEST_CASE("mutual information: unknown axis and overlap errors") {
  auto j = product_table();
  CHECK_THROWS_AS(mutual_information(j, {"A"}, {"Z"}), std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(j, {"A"}, {"A"}), std::invalid_argument);
  CHECK_THROWS_AS(conditional_mutual_information(j, {"A"}, {"B"}, {"A"}), std::invalid_argument);
}

TEST_CASE("conditional MI: empty conditioning equals MI; copies give zero") {
  auto j = product_table();
  CHECK(conditional_mutual_information(j, {"A"}, {"B"}, {}) ==
        doctest::Approx(mutual_information(j, {"A"}, {"B"})).epsilon(1e-15));

  // V1 = V2 = U, plus an independent S axis
  JointTable t({"U", "V1", "V2", "S"}, {2, 2, 2, 2});
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t s = 0; s < 2; ++s) {
      const std::size_t idx[] = {u, u, u, s};
      t.at(idx) = 0.25;
    }
  t.finalize();
  CHECK(conditional_mutual_information(t, {"V1"}, {"V2"}, {"U", "S"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conditional MI: Markov chain A - C - B has I(A;B|C) = 0") {
  // A uniform; C = A through BSC(0.1); B = C through BSC(0.1)
  JointTable t({"A", "C", "B"}, {2, 2, 2});
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < 2; ++b) {
        const double pac = (a == c) ? 0.9 : 0.1;
        const double pcb = (c == b) ? 0.9 : 0.1;
        const std::size_t idx[] = {a, c, b};
        t.at(idx) = 0.5 * pac * pcb;
      }
  t.finalize();
  CHECK(std::abs(conditional_mutual_information(t, {"A"}, {"B"}, {"C"})) < 1e-10);
  CHECK(conditional_mutual_information(t, {"A"}, {"B"}, {"C"}) >= -1e-10);
}

TEST_CASE("chain rule I(A;B,C) = I(A;B) + I(A;C|B) on random tables") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t na = 2 + rng() % 2, nb = 2 + rng() % 2, nc = 2 + rng() % 2;
    auto flat = testsupport::random_simplex_row(rng, na * nb * nc);
    JointTable j({"A", "B", "C"}, {na, nb, nc}, flat);
    const double lhs = mutual_information(j, {"A"}, {"B", "C"});
    const double rhs = mutual_information(j, {"A"}, {"B"}) +
                       conditional_mutual_information(j, {"A"}, {"C"}, {"B"});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    CHECK(mutual_information(j, {"A"}, {"B"}) >= -1e-10);
    // symmetry
    CHECK(mutual_information(j, {"A"}, {"B"}) ==
          doctest::Approx(mutual_information(j, {"B"}, {"A"})).epsilon(1e-12));
    // oracle equivalence on an independent recomputation path
    testsupport::JointOracle oracle(flat, {na, nb, nc});
    CHECK(mutual_information(j, {"A"}, {"B"}) == doctest::Approx(oracle.mi({0}, {1})).epsilon(1e-12));
    CHECK(conditional_mutual_information(j, {"A"}, {"C"}, {"B"}) ==
          doctest::Approx(oracle.cmi({0}, {2}, {1})).epsilon(1e-12));
  }
}

TEST_CASE("compose: identity, BSC cascade, constant map") {
  const Channel w1 = Channel::binary_mod(0.1);
  const Channel id = Channel::identity(2);
  const Channel same = compose(w1, id);
  for (std::size_t r = 0; r < w1.num_rows(); ++r)
    for (std::size_t y = 0; y < 2; ++y) CHECK(same.row(r)[y] == doctest::Approx(w1.row(r)[y]));

  // BSC(0.1) cascaded with BSC(0.1) is BSC(0.18)
  const Channel b = compose(Channel::bsc(0.1), Channel::bsc(0.1));
  CHECK(b.row(0)[1] == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(b.row(1)[0] == doctest::Approx(0.18).epsilon(1e-12));

  // constant-output post-map erases input dependence
  const Channel constant({2}, 2, {0.3, 0.7, 0.3, 0.7});
  const Channel c = compose(w1, constant);
  for (std::size_t r = 0; r < c.num_rows(); ++r) {
    CHECK(c.row(r)[0] == doctest::Approx(0.3));
    CHECK(c.row(r)[1] == doctest::Approx(0.7));
  }

  CHECK_THROWS_AS(compose(w1, Channel({3}, 2, std::vector<double>(6, 1.0 / 2))),
                  std::invalid_argument);
}

TEST_CASE("compose: preserves row stochasticity on random channels") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    auto w1 = testsupport::random_channel(rng, {2, 2}, 3);
    auto wt = testsupport::random_channel(rng, {3}, 2 + rng() % 3);
    auto w2 = compose(w1, wt);
    for (std::size_t r = 0; r < w2.num_rows(); ++r) {
      double sum = 0.0;
      for (std::size_t y = 0; y < w2.output_size(); ++y) {
        CHECK(w2.row(r)[y] >= 0.0);
        sum += w2.row(r)[y];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("data processing: post-composition cannot raise MI with the input") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto w = testsupport::random_channel(rng, {2}, 3);
    auto wt = testsupport::random_channel(rng, {3}, 3);
    auto wc = compose(w, wt);
    auto px = testsupport::random_simplex_row(rng, 2);

    auto build = [&](const Channel& ch) {
      JointTable j({"X", "Y"}, {2, ch.output_size()});
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < ch.output_size(); ++y) {
          const std::size_t idx[] = {x, y};
          j.at(idx) = px[x] * ch.row(x)[y];
        }
      j.finalize();
      return j;
    };
    const double direct = mutual_information(build(w), {"X"}, {"Y"});
    const double degraded = mutual_information(build(wc), {"X"}, {"Y"});
    CHECK(degraded <= direct + 1e-9);
  }
}

TEST_CASE("JointTable: size cap and duplicate axes rejected") {
  CHECK_THROWS_AS(JointTable({"A", "B"}, {4000, 4000}), std::invalid_argument);
  CHECK_THROWS_AS(JointTable({"A", "A"}, {2, 2}), std::invalid_argument);
}
