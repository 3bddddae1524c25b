#include <esskit/heuristics.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace esskit;

TEST_CASE("ceil_count rounds up with a guard against float fuzz") {
  CHECK(ceil_count(0.0) == 0);
  CHECK(ceil_count(4.0) == 4);
  CHECK(ceil_count(4.2) == 5);
  CHECK(ceil_count(0.8999999999) == 1);
  CHECK(ceil_count(0.7 * 3.0) == 3);
  // a hair above an integer counts as that integer, not the next one
  CHECK(ceil_count(3.0 + 1e-13) == 3);
  CHECK(ceil_count(10.0 * 0.3) == 3);
}

TEST_CASE("random slot selection") {
  SECTION("full fraction selects every slot") {
    TrackedSet ts = rand_select(10, 1.0, 99);
    REQUIRE(ts.slots.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(ts.slots[i] == i + 1);
  }
  SECTION("deterministic per seed") {
    TrackedSet a = rand_select(10, 0.5, 1);
    TrackedSet b = rand_select(10, 0.5, 1);
    CHECK(a.slots == b.slots);
    CHECK(a.slots.size() == 5);
  }
  SECTION("sorted, unique, in range") {
    TrackedSet ts = rand_select(100, 0.37, 5);
    REQUIRE(ts.slots.size() == 37);
    CHECK(std::is_sorted(ts.slots.begin(), ts.slots.end()));
    CHECK(std::adjacent_find(ts.slots.begin(), ts.slots.end()) == ts.slots.end());
    CHECK(ts.slots.front() >= 1);
    CHECK(ts.slots.back() <= 100);
  }
  SECTION("every slot is drawn with frequency near the fraction") {
    std::vector<int> hits(10, 0);
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed)
      for (std::size_t s : rand_select(10, 0.5, std::uint64_t(seed)).slots) ++hits[s - 1];
    for (int h : hits) {
      double f = double(h) / trials;
      CHECK(f >= 0.48);
      CHECK(f <= 0.52);
    }
  }
  SECTION("sets grow by inclusion as the fraction rises at a fixed seed") {
    for (std::uint64_t seed : {1ULL, 7ULL, 23ULL}) {
      TrackedSet prev = rand_select(288, 0.7, seed);
      for (double rho2 : {0.8, 0.9, 1.0}) {
        TrackedSet cur = rand_select(288, rho2, seed);
        CHECK(std::includes(cur.slots.begin(), cur.slots.end(),
                            prev.slots.begin(), prev.slots.end()));
        prev = cur;
      }
    }
  }
}

TEST_CASE("smallest-magnitude slot selection") {
  SECTION("picks the smallest magnitudes") {
    TrackedSet ts = min_cap_select({0.5, -0.1, 0.9, 0.2}, 0.5);
    CHECK(ts.slots == std::vector<std::size_t>{2, 4});
  }
  SECTION("full fraction selects every slot") {
    TrackedSet ts = min_cap_select({0.5, -0.1, 0.9, 0.2}, 1.0);
    CHECK(ts.slots == std::vector<std::size_t>{1, 2, 3, 4});
  }
  SECTION("ties break toward the earlier slot") {
    TrackedSet ts = min_cap_select({0.3, -0.3, 0.3, -0.3}, 0.5);
    CHECK(ts.slots == std::vector<std::size_t>{1, 2});
  }
  SECTION("tracked magnitudes never exceed untracked ones") {
    std::mt19937_64 rng(17);
    std::vector<double> beta(200);
    for (double& v : beta) v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    TrackedSet ts = min_cap_select(beta, 0.65);
    std::vector<char> tracked(beta.size() + 1, 0);
    for (std::size_t s : ts.slots) tracked[s] = 1;
    double max_in = 0.0, min_out = 1e300;
    for (std::size_t i = 0; i < beta.size(); ++i) {
      if (tracked[i + 1]) max_in = std::max(max_in, std::fabs(beta[i]));
      else min_out = std::min(min_out, std::fabs(beta[i]));
    }
    CHECK(max_in <= min_out + 1e-12);
  }
}

TEST_CASE("fixed-interval slot selection") {
  SECTION("ten slots at eighty percent skips slots five and ten") {
    TrackedSet ts = fix_int_select(10, 0.8);
    CHECK(ts.slots == std::vector<std::size_t>{1, 2, 3, 4, 6, 7, 8, 9});
  }
  SECTION("full fraction skips nothing") {
    TrackedSet ts = fix_int_select(10, 1.0);
    REQUIRE(ts.slots.size() == 10);
  }
  SECTION("seven slots at half: skips at three, five, seven") {
    TrackedSet ts = fix_int_select(7, 0.5);
    CHECK(ts.slots == std::vector<std::size_t>{1, 2, 4, 6});
  }
  SECTION("skip positions are evenly spaced") {
    for (std::size_t T : {96u, 288u, 97u}) {
      for (double rho2 : {0.7, 0.8, 0.9}) {
        TrackedSet ts = fix_int_select(T, rho2);
        std::vector<char> tracked(T + 1, 0);
        for (std::size_t s : ts.slots) tracked[s] = 1;
        std::vector<std::size_t> skips;
        for (std::size_t s = 1; s <= T; ++s)
          if (!tracked[s]) skips.push_back(s);
        const std::size_t V = skips.size();
        REQUIRE(V == T - ceil_count(rho2 * double(T)));
        for (std::size_t i = 1; i < V; ++i) {
          std::size_t gap = skips[i] - skips[i - 1];
          CHECK(gap >= T / V);
          CHECK(gap <= (T + V - 1) / V);
        }
      }
    }
  }
}

TEST_CASE("every selector returns exactly the required count") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 1 + rng() % 300;
    const double rho2 = 0.05 + 0.95 * double(rng() >> 11) * 0x1.0p-53;
    const std::size_t want = ceil_count(rho2 * double(T));
    std::vector<double> beta(T);
    for (double& v : beta) v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    CHECK(rand_select(T, rho2, rng()).slots.size() == want);
    CHECK(min_cap_select(beta, rho2).slots.size() == want);
    CHECK(fix_int_select(T, rho2).slots.size() == want);
  }
}

TEST_CASE("selector fraction domain is (0,1]") {
  for (double bad : {0.0, -0.2, 1.0001}) {
    CHECK_THROWS_AS(rand_select(10, bad, 1), std::invalid_argument);
    CHECK_THROWS_AS(min_cap_select({0.1, 0.2}, bad), std::invalid_argument);
    CHECK_THROWS_AS(fix_int_select(10, bad), std::invalid_argument);
  }
}
