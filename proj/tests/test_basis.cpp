#include <doctest.h>

#include <algorithm>
#include <set>

#include "becload/basis.hpp"

using namespace becload;

TEST_CASE("mode counts match the paper-scale shell truncations") {
  CHECK(enumerate_modes(10).size() == 220);
  CHECK(enumerate_modes(4).size() == 20);
  const auto single = enumerate_modes(1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == Mode{0, 0, 0});
}

TEST_CASE("shells = 0 is rejected") {
  CHECK_THROWS_AS(enumerate_modes(0), std::invalid_argument);
  CHECK_THROWS_AS(Basis::shells(0), std::invalid_argument);
}

TEST_CASE("canonical order: ascending shell then lexicographic, round-trip exact") {
  const Basis b = Basis::shells(6);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) CHECK(b.mode(i) < b.mode(i + 1));
  for (std::size_t i = 0; i < b.size(); ++i)
    CHECK(b.index_of(b.mode(i)) == static_cast<std::int64_t>(i));
  CHECK(b.index_of(Mode{9, 9, 9}) == -1);
}

TEST_CASE("per-shell and cumulative counts follow the triangular formulas") {
  const Basis b = Basis::shells(9);
  for (int n = 0; n < 9; ++n) {
    std::int64_t count = 0;
    for (const auto& m : b.modes())
      if (m.shell() == n) ++count;
    CHECK(count == modes_in_shell(n));
    CHECK(modes_in_shell(n) == (n + 1) * (n + 2) / 2);
  }
  for (int s = 1; s <= 9; ++s) {
    std::int64_t cum = 0;
    for (int n = 0; n < s; ++n) cum += modes_in_shell(n);
    CHECK(cum == modes_below_shell(s));
  }
}

TEST_CASE("mode energy: omega (n + 3/2), invariant under axis permutation") {
  TrapSpec spec;
  spec.omega = 1.0;
  spec.n_atoms = spec.n_condensed = 10;
  CHECK(mode_energy(Mode{0, 0, 0}, spec) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(mode_energy(Mode{1, 0, 0}, spec) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mode_energy(Mode{1, 2, 3}, spec) == mode_energy(Mode{3, 1, 2}, spec));

  // shell n = 2 holds exactly 6 degenerate modes at 3.5 omega
  int found = 0;
  for (const auto& m : enumerate_modes(3))
    if (m.shell() == 2) {
      CHECK(mode_energy(m, spec) == doctest::Approx(3.5).epsilon(1e-15));
      ++found;
    }
  CHECK(found == 6);
}

TEST_CASE("prefix basis takes the first modes of the canonical order") {
  const Basis b = Basis::prefix(2);
  REQUIRE(b.size() == 2);
  CHECK(b.mode(0) == Mode{0, 0, 0});
  CHECK(b.mode(1) == Mode{0, 0, 1});
}

TEST_CASE("trap spec invariants") {
  TrapSpec s;
  s.n_atoms = 10;
  s.n_condensed = 11;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.n_condensed = 10;
  CHECK_NOTHROW(s.validate());
  s.omega = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
