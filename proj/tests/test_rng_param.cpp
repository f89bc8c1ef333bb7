#include <doctest.h>

#include "mbpinn/param_vector.hpp"
#include "mbpinn/rng.hpp"

using namespace mbpinn;

TEST_CASE("derive_seed is deterministic and sensitive to master and label") {
  CHECK(derive_seed(42, "data") == derive_seed(42, "data"));
  CHECK(derive_seed(42, "data") != derive_seed(42, "init"));
  CHECK(derive_seed(42, "data") != derive_seed(43, "data"));
  CHECK(derive_seed(42, "x", 0) != derive_seed(42, "x", 1));
  CHECK(derive_seed(42, "x", 7) == derive_seed(42, "x", 7));
}

TEST_CASE("seeded generators derived from different labels produce different streams") {
  Rng a(derive_seed(0, "a"));
  Rng b(derive_seed(0, "b"));
  CHECK(a() != b());
}

TEST_CASE("ParamLayout tracks offsets and total size") {
  ParamLayout layout;
  layout.add("W1", 3, 2);
  layout.add("b1", 3, 1);
  layout.add("Wout", 1, 3);
  CHECK(layout.total_size() == 6 + 3 + 3);
  CHECK(layout.block_count() == 3);
  CHECK(layout.block(0).offset == 0);
  CHECK(layout.block(1).offset == 6);
  CHECK(layout.block(2).offset == 9);
  CHECK(layout.block_named("b1").rows == 3);
  CHECK_THROWS(layout.block_named("nope"));
}

TEST_CASE("ParamLayout views map column-major segments and write through") {
  ParamLayout layout;
  layout.add("W", 2, 2);
  Vector theta(4);
  theta << 1, 2, 3, 4;  // column-major: W = [[1,3],[2,4]]
  auto w = layout.view(theta, 0);
  CHECK(w(0, 0) == 1);
  CHECK(w(1, 0) == 2);
  CHECK(w(0, 1) == 3);
  CHECK(w(1, 1) == 4);

  auto wm = layout.view(theta, 0);
  wm(0, 1) = 9;
  CHECK(theta[2] == 9);

  Vector wrong(3);
  CHECK_THROWS(layout.view(wrong, 0));
}

TEST_CASE("ParamLayout append prefixes block names and shifts offsets") {
  ParamLayout a, b;
  a.add("W", 2, 1);
  b.add("W", 3, 1);
  b.add("b", 3, 1);

  ParamLayout combined;
  combined.append(a, "u.");
  combined.append(b, "k.");
  CHECK(combined.total_size() == 2 + 6);
  CHECK(combined.block_named("u.W").offset == 0);
  CHECK(combined.block_named("k.W").offset == 2);
  CHECK(combined.block_named("k.b").offset == 5);
}
