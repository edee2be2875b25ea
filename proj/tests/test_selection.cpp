// Copyright 2026 The locos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "locos/error.hpp"
#include "locos/linalg.hpp"
#include "locos/selection.hpp"
#include "test_support.hpp"

using namespace locos;

TEST_CASE("select_indexes on a small vector") {
  const Vector z{0.1, 0.9, 0.5};

  CHECK(select_indexes(z, SelectionStrategy::top_k(2)).indexes ==
        std::vector<std::uint32_t>{1, 2});
  CHECK(select_indexes(z, SelectionStrategy::top_bottom(1, 1)).indexes ==
        std::vector<std::uint32_t>{1, 0});
  CHECK(select_indexes(z, SelectionStrategy::first_k(2)).indexes ==
        std::vector<std::uint32_t>{0, 1});
  // Probe strategy shares TopK mechanics.
  CHECK(select_indexes(z, SelectionStrategy::probe_top_k(2)).indexes ==
        std::vector<std::uint32_t>{1, 2});

  CHECK_THROWS_AS(select_indexes(z, SelectionStrategy::top_k(4)), Error);
  CHECK_THROWS_AS(select_indexes(z, SelectionStrategy::top_k(0)), Error);
  CHECK_THROWS_AS(select_indexes(z, SelectionStrategy::top_bottom(0, 2)), Error);
}

TEST_CASE("top-k selection matches full sort-and-truncate") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    Vector z = test::random_vector(rng, n);
    if (trial % 3 == 0) {
      // Force ties to exercise the index tie-break.
      for (double& x : z) x = std::round(x * 4.0) / 4.0;
    }
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % n);

    std::vector<std::uint32_t> expected(n);
    std::iota(expected.begin(), expected.end(), 0u);
    std::sort(expected.begin(), expected.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (z[a] != z[b]) return z[a] > z[b];
      return a < b;
    });
    expected.resize(k);

    const auto sel = select_indexes(z, SelectionStrategy::top_k(k));
    CHECK(sel.indexes == expected);
  }
}

TEST_CASE("top-bottom layout: top descending, bottom ascending, disjoint") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 40;
    const Vector z = test::random_vector(rng, n);
    const std::uint32_t t = 1 + static_cast<std::uint32_t>(rng() % (n / 2));
    const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % (n / 2));
    const auto sel = select_indexes(z, SelectionStrategy::top_bottom(t, b));
    REQUIRE(sel.indexes.size() == t + b);

    auto top = sel.top_segment();
    auto bottom = sel.bottom_segment();
    for (std::size_t i = 1; i < top.size(); ++i) {
      CHECK(z[top[i - 1]] >= z[top[i]]);
    }
    for (std::size_t i = 1; i < bottom.size(); ++i) {
      CHECK(z[bottom[i - 1]] <= z[bottom[i]]);
    }
    // Every top value at least every bottom value; indexes all distinct.
    CHECK(z[top.back()] >= z[bottom.back()]);
    std::vector<std::uint32_t> sorted(sel.indexes);
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("selection is deterministic under ties") {
  const Vector z{0.5, 0.5, 0.5, 0.5};
  const auto sel = select_indexes(z, SelectionStrategy::top_bottom(2, 1));
  CHECK(sel.indexes == std::vector<std::uint32_t>{0, 1, 3});
}

TEST_CASE("selection depends only on the selecting vector") {
  std::mt19937_64 rng(107);
  const Vector zg = test::random_vector(rng, 64);
  const auto sel = select_indexes(zg, SelectionStrategy::top_k(16));
  // Argsort invariance: a strictly increasing transform keeps the selection.
  Vector transformed = zg;
  for (double& x : transformed) x = std::atan(3.0 * x) + x;
  CHECK(select_indexes(transformed, SelectionStrategy::top_k(16)).indexes ==
        sel.indexes);
}

TEST_CASE("s_locos basic values") {
  SUBCASE("full selection reduces to plain cosine") {
    std::mt19937_64 rng(109);
    const Vector zg = test::random_vector(rng, 100);
    const Vector zp = test::random_vector(rng, 100);
    const auto sel = select_indexes(zg, SelectionStrategy::top_k(100));
    CHECK(s_locos(zg, zp, sel) == doctest::Approx(cosine(zg, zp)).epsilon(1e-12));
  }

  SUBCASE("identical vectors with a split score two perfect cosines") {
    std::mt19937_64 rng(113);
    const Vector z = test::random_vector(rng, 500);
    const auto sel = select_indexes(z, SelectionStrategy::top_bottom(250, 250));
    CHECK(s_locos(z, z, sel) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("top-2 the long way") {
    const Vector zg{0.9, 0.5, 0.1, -0.2};
    const Vector zp{0.8, 0.4, 0.2, -0.1};
    const auto sel = select_indexes(zg, SelectionStrategy::top_k(2));
    REQUIRE(sel.indexes == std::vector<std::uint32_t>{0, 1});
    const double expected =
        (0.9 * 0.8 + 0.5 * 0.4) /
        (std::sqrt(0.9 * 0.9 + 0.5 * 0.5) * std::sqrt(0.8 * 0.8 + 0.4 * 0.4));
    CHECK(s_locos(zg, zp, sel) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s_locos(zg, zp, sel) == doctest::Approx(0.99905).epsilon(1e-4));
  }
}

TEST_CASE("s_locos validates shapes and degenerate segments") {
  const Vector zg{1.0, 0.0, 0.0, 0.5};
  const Vector shorter{1.0, 0.0};
  const auto sel = select_indexes(zg, SelectionStrategy::top_k(2));
  CHECK_THROWS_AS(s_locos(zg, shorter, sel), Error);

  // Probe values at the selected indexes all zero: undefined cosine.
  const Vector zp{0.0, 0.5, 0.7, 0.0};
  CHECK_THROWS_AS(s_locos(zg, zp, sel), Error);
}

TEST_CASE("s_locos invariances") {
  std::mt19937_64 rng(127);
  const Vector zg = test::random_vector(rng, 80);
  const Vector zp = test::random_vector(rng, 80);
  const auto sel = select_indexes(zg, SelectionStrategy::top_bottom(10, 10));
  const double base = s_locos(zg, zp, sel);

  SUBCASE("positive rescaling of either side") {
    Vector zg2 = zg, zp2 = zp;
    for (double& x : zg2) x *= 3.7;
    for (double& x : zp2) x *= 0.2;
    CHECK(s_locos(zg2, zp2, sel) == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("internal ordering of a segment is irrelevant") {
    IndexSelection shuffled = sel;
    std::shuffle(shuffled.indexes.begin(), shuffled.indexes.begin() + shuffled.top,
                 rng);
    std::shuffle(shuffled.indexes.begin() + shuffled.top, shuffled.indexes.end(),
                 rng);
    CHECK(s_locos(zg, zp, shuffled) == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("range bounds") {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector a = test::random_vector(rng, 30);
      const Vector b = test::random_vector(rng, 30);
      const auto top_only = select_indexes(a, SelectionStrategy::top_k(10));
      CHECK(std::abs(s_locos(a, b, top_only)) <= 1.0 + 1e-12);
      const auto split = select_indexes(a, SelectionStrategy::top_bottom(5, 5));
      CHECK(std::abs(s_locos(a, b, split)) <= 2.0 + 2e-12);
    }
  }
}

TEST_CASE("selection stays compact at full training-set scale") {
  // 617'970 identities, the size of a web-crawled training set's last
  // layer: the template is still just K index/value pairs.
  const std::size_t c = 617970;
  Vector logits(c);
  std::mt19937_64 rng(137);
  for (double& x : logits) {
    x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  const GalleryTemplate tpl =
      make_template(logits, SelectionStrategy::top_k(500), "big");
  CHECK(tpl.selection.indexes.size() == 500);
  CHECK(tpl.selected_logits.size() == 500);
  CHECK(tpl.num_classes == c);

  // Nothing outside the selection may exceed the smallest selected value.
  const double smallest_selected = tpl.selected_logits.back();
  std::vector<bool> selected(c, false);
  for (std::uint32_t idx : tpl.selection.indexes) {
    selected[idx] = true;
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i < c; ++i) {
    if (!selected[i] && logits[i] > smallest_selected) {
      ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("templates store the selection and reproduce s_locos") {
  std::mt19937_64 rng(131);
  const Vector zg = test::random_vector(rng, 200);
  const Vector zp = test::random_vector(rng, 200);

  SUBCASE("compact template") {
    const auto strategy = SelectionStrategy::top_bottom(30, 20);
    const GalleryTemplate tpl = make_template(zg, strategy, "g0");
    CHECK(tpl.selection.indexes.size() == 50);
    CHECK(tpl.selected_logits.size() == 50);
    for (std::size_t j = 0; j < tpl.selection.indexes.size(); ++j) {
      CHECK(tpl.selected_logits[j] == zg[tpl.selection.indexes[j]]);
    }
    CHECK(score_template(tpl, zp) == s_locos(zg, zp, tpl.selection));
  }

  SUBCASE("full selection is a reordering of the whole vector") {
    const GalleryTemplate tpl =
        make_template(zg, SelectionStrategy::top_k(200), "g1");
    Vector sorted_values = tpl.selected_logits;
    std::sort(sorted_values.begin(), sorted_values.end());
    Vector original = zg;
    std::sort(original.begin(), original.end());
    CHECK(sorted_values == original);
  }

  SUBCASE("probe-selected template keeps everything") {
    const GalleryTemplate tpl =
        make_template(zg, SelectionStrategy::probe_top_k(50), "g2");
    CHECK(tpl.selected_logits.size() == 200);
    CHECK(tpl.selection.indexes.size() == 200);
    CHECK(tpl.selected_logits == zg);
  }
}
