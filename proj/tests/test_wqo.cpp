#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amalgam/wqo.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::all_words;
using testsupport::w;

TEST_CASE("decomposition yield drops empty factors") {
  Decomposition d{"", "a", "", "b", "a", ""};
  CHECK(decomposition_yield(d) == w("aba"));
  CHECK(decomposition_yield({}) == Word{});
}

TEST_CASE("word_str uses interpuncts only for long letters") {
  CHECK(word_str(w("abc")) == "abc");
  CHECK(word_str({"t1", "t2"}) == "t1\xc2\xb7t2");
  CHECK(word_str({}) == "");
}

TEST_CASE("monotone map basics") {
  MonotoneMap f{{1, 3}, 3};
  CHECK(f.strictly_monotone());
  CHECK(f.domain_len() == 2);
  CHECK(f(1) == 1);
  CHECK(f(2) == 3);
  CHECK(in_image(f, 3));
  CHECK_FALSE(in_image(f, 2));
  CHECK(preimage(f, 3) == 2);
  CHECK(preimage(f, 2) == 0);  // absent
  CHECK_FALSE(MonotoneMap{{2, 2}, 3}.strictly_monotone());
  CHECK(identity_map(3) == MonotoneMap{{1, 2, 3}, 3});
}

TEST_CASE("composition is f then g") {
  MonotoneMap f{{1, 3}, 3};
  MonotoneMap g{{2, 3, 5}, 5};
  MonotoneMap h = compose_maps(f, g);
  CHECK(h == MonotoneMap{{2, 5}, 5});
  CHECK_THROWS_AS(compose_maps(g, f), std::invalid_argument);
}

TEST_CASE("embedding enumeration matches the subsequence oracle") {
  OrderedAlphabet eq = OrderedAlphabet::equality({"a", "b"});
  // Independent DP oracle for the subsequence relation.
  auto dp_embeds = [](const Word& u, const Word& v) {
    std::size_t i = 0;
    for (const Letter& l : v)
      if (i < u.size() && u[i] == l) ++i;
    return i == u.size();
  };
  for (const Word& u : all_words(eq.elements, 4))
    for (const Word& v : all_words(eq.elements, 4)) {
      bool expect = dp_embeds(u, v);
      CHECK(word_embeds(u, v, eq.leq) == expect);
      auto maps = enumerate_word_embeddings(u, v, eq);
      CHECK(!maps.empty() == expect);
      for (const MonotoneMap& m : maps) {
        CHECK(m.strictly_monotone());
        CHECK(m.target_len == v.size());
        for (std::size_t i = 1; i <= u.size(); ++i) CHECK(u[i - 1] == v[m(i) - 1]);
      }
    }
}

TEST_CASE("embedding counts: ab into aabb") {
  OrderedAlphabet eq = OrderedAlphabet::equality({"a", "b"});
  CHECK(enumerate_word_embeddings(w("ab"), w("aabb"), eq).size() == 4);
  CHECK(enumerate_word_embeddings(w(""), w("ab"), eq).size() == 1);
  CHECK(enumerate_word_embeddings(w("ba"), w("aabb"), eq).empty());
}

TEST_CASE("embeddings come in lexicographic image order") {
  OrderedAlphabet eq = OrderedAlphabet::equality({"a"});
  auto maps = enumerate_word_embeddings(w("a"), w("aaa"), eq);
  REQUIRE(maps.size() == 3);
  CHECK(maps[0].image == std::vector<std::size_t>{1});
  CHECK(maps[1].image == std::vector<std::size_t>{2});
  CHECK(maps[2].image == std::vector<std::size_t>{3});
}

TEST_CASE("homeomorphic tree embedding") {
  OrderedAlphabet eq = OrderedAlphabet::equality({"a", "b"});
  LabelledTree leaf_a{"a", {}};
  LabelledTree leaf_b{"b", {}};
  LabelledTree small{"a", {leaf_a}};
  LabelledTree big{"a", {LabelledTree{"a", {leaf_a, leaf_b}}, leaf_b}};
  CHECK(tree_embeds_homeomorphic(leaf_a, big, eq));
  CHECK(tree_embeds_homeomorphic(small, big, eq));
  CHECK_FALSE(tree_embeds_homeomorphic(big, small, eq));
  // Child order matters: a(b, a) does not embed into a(a, b) at the root,
  // nor anywhere deeper.
  LabelledTree ba{"a", {leaf_b, leaf_a}};
  LabelledTree ab{"a", {leaf_a, leaf_b}};
  CHECK_FALSE(tree_embeds_homeomorphic(ba, ab, eq));
  CHECK(tree_embeds_homeomorphic(ab, ab, eq));
}
