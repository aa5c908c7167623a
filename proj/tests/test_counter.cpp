#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "amalgam/counter.hpp"
#include "amalgam/vass.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::read_fixture;
using testsupport::w;

TEST_CASE("N_d membership") {
  CHECK(nd_member({}, 1));
  CHECK(nd_member({+1, -1}, 1));
  CHECK_FALSE(nd_member({-1, +1}, 1));
  CHECK_FALSE(nd_member({+1}, 1));
  CHECK(nd_member({+1, +2, -2, -1}, 2));
  CHECK_FALSE(nd_member({+1, -2}, 2));
  CHECK(effect({+1, +1, -1}, 1) == std::vector<long>{1});
}

TEST_CASE("tame morphisms") {
  TameMorphism eta;
  eta.dim = 1;
  eta.images["a"] = {+1};
  eta.images["b"] = {-1};
  CHECK(is_tame(eta));
  CHECK(eta.apply(w("aab")) == UnitUpdateWord{+1, +1, -1});
  TameMorphism bad = eta;
  bad.images["c"] = {-1, +1};  // decrement before increment
  CHECK_FALSE(is_tame(bad));
}

TEST_CASE("descriptor parsing") {
  auto loader = [](const std::string& ref) {
    return testsupport::load_fixture(ref);
  };
  CounterDescriptor d =
      parse_counter_descriptor(read_fixture("anbn.cext"), loader);
  CHECK(d.eta.dim == 1);
  CHECK(d.eta.images.at("a") == UnitUpdateWord{+1});
  CHECK(d.eta.images.at("b") == UnitUpdateWord{-1});
  CHECK(d.alpha.at("a") == "a");
  CHECK_THROWS_AS(parse_counter_descriptor("dim: 1\n", loader),
                  std::invalid_argument);
}

TEST_CASE("a^n b^n as a counter extension, against direct VASS semantics") {
  SystemPtr ext = testsupport::load_fixture("anbn.cext");
  std::set<std::string> got;
  for (const Word& u : testsupport::sample_yields(*ext, 20, 10))
    got.insert(word_str(u));
  std::set<std::string> expect;
  std::string a, b;
  for (int n = 0; n <= 5; ++n) expect.insert(std::string(n, 'a') + std::string(n, 'b'));
  CHECK(got == expect);

  // The same language from a native one-counter VASS.
  Vass v = parse_vass(
      "dim: 1\nalphabet: a b\ninitial: p\nfinal: p q\n"
      "trans: p a (1) p\ntrans: p b (-1) q\ntrans: q b (-1) q\n");
  VassSystem direct(v, "anbn-vass");
  std::set<std::string> native;
  for (const Word& u : testsupport::sample_yields(direct, 10, 10))
    native.insert(word_str(u));
  CHECK(native == expect);
}

TEST_CASE("unique accepting decoration per base run") {
  SystemPtr ext = testsupport::load_fixture("anbn.cext");
  // Every aⁿbⁿ extension run projects to a unique base a*b* run: equal
  // yields at equal sizes can only appear once.
  std::set<std::string> seen;
  for (const Run& r : ext->enumerate_runs(8)) {
    std::string key = r->serialize();
    CHECK(seen.insert(key).second);
  }
  CHECK_FALSE(seen.empty());
}

TEST_CASE("axiom sweep on the counter extension") {
  SystemPtr ext = testsupport::load_fixture("anbn.cext");
  Budget b;
  b.max_run_size = 6;
  AxiomReport rep = check_amalgamation_axioms(*ext, b);
  CHECK(rep.ok());
  CHECK(rep.triples_checked > 0);
}

TEST_CASE("decorated embeddings respect the decoration order") {
  SystemPtr base = testsupport::load_fixture("ab_star.nfa");
  std::vector<Run> runs = base->enumerate_runs(4);
  // Find runs with yields "ab" and "aabb".
  Run small, big;
  for (const Run& r : runs) {
    std::string y = word_str(base->yield_of(r));
    if (y == "ab") small = r;
    if (y == "aabb") big = r;
  }
  REQUIRE(small);
  REQUIRE(big);
  auto leq = [](const std::string& x, const std::string& y) { return x <= y; };
  DecoratedRun ds{small, {"1", "0"}};
  DecoratedRun db{big, {"1", "2", "1", "0"}};
  std::vector<MonotoneMap> maps = decorated_embeddings(*base, ds, db, leq);
  for (const MonotoneMap& m : maps) CHECK(m.strictly_monotone());
  // The all-large decoration blocks every embedding.
  DecoratedRun blocked{small, {"9", "9"}};
  CHECK(decorated_embeddings(*base, blocked, db, leq).empty());
}
