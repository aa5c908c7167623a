#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "amalgam/vass.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::read_fixture;
using testsupport::w;

TEST_CASE("parse/serialize round trip") {
  Vass v = parse_vass(read_fixture("fig3.vass"));
  CHECK(v.dim == 3);
  CHECK(v.transitions.size() == 6);
  CHECK(v.transitions[2].delta == std::vector<long>{1, 0, 0});
  CHECK(serialize_vass(parse_vass(serialize_vass(v))) == serialize_vass(v));
}

TEST_CASE("karp-miller coverability and emptiness") {
  Vass v = parse_vass(read_fixture("fig3.vass"));
  std::vector<std::string> cov = karp_miller_coverable_states(v);
  CHECK(std::set<std::string>(cov.begin(), cov.end()) ==
        std::set<std::string>{"q0", "q1", "qf"});
  Budget b;
  CHECK(vass_emptiness(v, b).positive());

  // The final state needs a decrement from zero: never coverable.
  Vass stuck = parse_vass(
      "dim: 1\nalphabet: a\ninitial: p\nfinal: q\n"
      "trans: p a (-1) q\n");
  CHECK(vass_emptiness(stuck, b).negative());
  // Coverable final state but no zero-ending run: the oracle may only
  // report exhaustion here, never a wrong Positive.
  Vass drift = parse_vass(
      "dim: 1\nalphabet: a\ninitial: p\nfinal: q\n"
      "trans: p a (1) q\n");
  CHECK_FALSE(vass_emptiness(drift, b).positive());
}

TEST_CASE("three-counter example: gap profiles") {
  // Transition indices in fixture order: 0:t1 (c,+3rd) 1:t2 (b,+2nd)
  // 2:t3 (a,+1st) 3:t4 (c,-3rd) 4:t5 (a,-1st) 5:t6 (b,-2nd).
  VassSystem s(parse_vass(read_fixture("fig3.vass")), "fig3");
  Run rho0 = s.make_run({2, 4});
  Run rho1 = s.make_run({1, 2, 4, 5});
  Run rho2 = s.make_run({0, 2, 3, 4});
  CHECK(word_str(s.yield_of(rho0)) == "aa");
  CHECK(word_str(s.yield_of(rho1)) == "baab");
  CHECK(word_str(s.yield_of(rho2)) == "caca");

  std::vector<MonotoneMap> fs = s.admissible_embeddings(rho0, rho1);
  REQUIRE(fs.size() == 1);
  GapProfile gf = gap_words(s, rho0, rho1, fs[0]);
  CHECK(gf.gaps == std::vector<Word>{w("b"), {}, w("b")});

  std::vector<MonotoneMap> gs = s.admissible_embeddings(rho0, rho2);
  REQUIRE(gs.size() == 1);
  GapProfile gg = gap_words(s, rho0, rho2, gs[0]);
  CHECK(gg.gaps == std::vector<Word>{w("c"), w("c"), {}});
}

TEST_CASE("three-counter example: amalgamation") {
  VassSystem s(parse_vass(read_fixture("fig3.vass")), "fig3");
  Run rho0 = s.make_run({2, 4});
  Run rho1 = s.make_run({1, 2, 4, 5});
  Run rho2 = s.make_run({0, 2, 3, 4});
  MonotoneMap f = s.admissible_embeddings(rho0, rho1).front();
  MonotoneMap g = s.admissible_embeddings(rho0, rho2).front();

  for (std::size_t gap = 0; gap <= 2; ++gap) {
    AmalgamResult r = s.amalgamate(rho0, f, rho1, g, rho2, gap);
    // The amalgam is t2 t1 t3 t4 t5 t6 with yield bcacab.
    CHECK(r.rho3->serialize() == s.make_run({1, 0, 2, 3, 4, 5})->serialize());
    CHECK(word_str(s.yield_of(r.rho3)) == "bcacab");
    MonotoneMap h = compose_maps(f, r.f_prime);
    CHECK(h == compose_maps(g, r.g_prime));
    GapProfile gh = gap_words(s, rho0, r.rho3, h);
    GapProfile gf = gap_words(s, rho0, rho1, f);
    GapProfile gg = gap_words(s, rho0, rho2, g);
    for (std::size_t i = 0; i <= 2; ++i) {
      Word fg = gf.gaps[i];
      fg.insert(fg.end(), gg.gaps[i].begin(), gg.gaps[i].end());
      CHECK(gh.gaps[i] == fg);  // f-first at every gap here
    }
  }
}

TEST_CASE("axiom sweep on the three-counter example") {
  VassSystem s(parse_vass(read_fixture("fig3.vass")), "fig3");
  Budget b;
  b.max_run_size = 4;
  AxiomReport rep = check_amalgamation_axioms(s, b);
  CHECK(rep.ok());
  CHECK(rep.triples_checked > 0);
}

TEST_CASE("unary VASS language") {
  VassSystem s(parse_vass(read_fixture("unary_even.vass")), "even");
  std::set<std::size_t> lens;
  for (const Word& u : testsupport::sample_yields(s, 10, 8)) lens.insert(u.size());
  CHECK(lens == std::set<std::size_t>{0, 2, 4, 6, 8});
}
