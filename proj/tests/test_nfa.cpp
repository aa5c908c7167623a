#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "amalgam/nfa.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::all_words;
using testsupport::read_fixture;
using testsupport::w;

namespace {

std::set<Word> accepted(const Nfa& a, std::size_t maxlen) {
  std::set<Word> out;
  for (const Word& u : all_words(a.alphabet, maxlen))
    if (nfa_accepts(a, u)) out.insert(u);
  return out;
}

}  // namespace

TEST_CASE("parse/serialize round trip") {
  std::string text = read_fixture("fig2.nfa");
  Nfa a = parse_nfa(text);
  CHECK(a.states.size() == 5);
  CHECK(a.transitions.size() == 6);
  CHECK(parse_nfa(serialize_nfa(a)).transitions == a.transitions);
  CHECK(serialize_nfa(parse_nfa(serialize_nfa(a))) == serialize_nfa(a));
  CHECK_THROWS_AS(parse_nfa("trans: a b\n"), std::invalid_argument);
}

TEST_CASE("acceptance and enumeration agree") {
  Nfa a = parse_nfa(read_fixture("fig2.nfa"));
  std::vector<Word> ws = nfa_enumerate_words(a, 5);
  std::set<Word> expect = accepted(a, 5);
  CHECK(std::set<Word>(ws.begin(), ws.end()) == expect);
  CHECK(expect.count(w("aba")) == 1);
  CHECK(expect.count(w("aa")) == 1);
  CHECK(expect.count(w("ab")) == 0);
}

TEST_CASE("regular algebra against brute enumeration") {
  Nfa a = parse_nfa(read_fixture("fig2.nfa"));
  Nfa b = parse_nfa(read_fixture("zero_star_one_star.nfa"));
  // Rename b's alphabet collision-free? Both share {a,b} vs {0,1}; use two
  // automata over the same alphabet instead.
  Nfa evens = parse_nfa(
      "alphabet: a b\ninitial: p\nfinal: p\n"
      "trans: p a q\ntrans: p b q\ntrans: q a p\ntrans: q b p\n");
  auto A = accepted(a, 5), E = accepted(evens, 5);
  std::set<Word> uni, inter, comp;
  for (const Word& u : all_words(a.alphabet, 5)) {
    if (A.count(u) || E.count(u)) uni.insert(u);
    if (A.count(u) && E.count(u)) inter.insert(u);
    if (!A.count(u)) comp.insert(u);
  }
  CHECK(accepted(nfa_union(a, evens), 5) == uni);
  CHECK(accepted(nfa_intersection(a, evens), 5) == inter);
  CHECK(accepted(nfa_complement(a), 5) == comp);
  CHECK(accepted(nfa_determinize(a), 5) == A);
  CHECK(nfa_equivalent(a, nfa_determinize(a)));
  CHECK_FALSE(nfa_equivalent(a, evens));
  CHECK(nfa_equivalent(nfa_union(a, a), a));
  (void)b;
}

TEST_CASE("builders") {
  std::vector<Letter> sigma{"a", "b"};
  CHECK(nfa_enumerate_words(nfa_empty(sigma), 3).empty());
  CHECK(nfa_enumerate_words(nfa_epsilon(sigma), 3) == std::vector<Word>{{}});
  CHECK(nfa_enumerate_words(nfa_single_word(sigma, w("ab")), 3) ==
        std::vector<Word>{w("ab")});
  CHECK(accepted(nfa_universal(sigma), 2).size() == 7);
  Nfa stars = nfa_word_star_product(sigma, {w("a"), w("b")});
  for (const Word& u : all_words(sigma, 4)) {
    bool sorted = std::is_sorted(u.begin(), u.end());
    CHECK(nfa_accepts(stars, u) == sorted);
  }
  Nfa blocks = nfa_at_least_k_blocks({"a", "b"}, 2);
  CHECK(nfa_accepts(blocks, w("aabb")));
  CHECK(nfa_accepts(blocks, w("aaabb")));
  CHECK_FALSE(nfa_accepts(blocks, w("abb")));
  CHECK_FALSE(nfa_accepts(blocks, w("aabba")));
}

TEST_CASE("three-path automaton: embeddings and gaps") {
  // Transition indices in fixture order:
  //   0: q0-a->q1  1: q1-b->q1  2: q1-a->qf
  //   3: q0-a->q2  4: q2-b->q3  5: q3-a->qf
  NfaSystem s(parse_nfa(read_fixture("fig2.nfa")), "fig2");
  Run rho0 = s.make_run({0, 2});
  Run rho = s.make_run({3, 4, 5});
  Run rho1 = s.make_run({0, 1, 2});

  // canon(rho0) = aa embeds into canon(rho) = aba as words, yet no run
  // embedding exists: transitions must map to equal transitions.
  CHECK(decomposition_yield(s.canon(rho0)) == w("aa"));
  CHECK(decomposition_yield(s.canon(rho)) == w("aba"));
  CHECK(s.admissible_embeddings(rho0, rho).empty());

  std::vector<MonotoneMap> maps = s.admissible_embeddings(rho0, rho1);
  REQUIRE(maps.size() == 1);
  CHECK(maps[0] == MonotoneMap{{1, 3}, 3});

  GapProfile gp = gap_words(s, rho0, rho1, maps[0]);
  REQUIRE(gp.gaps.size() == 3);
  CHECK(gp.gaps[0] == Word{});
  CHECK(gp.gaps[1] == w("b"));
  CHECK(gp.gaps[2] == Word{});
}

TEST_CASE("three-path automaton: pumping the b loop") {
  NfaSystem s(parse_nfa(read_fixture("fig2.nfa")), "fig2");
  Run rho0 = s.make_run({0, 2});
  Run rho1 = s.make_run({0, 1, 2});
  MonotoneMap f{{1, 3}, 3};
  AmalgamResult r = s.amalgamate(rho0, f, rho1, f, rho1, 1);
  // Doubling the loop gap yields the four-transition run with two b's.
  Run rho2 = s.make_run({0, 1, 1, 2});
  CHECK(r.rho3->serialize() == rho2->serialize());
  CHECK(decomposition_yield(s.canon(r.rho3)) == w("abba"));
  GapProfile gh = gap_words(s, rho0, r.rho3, compose_maps(f, r.f_prime));
  CHECK(gh.gaps[1] == w("bb"));
}

TEST_CASE("axiom sweep on the three-path automaton") {
  NfaSystem s(parse_nfa(read_fixture("fig2.nfa")), "fig2");
  Budget b;
  b.max_run_size = 5;
  AxiomReport rep = check_amalgamation_axioms(s, b);
  CHECK(rep.ok());
  CHECK(rep.triples_checked > 0);
}

TEST_CASE("emptiness verdicts") {
  Budget b;
  NfaSystem s(parse_nfa(read_fixture("fig2.nfa")), "fig2");
  Verdict v = s.emptiness(b);
  CHECK(v.positive());
  CHECK(v.certificate.contains("word"));
  NfaSystem e(nfa_empty({"a"}), "empty");
  CHECK(e.emptiness(b).negative());
}
