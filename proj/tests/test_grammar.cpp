#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "amalgam/grammar.hpp"
#include "amalgam/transducer.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::read_fixture;
using testsupport::w;

namespace {

CGrammar load_cfg(const std::string& name) {
  return parse_cgrammar(read_fixture(name), [](const std::string& ref) {
    return testsupport::load_fixture(ref);
  });
}

std::set<std::string> yields(const System& s, std::size_t max_size,
                             std::size_t maxlen) {
  std::set<std::string> out;
  for (const Word& u : testsupport::sample_yields(s, max_size, maxlen))
    out.insert(word_str(u));
  return out;
}

}  // namespace

TEST_CASE("parsing fills nonterminals, terminals, start") {
  CGrammar g = load_cfg("anbn.cfg");
  CHECK(g.start == "S");
  CHECK(g.nonterminals == std::vector<std::string>{"S"});
  CHECK(g.terminals == std::vector<Letter>{"a", "b"});
  CHECK(g.is_nonterminal("S"));
  CHECK_FALSE(g.is_nonterminal("a"));
  CHECK_THROWS_AS(parse_cgrammar("S: a\n", nullptr), std::invalid_argument);
}

TEST_CASE("a^n b^n language at bounded size") {
  GrammarSystem s(load_cfg("anbn.cfg"), "anbn");
  std::set<std::string> got = yields(s, 18, 8);
  CHECK(got == std::set<std::string>{"", "ab", "aabb", "aaabbb", "aaaabbbb"});
}

TEST_CASE("emptiness via productive nonterminals") {
  Budget b;
  GrammarSystem s(load_cfg("anbn.cfg"), "anbn");
  CHECK(s.emptiness(b).positive());
  CGrammar dead = parse_cgrammar("start: S\nS: a S\n", nullptr);
  GrammarSystem ds(dead, "dead");
  Verdict v = ds.emptiness(b);
  CHECK(v.negative());
  CHECK(v.certificate.contains("reason"));
}

TEST_CASE("derivation trees embed by pumping depth") {
  GrammarSystem s(load_cfg("anbn.cfg"), "anbn");
  std::vector<Run> runs = s.enumerate_runs(6);
  REQUIRE(runs.size() >= 2);
  // runs come sorted by size: the epsilon tree first, then ab, aabb, ...
  Run t_eps = runs[0];
  Run t_ab = runs[1];
  CHECK(word_str(s.yield_of(t_eps)) == "");
  CHECK(word_str(s.yield_of(t_ab)) == "ab");
  CHECK_FALSE(s.admissible_embeddings(t_eps, t_ab).empty());
  CHECK_FALSE(s.admissible_embeddings(t_ab, t_ab).empty());
  CHECK(s.admissible_embeddings(t_ab, t_eps).empty());

  // Pumping a gap of the eps-into-ab embedding grows the nesting.
  MonotoneMap f = s.admissible_embeddings(t_eps, t_ab).front();
  AmalgamResult r = s.amalgamate(t_eps, f, t_ab, f, t_ab, 0);
  CHECK(word_str(s.yield_of(r.rho3)) == "aabb");
}

TEST_CASE("axiom sweep on grammar fixtures") {
  Budget b;
  b.max_run_size = 6;
  GrammarSystem anbn(load_cfg("anbn.cfg"), "anbn");
  AxiomReport rep = check_amalgamation_axioms(anbn, b);
  CHECK(rep.ok());
  CHECK(rep.triples_checked > 0);
  GrammarSystem aas(load_cfg("aa_star.cfg"), "aa_star");
  CHECK(check_amalgamation_axioms(aas, b).ok());
}

TEST_CASE("transduction via the triple construction") {
  auto s = std::make_shared<GrammarSystem>(load_cfg("anbn.cfg"), "anbn");
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  std::shared_ptr<const System> ts = s->transduce(t);
  std::set<std::string> got = yields(*ts, 18, 4);
  CHECK(got.count("") == 1);
  CHECK(got.count("a") == 1);
  CHECK(got.count("aa") == 1);
  CHECK(got.count("ab") == 0);
  Budget b;
  b.max_run_size = 5;
  CHECK(check_amalgamation_axioms(*ts, b).ok());
}
