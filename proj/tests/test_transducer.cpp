#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "amalgam/transducer.hpp"
#include "amalgam/vass.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::all_words;
using testsupport::read_fixture;
using testsupport::w;

namespace {

std::set<Word> image_set(const Transducer& t, const std::set<Word>& language) {
  std::set<Word> out;
  for (const Word& u : language)
    for (const Word& v : transducer_images(t, u)) out.insert(v);
  return out;
}

std::set<Word> accepted(const Nfa& a, std::size_t maxlen) {
  std::set<Word> out;
  for (const Word& u : all_words(a.alphabet, maxlen))
    if (nfa_accepts(a, u)) out.insert(u);
  return out;
}

}  // namespace

TEST_CASE("parse/serialize round trip") {
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  CHECK(t.transitions.size() == 2);
  CHECK_FALSE(t.has_boundary_outputs());
  CHECK(serialize_transducer(parse_transducer(serialize_transducer(t))) ==
        serialize_transducer(t));
}

TEST_CASE("images of single words") {
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  CHECK(transducer_images(t, w("aba")) == std::vector<Word>{w("aa")});
  CHECK(transducer_images(t, w("bbb")) == std::vector<Word>{{}});
  Transducer dup = parse_transducer(
      "initial: p\nfinal: p\ntrans: p a / aa p\n");
  CHECK(transducer_images(dup, w("aa")) == std::vector<Word>{w("aaaa")});
  // Nondeterministic copy-or-erase produces all subsequences of a^n.
  Transducer sub = parse_transducer(
      "initial: p\nfinal: p\ntrans: p a / a p\ntrans: p a / _ p\n");
  CHECK(transducer_images(sub, w("aa")) ==
        std::vector<Word>{{}, w("a"), w("aa")});
}

TEST_CASE("identity and filter transducers") {
  Nfa a = parse_nfa(read_fixture("fig2.nfa"));
  Transducer id = identity_transducer(a.alphabet);
  CHECK(transducer_images(id, w("ab")) == std::vector<Word>{w("ab")});
  Nfa filtered = apply_to_nfa(a, filter_transducer(nfa_determinize(
                                     parse_nfa(read_fixture("ab.nfa")))));
  CHECK(accepted(filtered, 5).empty());  // fig2 has no word "ab"
  Nfa kept = apply_to_nfa(a, filter_transducer(nfa_determinize(a)));
  CHECK(accepted(kept, 5) == accepted(a, 5));
}

TEST_CASE("product construction equals pointwise images") {
  Nfa a = parse_nfa(read_fixture("fig2.nfa"));
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  Nfa out = apply_to_nfa(a, t);
  CHECK(accepted(out, 6) == image_set(t, accepted(a, 6)));
}

TEST_CASE("transduced systems keep the amalgamation axioms") {
  auto base = std::make_shared<NfaSystem>(parse_nfa(read_fixture("fig2.nfa")),
                                          "fig2");
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  SystemPtr ts = make_transduced_system(base, t);
  Budget b;
  b.max_run_size = 5;
  AxiomReport rep = check_amalgamation_axioms(*ts, b);
  CHECK(rep.ok());
  // Language: erased images of the base language.
  std::set<Word> got;
  for (const Word& u : testsupport::sample_yields(*ts, 5, 6)) got.insert(u);
  std::set<Word> expect;
  for (const Word& u : testsupport::sample_yields(*base, 5, 6))
    for (const Word& v : transducer_images(t, u)) expect.insert(v);
  CHECK(got == expect);
}

TEST_CASE("regular intersection keeps the axioms") {
  auto base = std::make_shared<NfaSystem>(parse_nfa(read_fixture("fig2.nfa")),
                                          "fig2");
  Nfa evens = parse_nfa(
      "alphabet: a b\ninitial: p\nfinal: p\n"
      "trans: p a q\ntrans: p b q\ntrans: q a p\ntrans: q b p\n");
  SystemPtr is = intersect_regular(base, evens);
  Budget b;
  b.max_run_size = 5;
  CHECK(check_amalgamation_axioms(*is, b).ok());
  for (const Word& u : testsupport::sample_yields(*is, 5, 6)) {
    CHECK(u.size() % 2 == 0);
    CHECK(nfa_accepts(base->nfa(), u));
  }
}

TEST_CASE("vass transduction at bounded length") {
  Vass v = parse_vass(read_fixture("fig3.vass"));
  Transducer t = parse_transducer(read_fixture("erase_b.t"));
  // erase_b.t lacks a c rule; extend it for the fig3 alphabet.
  t.input_alphabet.push_back("c");
  t.output_alphabet.push_back("c");
  t.transitions.push_back({"p", "c", w("c"), "p"});
  Vass tv = vass_transduce(v, t);
  VassSystem s(v, "fig3"), ts(tv, "fig3+T");
  std::set<Word> expect;
  for (const Word& u : testsupport::sample_yields(s, 8, 8))
    for (const Word& x : transducer_images(t, u)) expect.insert(x);
  std::set<Word> got;
  for (const Word& u : testsupport::sample_yields(ts, 8, 8))
    if (u.size() <= 6) got.insert(u);
  for (const Word& u : got) CHECK(expect.count(u) == 1);
  for (const Word& u : expect)
    if (u.size() <= 4) CHECK(got.count(u) == 1);
}
