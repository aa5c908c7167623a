#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "amalgam/analyses.hpp"
#include "amalgam/grammar.hpp"
#include "amalgam/nfa.hpp"
#include "amalgam/vass.hpp"
#include "support/support.hpp"

using namespace amalgam;
using testsupport::read_fixture;
using testsupport::w;

namespace {

SystemPtr nfa_sys(const std::string& text, const std::string& name) {
  return std::make_shared<NfaSystem>(parse_nfa(text), name);
}

/// Regular test languages contained in a*b*, paired with SUP letters.
struct RegularFixture {
  std::string name;
  std::string text;
  std::vector<Letter> letters;
};

const std::vector<RegularFixture>& sup_fixtures() {
  static const std::vector<RegularFixture> fx = {
      {"a*b*",
       "alphabet: a b\ninitial: p\nfinal: p q\ntrans: p a p\ntrans: p b q\n"
       "trans: q b q\n",
       {"a", "b"}},
      {"a*",
       "alphabet: a\ninitial: p\nfinal: p\ntrans: p a p\n",
       {"a"}},
      {"(aa)*(bb)*",
       "alphabet: a b\ninitial: p\nfinal: p r\ntrans: p a p1\ntrans: p1 a p\n"
       "trans: p b r1\ntrans: r1 b r\ntrans: r b r1\n",
       {"a", "b"}},
      {"a*(bb)*",
       "alphabet: a b\ninitial: p\nfinal: p r\ntrans: p a p\ntrans: p b r1\n"
       "trans: r1 b r\ntrans: r b r1\n",
       {"a", "b"}},
      {"{e,ab,aabb}",
       "alphabet: a b\ninitial: p0\nfinal: p0 f\ntrans: p0 a p1\n"
       "trans: p1 b f\ntrans: p1 a p2\ntrans: p2 b p3\ntrans: p3 b f\n",
       {"a", "b"}},
      {"a<=3 b*",
       "alphabet: a b\ninitial: p0\nfinal: p0 p1 p2 p3 q\ntrans: p0 a p1\n"
       "trans: p1 a p2\ntrans: p2 a p3\ntrans: p0 b q\ntrans: p1 b q\n"
       "trans: p2 b q\ntrans: p3 b q\ntrans: q b q\n",
       {"a", "b"}},
      {"a* b<=2",
       "alphabet: a b\ninitial: p\nfinal: p q1 q2\ntrans: p a p\n"
       "trans: p b q1\ntrans: q1 b q2\n",
       {"a", "b"}},
      {"empty",
       "alphabet: a b\ninitial: p\nfinal: f\ntrans: p a p\n",
       {"a", "b"}},
      {"{e}",
       "alphabet: a b\ninitial: p\nfinal: p\n",
       {"a", "b"}},
      {"a+b+",
       "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p1\ntrans: p1 a p1\n"
       "trans: p1 b q\ntrans: q b q\n",
       {"a", "b"}},
      {"(aaa)*",
       "alphabet: a\ninitial: p\nfinal: p\ntrans: p a p1\ntrans: p1 a p2\n"
       "trans: p2 a p\n",
       {"a"}},
      {"a>=2 b*",
       "alphabet: a b\ninitial: p\nfinal: q r\ntrans: p a p1\ntrans: p1 a q\n"
       "trans: q a q\ntrans: q b r\ntrans: r b r\n",
       {"a", "b"}},
      {"a*b",
       "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p\ntrans: p b q\n",
       {"a", "b"}},
      {"ab*",
       "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a q\ntrans: q b q\n",
       {"a", "b"}},
      {"{a^i b^i : i<=3}",
       "alphabet: a b\ninitial: p0\nfinal: p0 f\ntrans: p0 a a1\n"
       "trans: a1 b f\ntrans: a1 a a2\ntrans: a2 b b1\ntrans: b1 b f\n"
       "trans: a2 a a3\ntrans: a3 b c1\ntrans: c1 b c2\ntrans: c2 b f\n",
       {"a", "b"}},
      {"(aa)* b (bb)*",
       "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p1\ntrans: p1 a p\n"
       "trans: p b q\ntrans: q b q1\ntrans: q1 b q\n",
       {"a", "b"}},
      {"a^5 a* b^3 b*",
       "alphabet: a b\ninitial: p0\nfinal: q3\ntrans: p0 a p1\n"
       "trans: p1 a p2\ntrans: p2 a p3\ntrans: p3 a p4\ntrans: p4 a p5\n"
       "trans: p5 a p5\ntrans: p5 b q1\ntrans: q1 b q2\ntrans: q2 b q3\n"
       "trans: q3 b q3\n",
       {"a", "b"}},
      {"{aaab}",
       "alphabet: a b\ninitial: p0\nfinal: f\ntrans: p0 a p1\n"
       "trans: p1 a p2\ntrans: p2 a p3\ntrans: p3 b f\n",
       {"a", "b"}},
      {"b*",
       "alphabet: a b\ninitial: p\nfinal: p\ntrans: p b p\n",
       {"a", "b"}},
      {"(aa)+(bb)+",
       "alphabet: a b\ninitial: p\nfinal: r\ntrans: p a p1\ntrans: p1 a q\n"
       "trans: q a q1\ntrans: q1 a q\ntrans: q b r1\ntrans: r1 b r\n"
       "trans: r b r1\n",
       {"a", "b"}},
  };
  return fx;
}

/// Regular languages for the boundedness comparison: a mix of bounded and
/// unbounded (exponential-growth) languages over {a, b}.
const std::vector<std::string>& bounded_fixture_texts() {
  static const std::vector<std::string> fx = {
      // Bounded.
      "alphabet: a b\ninitial: p\nfinal: p q\ntrans: p a p\ntrans: p b q\n"
      "trans: q b q\n",  // a*b*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q b p\n",
      // (ab)*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q a r\n"
      "trans: r b p\n",  // (aab)*
      "alphabet: a b\ninitial: p\nfinal: f\ntrans: p a x\ntrans: x b f\n"
      "trans: p b y\ntrans: y a f\n",  // {ab, ba}
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a p\n",  // a*
      "alphabet: a b\ninitial: p\nfinal: f\ntrans: p a p\n",  // empty
      "alphabet: a b\ninitial: p\nfinal: p\n",                // {e}
      "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p1\ntrans: p1 a p\n"
      "trans: p b q\ntrans: q b q1\ntrans: q1 b q\n",  // (aa)* b (bb)*
      "alphabet: a b\ninitial: p\nfinal: r\ntrans: p a p\ntrans: p b q\n"
      "trans: q b q\ntrans: q a r\ntrans: r a r\n",  // a*b*a*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q b r\n"
      "trans: r a p\n",  // (aba)*
      "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p\ntrans: p b q\n",
      // a*b
      "alphabet: a b\ninitial: p\nfinal: p f\ntrans: p a q\ntrans: q b p\n"
      "trans: p b f\n",  // (ab)* (e + b)
      // Unbounded.
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a p\ntrans: p b p\n",
      // (a+b)*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q a p\n"
      "trans: p b p\n",  // (aa+b)*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q b p\n"
      "trans: p b r\ntrans: r a p\n",  // (ab+ba)*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a p\ntrans: p b q\n"
      "trans: q b p\n",  // (a+bb)*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: q a r\n"
      "trans: r b p\ntrans: p b p\n",  // (aab+b)*
      "alphabet: a b\ninitial: p\nfinal: f\ntrans: p a q\ntrans: q a q\n"
      "trans: q b q\ntrans: q b f\n",  // a (a+b)* b
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p a q\ntrans: p b q\n"
      "trans: q a p\ntrans: q b p\n",  // ((a+b)(a+b))*
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p b p\ntrans: p a q\n"
      "trans: q b p\n",  // (b+ab)*
  };
  return fx;
}

/// Pumps a Positive SUP certificate: amalgamates sigma over rho with itself
/// k times and checks that every designated letter count reaches k.
void check_sup_pumping(const SystemPtr& s, const nlohmann::json& cert,
                       const std::vector<Letter>& letters, std::size_t kmax) {
  Run rho = s->parse_run(cert.at("rho").get<std::string>());
  Run sigma = s->parse_run(cert.at("sigma").get<std::string>());
  auto fs = s->admissible_embeddings(rho, sigma);
  REQUIRE_FALSE(fs.empty());
  MonotoneMap f = fs.front();
  std::vector<std::size_t> base = parikh(s->yield_of(rho), letters);
  std::vector<std::size_t> up = parikh(s->yield_of(sigma), letters);
  for (std::size_t i = 0; i < letters.size(); ++i) CHECK(up[i] > base[i]);

  Run cur = sigma;
  MonotoneMap h = f;  // embedding of rho into cur
  for (std::size_t k = 2; k <= kmax; ++k) {
    AmalgamResult r = s->amalgamate(rho, h, cur, f, sigma, 0);
    cur = r.rho3;
    h = compose_maps(h, r.f_prime);
    std::vector<std::size_t> pk = parikh(s->yield_of(cur), letters);
    for (std::size_t i = 0; i < letters.size(); ++i)
      CHECK(pk[i] >= base[i] + k);
  }
}

bool is_prefix(const Word& u, const Word& v) {
  if (u.size() > v.size()) return false;
  return std::equal(u.begin(), u.end(), v.begin());
}

/// Re-validates a Negative boundedness certificate independently.
void check_boundedness_negative_cert(const SystemPtr& s,
                                     const nlohmann::json& cert) {
  Run rho0 = s->parse_run(cert.at("rho0").get<std::string>());
  Run rho1 = s->parse_run(cert.at("rho1").get<std::string>());
  Run rho2 = s->parse_run(cert.at("rho2").get<std::string>());
  MonotoneMap f{cert.at("f").get<std::vector<std::size_t>>(),
                s->canon(rho1).size()};
  MonotoneMap g{cert.at("g").get<std::vector<std::size_t>>(),
                s->canon(rho2).size()};
  auto contains = [&](const std::vector<MonotoneMap>& ms,
                      const MonotoneMap& m) {
    for (const auto& x : ms)
      if (x.image == m.image && x.target_len == m.target_len) return true;
    return false;
  };
  REQUIRE(contains(s->admissible_embeddings(rho0, rho1), f));
  REQUIRE(contains(s->admissible_embeddings(rho0, rho2), g));
  std::size_t i = cert.at("gap").get<std::size_t>();
  Word u = gap_words(*s, rho0, rho1, f).gaps.at(i);
  Word v = gap_words(*s, rho0, rho2, g).gaps.at(i);
  CHECK(word_str(u) == cert.at("gap_f").get<std::string>());
  CHECK(word_str(v) == cert.at("gap_g").get<std::string>());
  CHECK_FALSE(is_prefix(u, v));
  CHECK_FALSE(is_prefix(v, u));
}

SystemPtr load_cfg_sys(const std::string& name) {
  CGrammar g = parse_cgrammar(read_fixture(name), [](const std::string& ref) {
    return testsupport::load_fixture(ref);
  });
  return std::make_shared<GrammarSystem>(g, name);
}

}  // namespace

TEST_CASE("parikh counts the designated letters") {
  CHECK(parikh(w("aabab"), {"a", "b"}) == std::vector<std::size_t>{3, 2});
  CHECK(parikh(w("bbb"), {"a", "b"}) == std::vector<std::size_t>{0, 3});
  CHECK(parikh({}, {"a"}) == std::vector<std::size_t>{0});
  CHECK(parikh(w("abc"), {"c"}) == std::vector<std::size_t>{1});
}

TEST_CASE("sup agrees with the regular oracle on twenty fixtures") {
  Budget b;
  for (const auto& fx : sup_fixtures()) {
    CAPTURE(fx.name);
    Nfa a = parse_nfa(fx.text);
    bool expect = testsupport::regular_sup_oracle(a, fx.letters);
    SystemPtr s = nfa_sys(fx.text, fx.name);
    Verdict v = decide_sup(s, fx.letters, b);
    REQUIRE(v.decided());
    CHECK(v.positive() == expect);
    if (v.positive()) check_sup_pumping(s, v.certificate, fx.letters, 4);
  }
}

TEST_CASE("sup rejects languages outside the block shape") {
  Budget b;
  SystemPtr s = nfa_sys(
      "alphabet: a b\ninitial: p\nfinal: p\ntrans: p b q\ntrans: q a p\n",
      "(ba)*");
  CHECK_THROWS_AS(decide_sup(s, {"a", "b"}, b), std::invalid_argument);
}

TEST_CASE("sup on context-free and vector-addition fixtures") {
  Budget b;
  SystemPtr anbn = load_cfg_sys("anbn.cfg");
  Verdict vp = decide_sup(anbn, {"a", "b"}, b);
  REQUIRE(vp.positive());
  check_sup_pumping(anbn, vp.certificate, {"a", "b"}, 4);

  // b occurs at most once: the b-blocks cannot grow beyond one letter.
  SystemPtr once = nfa_sys(
      "alphabet: a b\ninitial: p\nfinal: q\ntrans: p a p\ntrans: p b q\n",
      "a*b");
  Verdict vn = decide_sup(once, {"a", "b"}, b);
  REQUIRE(vn.negative());
  CHECK(vn.certificate.at("k").get<std::uint64_t>() >= 2);

  SystemPtr even = testsupport::load_fixture("unary_even.vass");
  Verdict vu = decide_sup(even, {"a"}, b);
  REQUIRE(vu.positive());
  check_sup_pumping(even, vu.certificate, {"a"}, 4);
}

TEST_CASE("boundedness agrees with the growth oracle on twenty fixtures") {
  Budget b;
  const auto& texts = bounded_fixture_texts();
  REQUIRE(texts.size() == 20);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CAPTURE(i);
    Nfa a = parse_nfa(texts[i]);
    bool expect_bounded = testsupport::regular_bounded_oracle(a);
    SystemPtr s = nfa_sys(texts[i], "bfx" + std::to_string(i));
    Verdict v = decide_boundedness(s, b);
    REQUIRE(v.decided());
    CHECK(v.positive() == expect_bounded);
    if (v.positive()) {
      // Re-verify the certified expression inclusion independently.
      std::vector<Word> words;
      for (const auto& ws :
           v.certificate.at("expression").get<std::vector<std::string>>())
        words.push_back(w(ws));
      CHECK(bounded_expression_inclusion(s, words, b).positive());
      for (const Word& y : testsupport::sample_yields(*s, 5, 16)) {
        Nfa expr = words.empty() ? nfa_epsilon(a.alphabet)
                                 : nfa_word_star_product(a.alphabet, words);
        CHECK(nfa_accepts(expr, y));
      }
    } else {
      check_boundedness_negative_cert(s, v.certificate);
    }
  }
}

TEST_CASE("unary regularity on grammar, finite, and counter fixtures") {
  Budget b;

  // (aa)*: period-2 witness.
  SystemPtr aas = load_cfg_sys("aa_star.cfg");
  RegularResult r1 = compute_unary_regular(aas, b);
  REQUIRE(r1.verdict.positive());
  std::set<std::size_t> brute1;
  for (const Run& r : aas->enumerate_runs(44))
    brute1.insert(aas->yield_of(r).size());
  for (std::size_t n = 0; n <= 20; ++n)
    CHECK(nfa_accepts(r1.nfa, Word(n, "a")) == (brute1.count(n) > 0));
  // Ultimate periodicity certified from the witness (F, T): the gcd of the
  // witness periods is a period of the output beyond the base lengths.
  auto triples = r1.verdict.certificate.at("triples");
  REQUIRE_FALSE(triples.empty());
  std::size_t period = 0;
  for (const auto& t : triples) {
    period = std::gcd(period, t[1].get<std::size_t>());
    period = std::gcd(period, t[2].get<std::size_t>());
  }
  REQUIRE(period > 0);
  std::size_t threshold = 0;
  for (const auto& l :
       r1.verdict.certificate.at("base_lengths").get<std::vector<std::size_t>>())
    threshold = std::max(threshold, l);
  for (std::size_t n = threshold; n + period <= 40; ++n)
    CHECK(nfa_accepts(r1.nfa, Word(n, "a")) ==
          nfa_accepts(r1.nfa, Word(n + period, "a")));

  // Finite unary set {a, aaa}: empty T, F covers both words.
  SystemPtr fin = nfa_sys(
      "alphabet: a\ninitial: p\nfinal: f g\ntrans: p a f\ntrans: p a q\n"
      "trans: q a r\ntrans: r a g\n",
      "fin");
  RegularResult r2 = compute_unary_regular(fin, b);
  REQUIRE(r2.verdict.positive());
  CHECK(r2.verdict.certificate.at("triples").empty());
  for (std::size_t n = 0; n <= 20; ++n)
    CHECK(nfa_accepts(r2.nfa, Word(n, "a")) == (n == 1 || n == 3));

  // Unary VASS for a^+.
  SystemPtr plus = testsupport::load_fixture("unary_plus.vass");
  RegularResult r3 = compute_unary_regular(plus, b);
  REQUIRE(r3.verdict.positive());
  std::set<std::size_t> brute3;
  for (const Run& r : plus->enumerate_runs(21))
    brute3.insert(plus->yield_of(r).size());
  for (std::size_t n = 0; n <= 20; ++n)
    CHECK(nfa_accepts(r3.nfa, Word(n, "a")) == (brute3.count(n) > 0));

  SystemPtr notunary = nfa_sys(
      "alphabet: a b\ninitial: p\nfinal: q\ntrans: p b q\n", "notunary");
  CHECK_THROWS_AS(compute_unary_regular(notunary, b), std::invalid_argument);
}

TEST_CASE("downward closure equals the brute subword closure") {
  Budget b;

  auto check_dc = [&](const SystemPtr& s, const std::vector<Word>& language) {
    DcResult dc = compute_downward_closure(s, b);
    REQUIRE(dc.verdict.positive());
    std::set<std::string> brute;
    for (const Word& u : testsupport::subword_closure(language, 7))
      brute.insert(word_str(u));
    for (const Word& u : testsupport::all_words(s->alphabet(), 7))
      CHECK(nfa_accepts(dc.nfa, u) == (brute.count(word_str(u)) > 0));
    return dc;
  };

  SystemPtr ab = testsupport::load_fixture("ab.nfa");
  check_dc(ab, {w("ab")});

  SystemPtr anbn = load_cfg_sys("anbn.cfg");
  // Words up to a^8 b^8 determine every closure word of length <= 7.
  std::vector<Word> lang;
  for (std::size_t i = 0; i <= 8; ++i) {
    Word u(i, "a");
    u.insert(u.end(), i, "b");
    lang.push_back(u);
  }
  check_dc(anbn, lang);

  // Fig.-3-style VASS: runs with at most seven loop iterations already
  // realize every closure word of length <= 7.
  SystemPtr f3 = testsupport::load_fixture("fig3.vass");
  std::vector<Word> vlang;
  for (const Run& r : f3->enumerate_runs(16)) vlang.push_back(f3->yield_of(r));
  DcResult dc3 = check_dc(f3, vlang);
  std::set<std::string> atoms;
  for (const auto& ideal : dc3.ideals) atoms.insert(ideal.str());
  CHECK(atoms == std::set<std::string>{"{b,c}* (a+e) {c}* (a+e) {b}*"});
}

TEST_CASE("gap languages are subsemigroups") {
  Budget small;
  small.max_run_size = 4;
  Budget large;
  large.max_run_size = 8;
  std::vector<SystemPtr> systems = {
      testsupport::load_fixture("fig2.nfa"),
      testsupport::load_fixture("fig3.vass"),
      testsupport::load_fixture("ab_star.nfa"),
      load_cfg_sys("anbn.cfg"),
  };
  std::size_t checked = 0;
  for (const SystemPtr& s : systems) {
    for (const Run& rho : s->enumerate_runs(3)) {
      std::size_t n = s->canon(rho).size();
      for (std::size_t i = 0; i <= n; ++i) {
        std::vector<Word> sample = sample_gap_language(*s, rho, i, small);
        std::set<Word> enlarged;
        for (const Word& u : sample_gap_language(*s, rho, i, large))
          enlarged.insert(u);
        for (const Word& w1 : sample) {
          for (const Word& w2 : sample) {
            if (checked >= 50) break;
            Word cat = w1;
            cat.insert(cat.end(), w2.begin(), w2.end());
            CAPTURE(s->id());
            CAPTURE(word_str(cat));
            CHECK(enlarged.count(cat) == 1);
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked >= 50);
}
