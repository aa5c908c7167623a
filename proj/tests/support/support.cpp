#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalgam/counter.hpp"
#include "amalgam/grammar.hpp"
#include "amalgam/vass.hpp"
#include "amalgam/wqo.hpp"

#ifndef AMALGAM_FIXTURES
#error "AMALGAM_FIXTURES must point at tests/fixtures"
#endif

namespace testsupport {

std::string fixture_path(const std::string& name) {
  return std::string(AMALGAM_FIXTURES) + "/" + name;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::invalid_argument("missing fixture '" + name + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SystemPtr load_fixture(const std::string& name) {
  auto ext_of = [](const std::string& n) {
    auto dot = n.rfind('.');
    return dot == std::string::npos ? std::string() : n.substr(dot);
  };
  std::string ext = ext_of(name);
  std::string stem = name.substr(0, name.size() - ext.size());
  std::string text = read_fixture(name);
  auto loader = [](const std::string& ref) { return load_fixture(ref); };
  if (ext == ".nfa") return std::make_shared<NfaSystem>(parse_nfa(text), stem);
  if (ext == ".vass")
    return std::make_shared<VassSystem>(parse_vass(text), stem);
  if (ext == ".cfg")
    return std::make_shared<GrammarSystem>(parse_cgrammar(text, loader), stem);
  if (ext == ".cext") {
    CounterDescriptor d = parse_counter_descriptor(text, loader);
    return build_counter_extension(d.base, d.eta, d.alpha, stem);
  }
  throw std::invalid_argument("unknown fixture extension '" + ext + "'");
}

Word w(const std::string& s) {
  Word out;
  for (char c : s) out.push_back(std::string(1, c));
  return out;
}

std::vector<Word> all_words(const std::vector<Letter>& alphabet,
                            std::size_t maxlen) {
  std::vector<Word> out{{}};
  std::vector<Word> frontier{{}};
  for (std::size_t n = 1; n <= maxlen; ++n) {
    std::vector<Word> next;
    for (const Word& u : frontier)
      for (const Letter& l : alphabet) {
        Word v = u;
        v.push_back(l);
        next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::vector<Word> sample_yields(const System& s, std::size_t max_run_size,
                                std::size_t maxlen) {
  std::set<Word> seen;
  for (const Run& r : s.enumerate_runs(max_run_size)) {
    Word y = s.yield_of(r);
    if (y.size() <= maxlen) seen.insert(std::move(y));
  }
  return {seen.begin(), seen.end()};
}

bool regular_sup_oracle(const Nfa& a, const std::vector<Letter>& letters) {
  std::vector<Word> words;
  for (const Letter& l : letters) words.push_back({l});
  Nfa shape = nfa_word_star_product(a.alphabet, words);
  Nfa outside = nfa_intersection(a, nfa_complement(shape));
  if (nfa_nonempty_witness(outside))
    throw std::invalid_argument("regular_sup_oracle: L not within a1*...an*");
  std::size_t k = a.states.size() + 1;
  Nfa blocks = nfa_at_least_k_blocks(letters, k);
  return nfa_nonempty_witness(nfa_intersection(a, blocks)).has_value();
}

namespace {

struct Dfa {
  std::vector<Letter> alphabet;
  // trans[q][letter index] = target or npos
  std::vector<std::vector<std::size_t>> trans;
  std::vector<bool> final_states;
  std::size_t initial = 0;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Determinize-and-trim into a table DFA (partial: dead state dropped).
Dfa table_dfa(const Nfa& input) {
  Nfa d = nfa_determinize(input);
  Dfa out;
  out.alphabet = d.alphabet;
  std::size_t n = d.states.size();
  out.trans.assign(n, std::vector<std::size_t>(d.alphabet.size(), Dfa::npos));
  out.final_states.assign(n, false);
  for (const auto& q : d.final_states) out.final_states[d.state_index(q)] = true;
  out.initial = d.state_index(d.initial.front());
  for (const NfaTransition& t : d.transitions) {
    std::size_t li =
        std::find(d.alphabet.begin(), d.alphabet.end(), t.label) -
        d.alphabet.begin();
    out.trans[d.state_index(t.from)][li] = d.state_index(t.to);
  }
  // Trim: keep states reachable from the initial state and co-reachable
  // from a final state.
  std::vector<bool> reach(n, false), coreach(n, false);
  std::vector<std::size_t> stack{out.initial};
  reach[out.initial] = true;
  while (!stack.empty()) {
    std::size_t q = stack.back();
    stack.pop_back();
    for (std::size_t to : out.trans[q])
      if (to != Dfa::npos && !reach[to]) {
        reach[to] = true;
        stack.push_back(to);
      }
  }
  for (std::size_t q = 0; q < n; ++q)
    if (out.final_states[q]) {
      coreach[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    std::size_t q = stack.back();
    stack.pop_back();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t to : out.trans[p])
        if (to == q && !coreach[p]) {
          coreach[p] = true;
          stack.push_back(p);
        }
  }
  for (std::size_t q = 0; q < n; ++q)
    if (!(reach[q] && coreach[q]))
      for (std::size_t p = 0; p < n; ++p)
        for (auto& to : out.trans[p])
          if (to == q) to = Dfa::npos;
  if (!(reach[out.initial] && coreach[out.initial])) out.trans.clear();
  return out;
}

}  // namespace

bool regular_bounded_oracle(const Nfa& a) {
  Dfa d = table_dfa(a);
  if (d.trans.empty()) return true;  // empty language
  std::size_t n = d.trans.size();
  // Exponential growth iff some trim state q admits two distinct
  // equal-length cycles: search the pair graph (p1, p2, differed?) for a
  // cycle from (q, q, false) back to (q, q, true).
  for (std::size_t q = 0; q < n; ++q) {
    std::set<std::tuple<std::size_t, std::size_t, bool>> seen;
    std::vector<std::tuple<std::size_t, std::size_t, bool>> stack{{q, q, false}};
    seen.insert({q, q, false});
    bool exponential = false;
    while (!stack.empty() && !exponential) {
      auto [p1, p2, diff] = stack.back();
      stack.pop_back();
      for (std::size_t l1 = 0; l1 < d.alphabet.size(); ++l1)
        for (std::size_t l2 = 0; l2 < d.alphabet.size(); ++l2) {
          std::size_t t1 = d.trans[p1][l1], t2 = d.trans[p2][l2];
          if (t1 == Dfa::npos || t2 == Dfa::npos) continue;
          bool nd = diff || l1 != l2;
          if (t1 == q && t2 == q && nd) {
            exponential = true;
            break;
          }
          if (seen.insert({t1, t2, nd}).second) stack.push_back({t1, t2, nd});
        }
    }
    if (exponential) return false;
  }
  return true;
}

std::vector<Word> subword_closure(const std::vector<Word>& language,
                                  std::size_t maxlen) {
  std::set<Word> out;
  for (const Word& v : language) {
    // All scattered subwords via the subset bitmask when short, else a
    // breadth-first single-deletion closure.
    std::set<Word> todo{v};
    while (!todo.empty()) {
      Word u = *todo.begin();
      todo.erase(todo.begin());
      if (u.size() <= maxlen) out.insert(u);
      if (u.empty()) continue;
      for (std::size_t i = 0; i < u.size(); ++i) {
        Word s;
        s.reserve(u.size() - 1);
        s.insert(s.end(), u.begin(), u.begin() + i);
        s.insert(s.end(), u.begin() + i + 1, u.end());
        if (!out.count(s)) todo.insert(s);
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace testsupport
