// sbo.cpp -- simple block order: comparators, the order transducer, the
// border transformation, the ideal algebra, pseudo-ideal reduction, witness
// search, and the downward-closure driver.
#include "amalgam/sbo.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "amalgam/transducer.hpp"

namespace amalgam {

namespace {

std::string words_key(const Word& u, const Word& v) {
  return word_str(u) + "\x1f" + word_str(v);
}

}  // namespace

std::vector<Letter> priority_alphabet(std::size_t d) {
  std::vector<Letter> order;
  for (std::size_t i = 0; i <= d; ++i) order.push_back(std::to_string(i));
  return order;
}

std::size_t priority_rank(const std::vector<Letter>& order, const Letter& l) {
  auto it = std::find(order.begin(), order.end(), l);
  if (it == order.end())
    throw std::invalid_argument("priority_rank: unknown letter " + l);
  return static_cast<std::size_t>(it - order.begin());
}

// ---------------------------------------------------------------------------
// Comparators.
// ---------------------------------------------------------------------------

bool sbo_leq(const Word& u, const Word& v, const std::vector<Letter>& order) {
  // Reachability over (v position, u position, out?/skip?, barrier rank).
  // Skipping a letter raises the barrier: letters strictly below it may not
  // be emitted until a letter of equal or higher priority is emitted.
  std::vector<std::size_t> ur(u.size()), vr(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) ur[i] = priority_rank(order, u[i]);
  for (std::size_t i = 0; i < v.size(); ++i) vr[i] = priority_rank(order, v[i]);

  using State = std::tuple<std::size_t, std::size_t, int, std::size_t>;
  std::set<State> seen;
  std::vector<State> stack;
  auto push = [&](std::size_t i, std::size_t j, int kind, std::size_t r) {
    State s{i, j, kind, r};
    if (seen.insert(s).second) stack.push_back(s);
  };
  push(0, 0, 1, 0);  // initial: skip state at the lowest priority
  while (!stack.empty()) {
    auto [i, j, kind, r] = stack.back();
    stack.pop_back();
    if (i == v.size()) {
      if (j == u.size()) return true;
      continue;
    }
    std::size_t rp = vr[i];
    if (kind == 0) {  // out_r
      if (rp == r)
        push(i + 1, j, 0, r);  // skipping the same letter keeps the out state
      else
        push(i + 1, j, 1, rp);
      if (j < u.size() && u[j] == v[i]) push(i + 1, j + 1, 0, rp);
    } else {  // skip_r
      if (rp < r) {
        push(i + 1, j, 1, r);  // only skipping is allowed below the barrier
      } else if (rp == r) {
        push(i + 1, j, 1, r);
        if (j < u.size() && u[j] == v[i]) push(i + 1, j + 1, 0, r);
      } else {
        push(i + 1, j, 1, rp);
        if (j < u.size() && u[j] == v[i]) push(i + 1, j + 1, 0, rp);
      }
    }
  }
  return false;
}

Transducer sbo_transducer(const std::vector<Letter>& order) {
  Transducer t;
  t.input_alphabet = order;
  t.output_alphabet = order;
  auto outq = [](const Letter& l) { return "out_" + l; };
  auto skipq = [](const Letter& l) { return "skip_" + l; };
  for (const Letter& l : order) {
    t.states.push_back(outq(l));
    t.states.push_back(skipq(l));
    t.final_states.push_back(outq(l));
    t.final_states.push_back(skipq(l));
  }
  t.initial.push_back(skipq(order.front()));
  for (std::size_t rl = 0; rl < order.size(); ++rl) {
    const Letter& l = order[rl];
    for (std::size_t rp = 0; rp < order.size(); ++rp) {
      const Letter& p = order[rp];
      // From out_l: emitting p moves to out_p; skipping p moves to skip_p
      // unless p == l, where the out state is kept.
      t.transitions.push_back({outq(l), p, {p}, outq(p)});
      t.transitions.push_back({outq(l), p, {}, rp == rl ? outq(l) : skipq(p)});
      // From skip_l: letters strictly below l may only be skipped.
      if (rp < rl) {
        t.transitions.push_back({skipq(l), p, {}, skipq(l)});
      } else if (rp == rl) {
        t.transitions.push_back({skipq(l), p, {}, skipq(l)});
        t.transitions.push_back({skipq(l), p, {p}, outq(l)});
      } else {
        t.transitions.push_back({skipq(l), p, {}, skipq(p)});
        t.transitions.push_back({skipq(l), p, {p}, outq(p)});
      }
    }
  }
  return t;
}

bool po_leq(const Word& u, const Word& v, const std::vector<Letter>& order) {
  // v = v1 u1 ⋯ vn un: letters dropped before a kept letter must not exceed
  // its priority; nothing may be dropped after the last kept letter.
  std::vector<std::size_t> ur(u.size()), vr(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) ur[i] = priority_rank(order, u[i]);
  for (std::size_t i = 0; i < v.size(); ++i) vr[i] = priority_rank(order, v[i]);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, bool> memo;
  std::function<bool(std::size_t, std::size_t, std::size_t)> go =
      [&](std::size_t j, std::size_t i, std::size_t pend) -> bool {
    if (j == v.size()) return i == u.size() && pend == 0;
    auto key = std::make_tuple(j, i, pend);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool res = go(j + 1, i, std::max(pend, vr[j] + 1));
    if (!res && i < u.size() && v[j] == u[i] && ur[i] + 1 >= pend)
      res = go(j + 1, i + 1, 0);
    memo.emplace(key, res);
    return res;
  };
  return go(0, 0, 0);
}

namespace {

std::vector<Word> split_blocks(const Word& w, const Letter& p) {
  std::vector<Word> blocks(1);
  for (const Letter& l : w) {
    if (l == p)
      blocks.emplace_back();
    else
      blocks.back().push_back(l);
  }
  return blocks;
}

bool bo_leq_memo(const Word& u, const Word& v, const std::vector<Letter>& order,
                 std::map<std::string, bool>& memo) {
  std::string key = words_key(u, v);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  std::set<Letter> letters(u.begin(), u.end());
  letters.insert(v.begin(), v.end());
  bool res = false;
  if (letters.size() <= 1) {
    res = u.size() <= v.size();
  } else {
    Letter p = *std::max_element(
        letters.begin(), letters.end(), [&](const Letter& a, const Letter& b) {
          return priority_rank(order, a) < priority_rank(order, b);
        });
    auto ub = split_blocks(u, p);
    auto vb = split_blocks(v, p);
    std::size_t n = ub.size() - 1, m = vb.size() - 1;
    if (n >= 1 && m >= n) {
      // Anchored strictly monotone block embedding: first to first, last to
      // last, the middle as an order-preserving subsequence.
      if (bo_leq_memo(ub[0], vb[0], order, memo) &&
          bo_leq_memo(ub[n], vb[m], order, memo)) {
        if (n == 1) {
          res = true;
        } else {
          std::function<bool(std::size_t, std::size_t)> match =
              [&](std::size_t i, std::size_t j) -> bool {
            if (i == n) return true;           // middle blocks all placed
            if (j + (n - i) > m) return false;  // not enough room
            if (bo_leq_memo(ub[i], vb[j], order, memo) && match(i + 1, j + 1))
              return true;
            return match(i, j + 1);
          };
          res = match(1, 1);
        }
      }
    }
  }
  memo.emplace(key, res);
  return res;
}

}  // namespace

bool bo_leq(const Word& u, const Word& v, const std::vector<Letter>& order) {
  std::map<std::string, bool> memo;
  return bo_leq_memo(u, v, order, memo);
}

// ---------------------------------------------------------------------------
// Borders.
// ---------------------------------------------------------------------------

Letter primed(const Letter& l) { return l + "'"; }
Letter epsmark(const Letter& l) { return l + "^e"; }

std::vector<Letter> bordered_order(const std::vector<Letter>& order) {
  std::vector<Letter> out;
  for (const Letter& l : order) {
    out.push_back(l);
    out.push_back(primed(l));
    out.push_back(epsmark(l));
  }
  return out;
}

Word border(const Word& w, const std::vector<Letter>& order) {
  std::size_t maxr = 0;
  for (const Letter& l : w) maxr = std::max(maxr, priority_rank(order, l));
  if (w.empty() || maxr == 0) return w;
  const Letter& a = order[maxr];
  const Letter& below = order[maxr - 1];
  auto blocks = split_blocks(w, a);
  std::size_t n = blocks.size();
  Letter b1 = blocks.front().empty() ? epsmark(below) : primed(below);
  Letter bn = blocks.back().empty() ? epsmark(below) : primed(below);
  Word out;
  auto append = [&](const Word& x) { out.insert(out.end(), x.begin(), x.end()); };
  out.push_back(b1);
  append(border(blocks[0], order));
  out.push_back(b1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out.push_back(a);
    append(border(blocks[i], order));
  }
  out.push_back(a);
  out.push_back(bn);
  append(border(blocks[n - 1], order));
  out.push_back(bn);
  return out;
}

namespace {

// Small ε-NFA fragments with one initial and one final state.
struct Frag {
  std::vector<std::string> states;
  std::vector<NfaTransition> trans;
  std::string init, fin;
};

std::string fresh_state(std::size_t& ctr) { return "s" + std::to_string(ctr++); }

Frag frag_eps(std::size_t& ctr) {
  Frag f;
  f.init = fresh_state(ctr);
  f.fin = fresh_state(ctr);
  f.states = {f.init, f.fin};
  f.trans.push_back({f.init, "", f.fin});
  return f;
}

Frag frag_letter(const Letter& l, std::size_t& ctr) {
  Frag f;
  f.init = fresh_state(ctr);
  f.fin = fresh_state(ctr);
  f.states = {f.init, f.fin};
  f.trans.push_back({f.init, l, f.fin});
  return f;
}

Frag frag_concat(Frag a, const Frag& b) {
  a.states.insert(a.states.end(), b.states.begin(), b.states.end());
  a.trans.insert(a.trans.end(), b.trans.begin(), b.trans.end());
  a.trans.push_back({a.fin, "", b.init});
  a.fin = b.fin;
  return a;
}

Frag frag_union(Frag a, const Frag& b, std::size_t& ctr) {
  Frag f;
  f.init = fresh_state(ctr);
  f.fin = fresh_state(ctr);
  f.states = {f.init, f.fin};
  f.states.insert(f.states.end(), a.states.begin(), a.states.end());
  f.states.insert(f.states.end(), b.states.begin(), b.states.end());
  f.trans = a.trans;
  f.trans.insert(f.trans.end(), b.trans.begin(), b.trans.end());
  f.trans.push_back({f.init, "", a.init});
  f.trans.push_back({f.init, "", b.init});
  f.trans.push_back({a.fin, "", f.fin});
  f.trans.push_back({b.fin, "", f.fin});
  return f;
}

Frag frag_star(Frag a, std::size_t& ctr) {
  Frag f;
  f.init = fresh_state(ctr);
  f.fin = f.init;
  f.states = {f.init};
  f.states.insert(f.states.end(), a.states.begin(), a.states.end());
  f.trans = a.trans;
  f.trans.push_back({f.init, "", a.init});
  f.trans.push_back({a.fin, "", f.init});
  return f;
}

Nfa frag_to_nfa(const Frag& f, std::vector<Letter> alphabet) {
  Nfa a;
  a.alphabet = std::move(alphabet);
  a.states = f.states;
  a.transitions = f.trans;
  a.initial = {f.init};
  a.final_states = {f.fin};
  return a;
}

// Bordered shape language at a fixed top priority.
Frag border_shape_frag(const std::vector<Letter>& order, std::size_t a,
                       std::size_t& ctr);

// A segment between occurrences of the top letter is the bordered image of a
// word whose own top priority may be anything strictly lower, so the shape of
// such a segment is the union of the fixed-priority shapes below a.
Frag border_shape_below(const std::vector<Letter>& order, std::size_t a,
                        std::size_t& ctr) {
  Frag all = border_shape_frag(order, 0, ctr);
  for (std::size_t j = 1; j < a; ++j)
    all = frag_union(all, border_shape_frag(order, j, ctr), ctr);
  return all;
}

// Same union, but excluding the empty word: the border of a nonempty word is
// never empty, so a primed pair always encloses at least one letter.
Frag border_shape_below_nonempty(const std::vector<Letter>& order,
                                 std::size_t a, std::size_t& ctr) {
  Frag zeros = frag_concat(
      frag_letter(order[0], ctr),
      frag_star(frag_letter(order[0], ctr), ctr));
  Frag all = zeros;
  for (std::size_t j = 1; j < a; ++j)
    all = frag_union(all, border_shape_frag(order, j, ctr), ctr);
  return all;
}

Frag border_shape_frag(const std::vector<Letter>& order, std::size_t a,
                       std::size_t& ctr) {
  if (a == 0) return frag_star(frag_letter(order[0], ctr), ctr);
  const Letter& top = order[a];
  const Letter& below = order[a - 1];
  auto block = [&]() {
    Frag marked = frag_concat(frag_letter(epsmark(below), ctr),
                              frag_letter(epsmark(below), ctr));
    Frag inner = frag_concat(
        frag_letter(primed(below), ctr),
        frag_concat(border_shape_below_nonempty(order, a, ctr),
                    frag_letter(primed(below), ctr)));
    return frag_union(marked, inner, ctr);
  };
  Frag mid = frag_star(
      frag_concat(frag_letter(top, ctr), border_shape_below(order, a, ctr)),
      ctr);
  return frag_concat(
      block(),
      frag_concat(mid, frag_concat(frag_letter(top, ctr), block())));
}

}  // namespace

Nfa border_shape_nfa(const std::vector<Letter>& order) {
  std::size_t ctr = 0;
  Frag all = border_shape_frag(order, 0, ctr);
  for (std::size_t a = 1; a < order.size(); ++a)
    all = frag_union(all, border_shape_frag(order, a, ctr), ctr);
  return frag_to_nfa(all, bordered_order(order));
}

// ---------------------------------------------------------------------------
// Ideals: construction, printing, parsing.
// ---------------------------------------------------------------------------

SboIdeal sbo_base_bounded(const Letter& l, std::size_t n) {
  SboIdeal i;
  i.is_base = true;
  i.letter = l;
  i.bound = n;
  return i;
}

SboIdeal sbo_base_star(const Letter& l) {
  SboIdeal i;
  i.is_base = true;
  i.letter = l;
  return i;
}

SboIdeal sbo_epsilon() {
  SboIdeal i;
  i.is_base = true;
  i.letter = "";
  i.bound = 0;
  return i;
}

namespace {

bool is_eps_ideal(const SboIdeal& i) { return i.is_base && i.letter.empty(); }

SboIdeal make_composite(const Letter& a, std::vector<SboAtom> atoms,
                        const SboIdeal& tail) {
  if (atoms.empty()) return tail;
  SboIdeal i;
  i.is_base = false;
  i.letter = a;
  i.atoms = std::move(atoms);
  if (!is_eps_ideal(tail))
    i.tail = std::make_shared<const SboIdeal>(tail);
  return i;
}

SboIdeal tail_of(const SboIdeal& i) {
  return i.tail ? *i.tail : sbo_epsilon();
}

SboAtom mand_atom(const SboIdeal& part) {
  SboAtom a;
  a.kind = SboAtom::Kind::Mand;
  a.parts = {part};
  return a;
}

SboAtom opt_atom(const SboIdeal& part) {
  SboAtom a;
  a.kind = SboAtom::Kind::Opt;
  a.parts = {part};
  return a;
}

SboAtom star_atom(std::vector<SboIdeal> parts) {
  SboAtom a;
  a.kind = SboAtom::Kind::Star;
  a.parts = std::move(parts);
  return a;
}

}  // namespace

std::string SboIdeal::str() const {
  if (is_base) {
    if (letter.empty()) return "eps";
    if (!bound) return letter + "*";
    return letter + "^{<=" + std::to_string(*bound) + "}";
  }
  std::string out = "(";
  bool first = true;
  for (const SboAtom& a : atoms) {
    if (!first) out += " ";
    first = false;
    out += "(";
    for (std::size_t k = 0; k < a.parts.size(); ++k) {
      if (k) out += "|";
      out += a.parts[k].str();
    }
    out += " " + letter + ")";
    if (a.kind == SboAtom::Kind::Opt) out += "?";
    if (a.kind == SboAtom::Kind::Star) out += "*";
  }
  if (tail) out += " " + tail->str();
  out += ")";
  return out;
}

std::size_t SboIdeal::size() const {
  if (is_base) {
    if (letter.empty()) return 0;
    return bound ? 1 + *bound : 1;
  }
  std::size_t s = tail ? tail->size() : 0;
  for (const SboAtom& a : atoms) {
    s += 1;
    for (const SboIdeal& p : a.parts) s += p.size();
  }
  return s;
}

namespace {

struct IdealToken {
  enum class Kind { LParen, RParen, Pipe, Star, QMark, Bound, Name };
  Kind kind;
  std::string text;
  std::size_t number = 0;
};

std::vector<IdealToken> ideal_tokenize(const std::string& text) {
  std::vector<IdealToken> toks;
  std::size_t i = 0;
  auto starts_bound = [&](std::size_t k) {
    return text.compare(k, 4, "^{<=") == 0;
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') { toks.push_back({IdealToken::Kind::LParen, "("}); ++i; continue; }
    if (c == ')') { toks.push_back({IdealToken::Kind::RParen, ")"}); ++i; continue; }
    if (c == '|') { toks.push_back({IdealToken::Kind::Pipe, "|"}); ++i; continue; }
    if (c == '*') { toks.push_back({IdealToken::Kind::Star, "*"}); ++i; continue; }
    if (c == '?') { toks.push_back({IdealToken::Kind::QMark, "?"}); ++i; continue; }
    if (starts_bound(i)) {
      std::size_t j = i + 4, n = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        n = 10 * n + static_cast<std::size_t>(text[j++] - '0');
      if (j >= text.size() || text[j] != '}')
        throw std::invalid_argument("ideal parse: malformed bound");
      toks.push_back({IdealToken::Kind::Bound, text.substr(i, j + 1 - i), n});
      i = j + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      char d = text[j];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == '|' || d == '*' || d == '?' || starts_bound(j))
        break;
      ++j;
    }
    toks.push_back({IdealToken::Kind::Name, text.substr(i, j - i)});
    i = j;
  }
  return toks;
}

struct IdealItem {
  enum class Kind { Ideal, Atom, Bare };
  Kind kind;
  SboIdeal ideal;
  SboAtom atom;
  Letter letter;  // atom letter / bare letter
};

struct IdealParser {
  const std::vector<IdealToken>& toks;
  std::size_t pos = 0;

  bool at(IdealToken::Kind k) const {
    return pos < toks.size() && toks[pos].kind == k;
  }

  SboIdeal items_to_ideal(std::vector<IdealItem> items) {
    if (items.empty()) return sbo_epsilon();
    if (items.front().kind == IdealItem::Kind::Atom) {
      Letter a = items.front().letter;
      std::vector<SboAtom> atoms;
      std::size_t i = 0;
      while (i < items.size() && items[i].kind == IdealItem::Kind::Atom &&
             items[i].letter == a)
        atoms.push_back(items[i++].atom);
      std::vector<IdealItem> rest(items.begin() + static_cast<long>(i),
                                  items.end());
      return make_composite(a, std::move(atoms), items_to_ideal(std::move(rest)));
    }
    if (items.front().kind == IdealItem::Kind::Ideal) {
      if (items.size() != 1)
        throw std::invalid_argument("ideal parse: trailing material after tail");
      return items.front().ideal;
    }
    throw std::invalid_argument("ideal parse: stray letter " +
                                items.front().letter);
  }

  std::vector<IdealItem> parse_seq() {
    std::vector<IdealItem> items;
    while (pos < toks.size() && !at(IdealToken::Kind::RParen) &&
           !at(IdealToken::Kind::Pipe)) {
      if (at(IdealToken::Kind::Name)) {
        std::string name = toks[pos++].text;
        if (name == "eps") {
          items.push_back({IdealItem::Kind::Ideal, sbo_epsilon(), {}, ""});
        } else if (at(IdealToken::Kind::Bound)) {
          std::size_t n = toks[pos++].number;
          items.push_back(
              {IdealItem::Kind::Ideal, sbo_base_bounded(name, n), {}, ""});
        } else if (at(IdealToken::Kind::Star)) {
          ++pos;
          items.push_back({IdealItem::Kind::Ideal, sbo_base_star(name), {}, ""});
        } else {
          IdealItem it;
          it.kind = IdealItem::Kind::Bare;
          it.letter = name;
          items.push_back(it);
        }
        continue;
      }
      if (at(IdealToken::Kind::LParen)) {
        ++pos;
        std::vector<std::vector<IdealItem>> alts;
        alts.push_back(parse_seq());
        while (at(IdealToken::Kind::Pipe)) {
          ++pos;
          alts.push_back(parse_seq());
        }
        if (!at(IdealToken::Kind::RParen))
          throw std::invalid_argument("ideal parse: missing ')'");
        ++pos;
        bool star = at(IdealToken::Kind::Star);
        bool opt = !star && at(IdealToken::Kind::QMark);
        if (star || opt) ++pos;
        auto strip_letter = [&](std::vector<IdealItem>& alt) -> Letter {
          if (alt.empty() || alt.back().kind != IdealItem::Kind::Bare)
            throw std::invalid_argument(
                "ideal parse: atom group must end with a letter");
          Letter l = alt.back().letter;
          alt.pop_back();
          return l;
        };
        if (star) {
          Letter a = strip_letter(alts.back());
          std::vector<SboIdeal> parts;
          for (auto& alt : alts) parts.push_back(items_to_ideal(std::move(alt)));
          IdealItem it;
          it.kind = IdealItem::Kind::Atom;
          it.atom = star_atom(std::move(parts));
          it.letter = a;
          items.push_back(it);
        } else if (opt) {
          if (alts.size() != 1)
            throw std::invalid_argument("ideal parse: '?' atom with union");
          Letter a = strip_letter(alts.back());
          IdealItem it;
          it.kind = IdealItem::Kind::Atom;
          it.atom = opt_atom(items_to_ideal(std::move(alts.front())));
          it.letter = a;
          items.push_back(it);
        } else {
          if (alts.size() != 1)
            throw std::invalid_argument("ideal parse: union without star");
          auto& alt = alts.front();
          if (!alt.empty() && alt.back().kind == IdealItem::Kind::Bare) {
            Letter a = strip_letter(alt);
            IdealItem it;
            it.kind = IdealItem::Kind::Atom;
            it.atom = mand_atom(items_to_ideal(std::move(alt)));
            it.letter = a;
            items.push_back(it);
          } else {
            items.push_back(
                {IdealItem::Kind::Ideal, items_to_ideal(std::move(alt)), {}, ""});
          }
        }
        continue;
      }
      throw std::invalid_argument("ideal parse: unexpected token " +
                                  toks[pos].text);
    }
    return items;
  }
};

}  // namespace

SboIdeal parse_sbo_ideal(const std::string& text) {
  auto toks = ideal_tokenize(text);
  IdealParser p{toks};
  auto items = p.parse_seq();
  if (p.pos != toks.size())
    throw std::invalid_argument("ideal parse: trailing tokens");
  return p.items_to_ideal(std::move(items));
}

// ---------------------------------------------------------------------------
// Ideal semantics: NFA and membership.
// ---------------------------------------------------------------------------

namespace {

Frag frag_of_ideal(const SboIdeal& i, std::size_t& ctr) {
  if (i.is_base) {
    if (i.letter.empty()) return frag_eps(ctr);
    if (!i.bound) return frag_star(frag_letter(i.letter, ctr), ctr);
    Frag f = frag_eps(ctr);
    for (std::size_t k = 0; k < *i.bound; ++k)
      f = frag_concat(f,
                      frag_union(frag_letter(i.letter, ctr), frag_eps(ctr), ctr));
    return f;
  }
  Frag f = frag_eps(ctr);
  for (const SboAtom& a : i.atoms) {
    Frag body = frag_of_ideal(a.parts.front(), ctr);
    for (std::size_t k = 1; k < a.parts.size(); ++k)
      body = frag_union(body, frag_of_ideal(a.parts[k], ctr), ctr);
    body = frag_concat(body, frag_letter(i.letter, ctr));
    switch (a.kind) {
      case SboAtom::Kind::Mand:
        break;
      case SboAtom::Kind::Opt:
        body = frag_union(body, frag_eps(ctr), ctr);
        break;
      case SboAtom::Kind::Star:
        body = frag_star(body, ctr);
        break;
    }
    f = frag_concat(f, body);
  }
  if (i.tail) f = frag_concat(f, frag_of_ideal(*i.tail, ctr));
  return f;
}

}  // namespace

Nfa sbo_ideal_to_nfa(const SboIdeal& ideal, const std::vector<Letter>& order) {
  std::size_t ctr = 0;
  return frag_to_nfa(frag_of_ideal(ideal, ctr), order);
}

namespace {

bool member_span(const SboIdeal& i, const Word& w, std::size_t lo,
                 std::size_t hi) {
  if (i.is_base) {
    if (i.letter.empty()) return lo == hi;
    if (i.bound && hi - lo > *i.bound) return false;
    for (std::size_t k = lo; k < hi; ++k)
      if (w[k] != i.letter) return false;
    return true;
  }
  std::map<std::pair<std::size_t, std::size_t>, bool> memo;
  std::function<bool(std::size_t, std::size_t)> go =
      [&](std::size_t ai, std::size_t pos) -> bool {
    auto key = std::make_pair(ai, pos);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool res = false;
    if (ai == i.atoms.size()) {
      res = i.tail ? member_span(*i.tail, w, pos, hi) : pos == hi;
    } else {
      const SboAtom& a = i.atoms[ai];
      if (a.kind != SboAtom::Kind::Mand) res = go(ai + 1, pos);
      for (std::size_t k = pos; k < hi && !res; ++k) {
        if (w[k] != i.letter) continue;
        bool part_ok = false;
        for (const SboIdeal& p : a.parts)
          if (member_span(p, w, pos, k)) {
            part_ok = true;
            break;
          }
        if (!part_ok) continue;
        res = a.kind == SboAtom::Kind::Star ? go(ai, k + 1) : go(ai + 1, k + 1);
      }
    }
    memo.emplace(key, res);
    return res;
  };
  return go(0, lo);
}

}  // namespace

bool sbo_ideal_member(const SboIdeal& ideal, const Word& w) {
  return member_span(ideal, w, 0, w.size());
}

bool sbo_is_pseudo(const SboIdeal& ideal) {
  if (ideal.is_base) return true;
  if (ideal.atoms.size() == 1 && ideal.atoms[0].kind == SboAtom::Kind::Star &&
      (!ideal.tail || sbo_is_pseudo(*ideal.tail))) {
    return ideal.atoms[0].parts.size() == 1 &&
           sbo_is_pseudo(ideal.atoms[0].parts[0]);
  }
  for (const SboAtom& a : ideal.atoms) {
    if (a.kind != SboAtom::Kind::Mand || a.parts.size() != 1 ||
        !sbo_is_pseudo(a.parts[0]))
      return false;
  }
  return !ideal.tail || sbo_is_pseudo(*ideal.tail);
}

// ---------------------------------------------------------------------------
// Intersection.
// ---------------------------------------------------------------------------

namespace {

bool contains_eps(const SboIdeal& i) {
  if (i.is_base) return true;
  for (const SboAtom& a : i.atoms)
    if (a.kind == SboAtom::Kind::Mand) return false;
  return !i.tail || contains_eps(*i.tail);
}

struct InterCtx {
  const std::vector<Letter>& order;
  std::map<std::string, std::vector<SboIdeal>> memo;

  long top_rank(const SboIdeal& i) const {
    if (is_eps_ideal(i)) return -1;
    return static_cast<long>(priority_rank(order, i.letter));
  }

  static std::vector<SboIdeal> dedup(std::vector<SboIdeal> v) {
    std::sort(v.begin(), v.end(), [](const SboIdeal& a, const SboIdeal& b) {
      return a.str() < b.str();
    });
    v.erase(std::unique(v.begin(), v.end(),
                        [](const SboIdeal& a, const SboIdeal& b) {
                          return a.str() == b.str();
                        }),
            v.end());
    return v;
  }

  // Prepends a mandatory atom C·a.
  static SboIdeal cons_mand(const SboIdeal& c, const Letter& a,
                            const SboIdeal& j) {
    if (!j.is_base && j.letter == a) {
      SboIdeal out = j;
      out.atoms.insert(out.atoms.begin(), mand_atom(c));
      return out;
    }
    return make_composite(a, {mand_atom(c)}, j);
  }

  // Prepends a star atom (∪parts·a)*.
  static SboIdeal cons_star(std::vector<SboIdeal> parts, const Letter& a,
                            const SboIdeal& j) {
    if (parts.empty()) return j;
    if (!j.is_base && j.letter == a) {
      SboIdeal out = j;
      out.atoms.insert(out.atoms.begin(), star_atom(std::move(parts)));
      return out;
    }
    return make_composite(a, {star_atom(std::move(parts))}, j);
  }

  static SboIdeal rest_of(const SboIdeal& i) {
    SboIdeal out = i;
    out.atoms.erase(out.atoms.begin());
    if (out.atoms.empty()) return tail_of(i);
    return out;
  }

  static SboIdeal mandify(const SboIdeal& i) {
    SboIdeal out = i;
    out.atoms.front().kind = SboAtom::Kind::Mand;
    return out;
  }

  // Rewrites a base at the composite's letter as an equivalent composite.
  static SboIdeal base_as_composite(const SboIdeal& b) {
    if (!b.bound) return make_composite(b.letter, {star_atom({sbo_epsilon()})},
                                        sbo_epsilon());
    std::vector<SboAtom> atoms(*b.bound, opt_atom(sbo_epsilon()));
    if (atoms.empty()) return sbo_epsilon();
    return make_composite(b.letter, std::move(atoms), sbo_epsilon());
  }

  std::vector<SboIdeal> inter_union(const std::vector<SboIdeal>& as,
                                    const std::vector<SboIdeal>& bs) {
    std::vector<SboIdeal> out;
    for (const SboIdeal& a : as)
      for (const SboIdeal& b : bs) {
        auto r = inter(a, b);
        out.insert(out.end(), r.begin(), r.end());
      }
    return dedup(std::move(out));
  }

  std::vector<SboIdeal> inter(const SboIdeal& i1, const SboIdeal& i2) {
    std::string key = i1.str() + "\x1f" + i2.str();
    auto mit = memo.find(key);
    if (mit != memo.end()) return mit->second;
    auto res = dedup(inter_raw(i1, i2));
    memo.emplace(key, res);
    return res;
  }

  std::vector<SboIdeal> inter_raw(const SboIdeal& i1, const SboIdeal& i2) {
    if (is_eps_ideal(i1))
      return contains_eps(i2) ? std::vector<SboIdeal>{sbo_epsilon()}
                              : std::vector<SboIdeal>{};
    if (is_eps_ideal(i2))
      return contains_eps(i1) ? std::vector<SboIdeal>{sbo_epsilon()}
                              : std::vector<SboIdeal>{};
    if (i1.is_base && i2.is_base) {
      if (i1.letter != i2.letter)
        return contains_eps(i1) && contains_eps(i2)
                   ? std::vector<SboIdeal>{sbo_epsilon()}
                   : std::vector<SboIdeal>{};
      if (!i1.bound) return {i2};
      if (!i2.bound) return {i1};
      return {sbo_base_bounded(i1.letter, std::min(*i1.bound, *i2.bound))};
    }
    long r1 = top_rank(i1), r2 = top_rank(i2);
    if (r1 != r2) {
      const SboIdeal& hi = r1 > r2 ? i1 : i2;
      const SboIdeal& lo = r1 > r2 ? i2 : i1;
      if (hi.is_base) {
        // The lower ideal has no occurrence of the base letter.
        return contains_eps(lo) ? std::vector<SboIdeal>{sbo_epsilon()}
                                : std::vector<SboIdeal>{};
      }
      for (const SboAtom& a : hi.atoms)
        if (a.kind == SboAtom::Kind::Mand) return {};
      return inter(lo, tail_of(hi));
    }
    if (i1.is_base) return inter(base_as_composite(i1), i2);
    if (i2.is_base) return inter(i1, base_as_composite(i2));

    const Letter& a = i1.letter;
    const SboAtom& x = i1.atoms.front();
    const SboAtom& y = i2.atoms.front();
    SboIdeal rest1 = rest_of(i1), rest2 = rest_of(i2);
    auto cross_mand = [&](const std::vector<SboIdeal>& rests) {
      std::vector<SboIdeal> out;
      for (const SboIdeal& c : inter_union(x.parts, y.parts))
        for (const SboIdeal& r : rests) out.push_back(cons_mand(c, a, r));
      return out;
    };
    auto both = [](std::vector<SboIdeal> u, const std::vector<SboIdeal>& v) {
      u.insert(u.end(), v.begin(), v.end());
      return u;
    };
    using K = SboAtom::Kind;
    if (x.kind == K::Mand && y.kind == K::Mand)
      return cross_mand(inter(rest1, rest2));
    if (x.kind == K::Mand && y.kind == K::Opt)
      return both(cross_mand(inter(rest1, rest2)), inter(i1, rest2));
    if (x.kind == K::Opt && y.kind == K::Mand)
      return both(cross_mand(inter(rest1, rest2)), inter(rest1, i2));
    if (x.kind == K::Mand && y.kind == K::Star)
      return both(cross_mand(inter(rest1, i2)), inter(i1, rest2));
    if (x.kind == K::Star && y.kind == K::Mand)
      return both(cross_mand(inter(i1, rest2)), inter(rest1, i2));
    if (x.kind == K::Opt && y.kind == K::Opt) {
      auto out = cross_mand(inter(rest1, rest2));
      out = both(std::move(out), inter(mandify(i1), rest2));
      out = both(std::move(out), inter(rest1, mandify(i2)));
      return both(std::move(out), inter(rest1, rest2));
    }
    if (x.kind == K::Opt && y.kind == K::Star) {
      auto out = cross_mand(inter(rest1, i2));
      out = both(std::move(out), inter(mandify(i1), rest2));
      return both(std::move(out), inter(rest1, i2));
    }
    if (x.kind == K::Star && y.kind == K::Opt) {
      auto out = cross_mand(inter(i1, rest2));
      out = both(std::move(out), inter(rest1, mandify(i2)));
      return both(std::move(out), inter(i1, rest2));
    }
    // Star vs Star: shared leading blocks lie in the part intersection,
    // then one side leaves its star first.
    auto prefix = inter_union(x.parts, y.parts);
    auto rests = both(inter(rest1, i2), inter(i1, rest2));
    std::vector<SboIdeal> out;
    for (const SboIdeal& r : rests) out.push_back(cons_star(prefix, a, r));
    return out;
  }
};

}  // namespace

std::vector<SboIdeal> sbo_ideal_intersection(const SboIdeal& a,
                                             const SboIdeal& b,
                                             const std::vector<Letter>& order) {
  InterCtx ctx{order, {}};
  return ctx.inter(a, b);
}

// ---------------------------------------------------------------------------
// Pseudo-ideal reduction.
// ---------------------------------------------------------------------------

namespace {

struct ReduceState {
  std::vector<Letter> order;
  std::vector<Transducer> chain;
  std::size_t fresh_ctr = 0;

  // Allocates a fresh letter ranked just above `above`, with a transducer
  // that optionally emits up to max_repeat copies after any anchor letter.
  Letter alloc(const Letter& above, const std::vector<Letter>& anchors,
               std::size_t max_repeat) {
    Letter name;
    do {
      name = "e" + std::to_string(fresh_ctr++);
    } while (std::find(order.begin(), order.end(), name) != order.end());
    Transducer t;
    t.input_alphabet = order;
    t.output_alphabet = order;
    t.output_alphabet.push_back(name);
    t.states = {"q"};
    t.initial = {"q"};
    t.final_states = {"q"};
    for (const Letter& x : order) {
      t.transitions.push_back({"q", x, {x}, "q"});
      if (std::find(anchors.begin(), anchors.end(), x) != anchors.end()) {
        Word out{x};
        for (std::size_t m = 0; m < max_repeat; ++m) {
          out.push_back(name);
          t.transitions.push_back({"q", x, out, "q"});
        }
      }
    }
    chain.push_back(std::move(t));
    auto at = std::find(order.begin(), order.end(), above);
    order.insert(at + 1, name);
    return name;
  }
};

struct ConvertUnit {
  bool star = false;
  std::vector<SboIdeal> plain_variants;  // plain: pseudo variants of the part
  SboIdeal star_body;                    // star: iteration content K
  Letter star_letter;                    // star: its block letter
};

std::vector<SboIdeal> convert_ideal(const SboIdeal& i, ReduceState& st);

// A star atom (∪parts · a)*: single converted member stays at letter a;
// a union is serialized at a fresh letter ranked just above a.
ConvertUnit convert_star(const std::vector<SboIdeal>& parts, const Letter& a,
                         ReduceState& st) {
  std::vector<SboIdeal> members;
  for (const SboIdeal& p : parts) {
    auto vs = convert_ideal(p, st);
    members.insert(members.end(), vs.begin(), vs.end());
  }
  members = InterCtx::dedup(std::move(members));
  ConvertUnit u;
  u.star = true;
  if (members.size() == 1) {
    u.star_body = members.front();
    u.star_letter = a;
  } else {
    std::vector<SboAtom> atoms;
    for (const SboIdeal& m : members) atoms.push_back(mand_atom(m));
    SboIdeal k = make_composite(a, std::move(atoms), sbo_epsilon());
    u.star_letter = st.alloc(a, {a}, 1);
    u.star_body = k;
  }
  return u;
}

SboIdeal star_as_pseudo(const ConvertUnit& u) {
  return make_composite(u.star_letter, {star_atom({u.star_body})},
                        sbo_epsilon());
}

// One iteration of the star, as a standalone pseudo component.
SboIdeal star_iteration(const ConvertUnit& u) {
  return InterCtx::cons_mand(u.star_body, u.star_letter, sbo_epsilon());
}

std::vector<SboIdeal> convert_ideal(const SboIdeal& i, ReduceState& st) {
  if (i.is_base) return {i};
  const Letter& a = i.letter;
  bool uses_sep = false;
  for (const SboAtom& at : i.atoms)
    if (at.kind == SboAtom::Kind::Star) uses_sep = true;

  // Per-atom unit alternatives (nullopt = optional atom omitted).
  std::vector<std::vector<std::optional<ConvertUnit>>> alternatives;
  for (const SboAtom& at : i.atoms) {
    std::vector<std::optional<ConvertUnit>> alts;
    if (at.kind == SboAtom::Kind::Star) {
      alts.emplace_back(convert_star(at.parts, a, st));
    } else {
      if (at.kind == SboAtom::Kind::Opt) alts.emplace_back(std::nullopt);
      ConvertUnit u;
      u.plain_variants = convert_ideal(at.parts.front(), st);
      alts.emplace_back(std::move(u));
    }
    alternatives.push_back(std::move(alts));
  }
  std::vector<SboIdeal> tails = convert_ideal(tail_of(i), st);

  Letter sep;
  std::vector<Letter> sep_anchors{a};
  if (uses_sep) {
    for (const auto& alts : alternatives)
      for (const auto& alt : alts)
        if (alt && alt->star && alt->star_letter != a)
          sep_anchors.push_back(alt->star_letter);
    Letter highest = a;
    for (const Letter& l : sep_anchors)
      if (priority_rank(st.order, l) > priority_rank(st.order, highest))
        highest = l;
    sep = st.alloc(highest, sep_anchors, i.atoms.size() + 1);
  }

  std::vector<SboIdeal> results;
  // Cartesian choice over atom alternatives.
  std::vector<std::size_t> choice(alternatives.size(), 0);
  for (;;) {
    std::vector<const ConvertUnit*> units;
    for (std::size_t k = 0; k < alternatives.size(); ++k) {
      const auto& alt = alternatives[k][choice[k]];
      if (alt) units.push_back(&*alt);
    }
    for (const SboIdeal& tl : tails) {
      if (units.empty()) {
        results.push_back(tl);
      } else if (!uses_sep) {
        // Mandatory atoms only: already a concatenation at letter a.
        std::vector<const ConvertUnit*> plain = units;
        std::vector<std::size_t> pick(plain.size(), 0);
        for (;;) {
          std::vector<SboAtom> atoms;
          for (std::size_t k = 0; k < plain.size(); ++k)
            atoms.push_back(mand_atom(plain[k]->plain_variants[pick[k]]));
          results.push_back(make_composite(a, std::move(atoms), tl));
          std::size_t k = 0;
          while (k < pick.size() &&
                 ++pick[k] == plain[k]->plain_variants.size()) {
            pick[k] = 0;
            ++k;
          }
          if (k == pick.size()) break;
        }
      } else if (units.size() == 1 && units.front()->star &&
                 is_eps_ideal(tl)) {
        results.push_back(star_as_pseudo(*units.front()));
      } else {
        // Serialize the units at the fresh separator.  A leading star is
        // split into its empty and nonempty cases so the first block never
        // starts with an inserted letter.
        struct Comp {
          bool star;
          std::vector<SboIdeal> variants;  // plain component variants
          SboIdeal star_comp;
        };
        std::vector<Comp> comps;
        for (const ConvertUnit* u : units) {
          Comp c;
          c.star = u->star;
          if (u->star) {
            c.star_comp = star_as_pseudo(*u);
            c.variants = {star_iteration(*u)};
          } else {
            for (const SboIdeal& v : u->plain_variants)
              c.variants.push_back(
                  InterCtx::cons_mand(v, a, sbo_epsilon()));
          }
          comps.push_back(std::move(c));
        }
        std::function<void(std::size_t, std::vector<SboIdeal>, bool)> emit =
            [&](std::size_t k, std::vector<SboIdeal> acc, bool leading) {
              if (k == comps.size()) {
                if (acc.empty()) {
                  results.push_back(tl);
                  return;
                }
                std::vector<SboAtom> atoms;
                for (const SboIdeal& c : acc) atoms.push_back(mand_atom(c));
                results.push_back(make_composite(sep, std::move(atoms), tl));
                return;
              }
              const Comp& c = comps[k];
              if (c.star && leading) {
                emit(k + 1, acc, true);  // empty star at the front
                for (const SboIdeal& v : c.variants) {
                  auto acc2 = acc;
                  acc2.push_back(v);
                  acc2.push_back(c.star_comp);
                  emit(k + 1, std::move(acc2), false);
                }
              } else if (c.star) {
                auto acc2 = acc;
                acc2.push_back(c.star_comp);
                emit(k + 1, std::move(acc2), false);
              } else {
                for (const SboIdeal& v : c.variants) {
                  auto acc2 = acc;
                  acc2.push_back(v);
                  emit(k + 1, std::move(acc2), false);
                }
              }
            };
        emit(0, {}, true);
      }
    }
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == alternatives[k].size()) {
      choice[k] = 0;
      ++k;
    }
    if (k == choice.size() || choice.empty()) break;
  }
  return InterCtx::dedup(std::move(results));
}

}  // namespace

SboReduction pseudoideal_reduction(const SboIdeal& ideal,
                                   const std::vector<Letter>& order) {
  if (sbo_is_pseudo(ideal)) return {order, {}, {ideal}};
  ReduceState st{order, {}, 0};
  auto pseudos = convert_ideal(ideal, st);
  for (const SboIdeal& p : pseudos)
    if (!sbo_is_pseudo(p))
      throw std::logic_error("pseudoideal_reduction: non-pseudo result " +
                             p.str());
  return {st.order, st.chain, pseudos};
}

// ---------------------------------------------------------------------------
// Witness search.
// ---------------------------------------------------------------------------

namespace {

struct BudgetStop {};

struct WitnessCtx {
  const System& s;
  const std::vector<Letter>& order;
  const Budget& budget;
  std::vector<Run> runs;
  std::vector<Decomposition> canons;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<MonotoneMap>>
      emb_cache;
  std::uint64_t steps = 0;

  void tick() {
    if (++steps > budget.max_steps) throw BudgetStop{};
  }

  const std::vector<MonotoneMap>& embeddings(std::size_t psi, std::size_t rho) {
    auto key = std::make_pair(psi, rho);
    auto it = emb_cache.find(key);
    if (it != emb_cache.end()) return it->second;
    auto e = s.admissible_embeddings(runs[psi], runs[rho]);
    return emb_cache.emplace(key, std::move(e)).first->second;
  }

  // Verifies the embedding pumps: amalgamating rho with itself over psi at
  // gap i must double the chosen gap word.
  bool pump_ok(std::size_t psi, std::size_t rho, const MonotoneMap& f,
               std::size_t i, const Word& gap) {
    try {
      AmalgamResult r = s.amalgamate(runs[psi], f, runs[rho], f, runs[rho], i);
      auto h = compose_maps(f, r.f_prime);
      auto gp = gap_words(s, runs[psi], r.rho3, h);
      Word doubled = gap;
      doubled.insert(doubled.end(), gap.begin(), gap.end());
      return gp.gaps.at(i) == doubled;
    } catch (const BudgetStop&) {
      throw;
    } catch (...) {
      return false;
    }
  }

  // Factor-position extent of gap i of f: positions lo+1..hi of the canon.
  static std::pair<std::size_t, std::size_t> gap_extent(const MonotoneMap& f,
                                                        std::size_t i,
                                                        std::size_t len) {
    std::size_t lo = i == 0 ? 0 : f(i);
    std::size_t hi = i == f.domain_len() ? len : f(i + 1) - 1;
    return {lo, hi};
  }

  bool span_below(std::size_t rho, std::size_t lo, std::size_t hi,
                  std::size_t max_rank) {
    const auto& dec = canons[rho];
    for (std::size_t k = lo + 1; k <= hi; ++k) {
      const Factor& f = dec[k - 1];
      if (f.empty()) continue;
      if (priority_rank(order, f) > max_rank) return false;
    }
    return true;
  }

  // Does rho witness J between canon positions lo and hi?
  bool witness(const SboIdeal& j, std::size_t rho, std::size_t lo,
               std::size_t hi) {
    tick();
    const auto& dec = canons[rho];
    if (j.is_base) {
      if (j.letter.empty()) return true;
      if (j.bound) {
        // A contiguous block letter^bound inside the span's restriction.
        std::size_t need = *j.bound, best = 0, cur = 0;
        for (std::size_t k = lo + 1; k <= hi; ++k) {
          const Factor& f = dec[k - 1];
          if (f.empty()) continue;
          cur = f == j.letter ? cur + 1 : 0;
          best = std::max(best, cur);
        }
        return best >= need;
      }
      // letter^*: a pumpable all-letter gap inside the span.
      for (std::size_t psi = 0; psi < runs.size(); ++psi) {
        for (const MonotoneMap& f : embeddings(psi, rho)) {
          tick();
          auto gp = gap_words(s, runs[psi], runs[rho], f);
          for (std::size_t i = 0; i <= f.domain_len(); ++i) {
            const Word& g = gp.gaps[i];
            if (g.empty()) continue;
            bool allz = std::all_of(g.begin(), g.end(), [&](const Letter& l) {
              return l == j.letter;
            });
            if (!allz) continue;
            auto [glo, ghi] = gap_extent(f, i, dec.size());
            if (glo < lo || ghi > hi) continue;
            if (pump_ok(psi, rho, f, i, g)) return true;
          }
        }
      }
      return false;
    }
    if (j.atoms.size() == 1 && j.atoms[0].kind == SboAtom::Kind::Star) {
      // (J' a)* (optionally followed by a lower tail): a pumpable gap whose
      // content witnesses (J' a)^l, l ≥ 1, with the tail witnessed after the
      // gap within the same span.
      const SboIdeal& body = j.atoms[0].parts[0];
      std::size_t rank_a = priority_rank(order, j.letter);
      for (std::size_t psi = 0; psi < runs.size(); ++psi) {
        for (const MonotoneMap& f : embeddings(psi, rho)) {
          tick();
          auto gp = gap_words(s, runs[psi], runs[rho], f);
          for (std::size_t i = 0; i <= f.domain_len(); ++i) {
            const Word& g = gp.gaps[i];
            if (g.empty()) continue;
            auto [glo, ghi] = gap_extent(f, i, dec.size());
            if (glo < lo || ghi > hi) continue;
            if (!span_below(rho, glo, ghi, rank_a)) continue;
            std::size_t acount = static_cast<std::size_t>(
                std::count(g.begin(), g.end(), j.letter));
            if (acount == 0) continue;
            if (!pump_ok(psi, rho, f, i, g)) continue;
            if (j.tail && !witness(*j.tail, rho, ghi, hi)) continue;
            for (std::size_t l = 1; l <= acount; ++l) {
              std::vector<SboAtom> atoms(l, mand_atom(body));
              SboIdeal power =
                  make_composite(j.letter, std::move(atoms), sbo_epsilon());
              if (witness(power, rho, glo, ghi)) return true;
            }
          }
        }
      }
      return false;
    }
    // Concatenation I1 a ⋯ In a (+ optional lower tail): pick increasing
    // canon positions of the separator letter inside an all-low span.
    for (const SboAtom& a : j.atoms)
      if (a.kind != SboAtom::Kind::Mand || a.parts.size() != 1)
        throw std::invalid_argument("find_I_witness: not a pseudo-ideal: " +
                                    j.str());
    std::size_t rank_a = priority_rank(order, j.letter);
    if (!span_below(rho, lo, hi, rank_a)) return false;
    std::vector<std::size_t> seps;
    for (std::size_t k = lo + 1; k <= hi; ++k)
      if (dec[k - 1] == j.letter) seps.push_back(k);
    std::function<bool(std::size_t, std::size_t, std::size_t)> place =
        [&](std::size_t ai, std::size_t prev, std::size_t min_idx) -> bool {
      if (ai == j.atoms.size())
        return !j.tail || witness(*j.tail, rho, prev, hi);
      for (std::size_t si = min_idx; si < seps.size(); ++si) {
        std::size_t m = seps[si];
        if (m <= prev) continue;
        if (witness(j.atoms[ai].parts[0], rho, prev, m - 1) &&
            place(ai + 1, m, si + 1))
          return true;
      }
      return false;
    };
    return place(0, lo, 0);
  }
};

}  // namespace

Verdict find_I_witness(const SystemPtr& s, const SboIdeal& pseudo,
                       const std::vector<Letter>& order, const Budget& budget) {
  if (!sbo_is_pseudo(pseudo))
    throw std::invalid_argument("find_I_witness: not a pseudo-ideal: " +
                                pseudo.str());
  WitnessCtx ctx{*s, order, budget};
  try {
    for (std::size_t t = 1; t <= budget.max_run_size; ++t) {
      ctx.runs = s->enumerate_runs(t);
      ctx.canons.clear();
      ctx.emb_cache.clear();
      for (const Run& r : ctx.runs) ctx.canons.push_back(s->canon(r));
      for (std::size_t rho = 0; rho < ctx.runs.size(); ++rho) {
        if (ctx.witness(pseudo, rho, 0, ctx.canons[rho].size())) {
          nlohmann::json cert{{"pseudo", pseudo.str()},
                              {"run", ctx.runs[rho]->serialize()},
                              {"stage", t}};
          return Verdict::pos(cert, ctx.steps);
        }
      }
    }
  } catch (const BudgetStop&) {
    return Verdict::exhausted(ctx.steps);
  }
  return Verdict::exhausted(ctx.steps);
}

// ---------------------------------------------------------------------------
// Ideal enumeration and the downward-closure driver.
// ---------------------------------------------------------------------------

namespace {

struct IdealGen {
  const std::vector<Letter>& order;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<SboIdeal>> memo;

  // All ideals of exactly the given size whose top rank is at most r.
  const std::vector<SboIdeal>& gen(std::size_t r, std::size_t size) {
    auto key = std::make_pair(r, size);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<SboIdeal> out;
    if (size >= 1) {
      for (std::size_t li = 0; li <= r; ++li) {
        if (size == 1) out.push_back(sbo_base_star(order[li]));
        if (li == 0 || size > 1)
          out.push_back(sbo_base_bounded(order[li], size - 1));
      }
      for (std::size_t a = 1; a <= r; ++a) {
        for (std::size_t tail_size = 0; tail_size < size; ++tail_size) {
          std::vector<SboIdeal> tails;
          if (tail_size == 0)
            tails.push_back(sbo_epsilon());
          else
            tails = gen(a - 1, tail_size);
          auto atom_lists = gen_atoms(a, size - tail_size);
          for (const auto& atoms : atom_lists)
            for (const SboIdeal& tl : tails)
              out.push_back(make_composite(order[a], atoms, tl));
        }
      }
    }
    out = InterCtx::dedup(std::move(out));
    return memo.emplace(key, std::move(out)).first->second;
  }

  // Nonempty atom lists at letter index a with the exact total size.
  std::vector<std::vector<SboAtom>> gen_atoms(std::size_t a, std::size_t size) {
    std::vector<std::vector<SboAtom>> out;
    if (size == 0) return out;
    for (std::size_t first = 1; first <= size; ++first) {
      std::vector<SboAtom> firsts;
      // Optional atom: one part of size first-1.
      if (first == 1) firsts.push_back(opt_atom(sbo_epsilon()));
      if (first >= 2)
        for (const SboIdeal& p : gen(a - 1, first - 1))
          firsts.push_back(opt_atom(p));
      // Star atom: distinct sorted union members totalling first-1.
      for (auto& parts : gen_part_sets(a - 1, first - 1))
        firsts.push_back(star_atom(std::move(parts)));
      std::vector<std::vector<SboAtom>> rests;
      if (first == size)
        rests.push_back({});
      else
        rests = gen_atoms(a, size - first);
      for (const SboAtom& f : firsts)
        for (const auto& rest : rests) {
          std::vector<SboAtom> lst{f};
          lst.insert(lst.end(), rest.begin(), rest.end());
          out.push_back(std::move(lst));
        }
    }
    return out;
  }

  // Nonempty str-increasing member lists with the exact total size (members
  // of size 0 means the single {ε} member).
  std::vector<std::vector<SboIdeal>> gen_part_sets(std::size_t r,
                                                   std::size_t size) {
    std::vector<std::vector<SboIdeal>> out;
    if (size == 0) {
      out.push_back({sbo_epsilon()});
      return out;
    }
    // Collect candidates of size ≤ size, sorted by string.
    std::vector<SboIdeal> pool;
    for (std::size_t s = 1; s <= size; ++s) {
      const auto& v = gen(r, s);
      pool.insert(pool.end(), v.begin(), v.end());
    }
    std::sort(pool.begin(), pool.end(),
              [](const SboIdeal& x, const SboIdeal& y) {
                return x.str() < y.str();
              });
    std::function<void(std::size_t, std::size_t, std::vector<SboIdeal>&)> rec =
        [&](std::size_t idx, std::size_t rem, std::vector<SboIdeal>& acc) {
          if (rem == 0) {
            if (!acc.empty()) out.push_back(acc);
            return;
          }
          for (std::size_t k = idx; k < pool.size(); ++k) {
            std::size_t sz = pool[k].size();
            if (sz > rem) continue;
            acc.push_back(pool[k]);
            rec(k + 1, rem - sz, acc);
            acc.pop_back();
          }
        };
    std::vector<SboIdeal> acc;
    rec(0, size, acc);
    return out;
  }
};

}  // namespace

std::vector<SboIdeal> enumerate_sbo_ideals(const std::vector<Letter>& order,
                                           std::size_t size) {
  IdealGen g{order, {}};
  return g.gen(order.size() - 1, size);
}

SboDcResult compute_sbo_dc(const SystemPtr& s, std::size_t d,
                           const Budget& budget) {
  std::vector<Letter> order = priority_alphabet(d);
  SystemPtr closed = s->transduce(sbo_transducer(order));

  // Sample yields of the closed system for the coverage pre-filter.
  std::vector<Word> samples;
  {
    std::set<std::string> seen;
    for (const Run& r : closed->enumerate_runs(budget.max_run_size)) {
      Word y = closed->yield_of(r);
      if (seen.insert(word_str(y)).second) samples.push_back(y);
    }
  }

  std::uint64_t steps = 0;
  IdealGen gen{order, {}};
  std::vector<SboIdeal> pool;
  std::vector<std::vector<bool>> masks;          // per pool ideal
  std::vector<std::optional<bool>> inclusion;    // cached J ⊆ L↓ verdicts
  std::size_t done = 0;

  auto ensure_pool = [&](std::size_t upto) {
    for (std::size_t sz = done + 1; sz <= upto; ++sz)
      for (const SboIdeal& i : gen.gen(order.size() - 1, sz)) {
        pool.push_back(i);
        std::vector<bool> mask;
        for (const Word& w : samples) mask.push_back(sbo_ideal_member(i, w));
        masks.push_back(std::move(mask));
        inclusion.emplace_back();
      }
    done = std::max(done, upto);
  };

  auto check_inclusion = [&](std::size_t idx) -> bool {
    if (inclusion[idx]) return *inclusion[idx];
    bool ok = true;
    try {
      SboReduction red = pseudoideal_reduction(pool[idx], order);
      SystemPtr sys = s;
      for (const Transducer& t : red.chain) sys = sys->transduce(t);
      sys = sys->transduce(sbo_transducer(red.order));
      for (const SboIdeal& p : red.pseudos) {
        Verdict v = find_I_witness(sys, p, red.order, budget);
        steps += v.steps_used;
        if (!v.positive()) {
          ok = false;
          break;
        }
      }
    } catch (const std::exception&) {
      ok = false;
    }
    inclusion[idx] = ok;
    return ok;
  };

  SboDcResult result;
  for (std::size_t total = 1; steps <= budget.max_steps; ++total) {
    ensure_pool(total);
    // Nondecreasing pool-index unions with the exact total size.
    std::vector<std::size_t> combo;
    std::function<const SboDcResult*(std::size_t, std::size_t)> rec =
        [&](std::size_t start, std::size_t rem) -> const SboDcResult* {
      if (steps > budget.max_steps) return nullptr;
      if (rem == 0) {
        if (combo.empty()) return nullptr;
        ++steps;
        std::vector<bool> cover(samples.size(), false);
        for (std::size_t idx : combo)
          for (std::size_t k = 0; k < samples.size(); ++k)
            if (masks[idx][k]) cover[k] = true;
        if (std::find(cover.begin(), cover.end(), false) != cover.end())
          return nullptr;
        for (std::size_t idx : combo)
          if (!check_inclusion(idx)) return nullptr;
        // Exact inclusion L↓ ⊆ D.
        Nfa dnfa = sbo_ideal_to_nfa(pool[combo[0]], order);
        for (std::size_t k = 1; k < combo.size(); ++k)
          dnfa = nfa_union(dnfa, sbo_ideal_to_nfa(pool[combo[k]], order));
        Verdict escape =
            intersect_regular(closed, nfa_complement(dnfa))->emptiness(budget);
        steps += escape.steps_used;
        if (!escape.negative()) return nullptr;
        result.ideals.clear();
        for (std::size_t idx : combo) result.ideals.push_back(pool[idx]);
        result.nfa = dnfa;
        nlohmann::json names = nlohmann::json::array();
        for (const SboIdeal& i : result.ideals) names.push_back(i.str());
        result.verdict = Verdict::pos({{"ideals", names}}, steps);
        return &result;
      }
      for (std::size_t k = start; k < pool.size(); ++k) {
        std::size_t sz = pool[k].size();
        if (sz == 0 || sz > rem) continue;
        combo.push_back(k);
        if (const SboDcResult* r = rec(k + 1, rem - sz)) return r;
        combo.pop_back();
        if (steps > budget.max_steps) return nullptr;
      }
      return nullptr;
    };
    if (const SboDcResult* r = rec(0, total)) return *r;
  }
  SboDcResult out;
  out.verdict = Verdict::exhausted(steps);
  out.nfa = nfa_empty(order);
  return out;
}

}  // namespace amalgam
