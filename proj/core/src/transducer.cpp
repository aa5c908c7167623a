// transducer.cpp -- transducer parsing and the NFA product construction.
#include "amalgam/transducer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace amalgam {

bool Transducer::has_boundary_outputs() const {
  for (const auto& [q, w] : initial_output)
    if (!w.empty()) return true;
  for (const auto& [q, w] : final_output)
    if (!w.empty()) return true;
  return false;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

Word parse_out_word(const std::string& tok) {
  if (tok == "_") return {};
  Word w;
  if (tok.find(',') != std::string::npos) {
    std::string cur;
    for (char c : tok) {
      if (c == ',') {
        if (!cur.empty()) w.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) w.push_back(cur);
  } else {
    for (char c : tok) w.push_back(std::string(1, c));
  }
  return w;
}

void add_state(Transducer& t, const std::string& q) {
  if (std::find(t.states.begin(), t.states.end(), q) == t.states.end())
    t.states.push_back(q);
}

void note_letters(std::vector<Letter>& alpha, const Word& w) {
  for (const Letter& l : w)
    if (std::find(alpha.begin(), alpha.end(), l) == alpha.end()) alpha.push_back(l);
}

}  // namespace

Transducer parse_transducer(const std::string& text) {
  Transducer t;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("transducer parse error at line " +
                                  std::to_string(lineno) + ": missing ':'");
    std::string key = line.substr(0, colon);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::vector<std::string> toks = split_ws(line.substr(colon + 1));
    if (key == "initial") {
      for (auto& q : toks) { add_state(t, q); t.initial.push_back(q); }
    } else if (key == "final") {
      for (auto& q : toks) { add_state(t, q); t.final_states.push_back(q); }
    } else if (key == "trans") {
      // p a / xyz q
      if (toks.size() != 5 || toks[2] != "/")
        throw std::invalid_argument("transducer parse error at line " +
                                    std::to_string(lineno) +
                                    ": trans expects 'p a / out q'");
      add_state(t, toks[0]);
      add_state(t, toks[4]);
      Word out = parse_out_word(toks[3]);
      if (std::find(t.input_alphabet.begin(), t.input_alphabet.end(), toks[1]) ==
          t.input_alphabet.end())
        t.input_alphabet.push_back(toks[1]);
      note_letters(t.output_alphabet, out);
      t.transitions.push_back({toks[0], toks[1], out, toks[4]});
    } else if (key == "initout" || key == "finalout") {
      if (toks.size() < 1)
        throw std::invalid_argument("transducer parse error at line " +
                                    std::to_string(lineno));
      Word w = toks.size() >= 2 ? parse_out_word(toks[1]) : Word{};
      add_state(t, toks[0]);
      note_letters(t.output_alphabet, w);
      (key == "initout" ? t.initial_output : t.final_output)[toks[0]] = w;
    } else {
      throw std::invalid_argument("transducer parse error at line " +
                                  std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  return t;
}

std::string serialize_transducer(const Transducer& t) {
  std::ostringstream os;
  os << "initial:";
  for (const auto& q : t.initial) os << ' ' << q;
  os << "\nfinal:";
  for (const auto& q : t.final_states) os << ' ' << q;
  os << '\n';
  auto out_tok = [](const Word& w) {
    if (w.empty()) return std::string("_");
    bool multi = std::any_of(w.begin(), w.end(),
                             [](const Letter& l) { return l.size() > 1; });
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (multi && i) s += ',';
      s += w[i];
    }
    return s;
  };
  for (const auto& tr : t.transitions)
    os << "trans: " << tr.from << ' ' << tr.in << " / " << out_tok(tr.out) << ' '
       << tr.to << '\n';
  for (const auto& [q, w] : t.initial_output)
    os << "initout: " << q << ' ' << out_tok(w) << '\n';
  for (const auto& [q, w] : t.final_output)
    os << "finalout: " << q << ' ' << out_tok(w) << '\n';
  return os.str();
}

Transducer identity_transducer(std::vector<Letter> alphabet) {
  Transducer t;
  t.states = {"t0"};
  t.initial = {"t0"};
  t.final_states = {"t0"};
  t.input_alphabet = alphabet;
  t.output_alphabet = alphabet;
  for (const Letter& l : alphabet) t.transitions.push_back({"t0", l, {l}, "t0"});
  return t;
}

Transducer filter_transducer(const Nfa& a) {
  Nfa d = a;
  for (const NfaTransition& tr : a.transitions)
    if (tr.label.empty()) { d = nfa_determinize(a); break; }
  Transducer t;
  t.states = d.states;
  t.initial = d.initial;
  t.final_states = d.final_states;
  t.input_alphabet = d.alphabet;
  t.output_alphabet = d.alphabet;
  for (const NfaTransition& tr : d.transitions)
    t.transitions.push_back({tr.from, tr.label, {tr.label}, tr.to});
  return t;
}

std::vector<Word> transducer_images(const Transducer& t, const Word& w) {
  std::set<Word> out;
  // (state, position) search accumulating outputs.
  std::function<void(const std::string&, std::size_t, Word&)> rec =
      [&](const std::string& q, std::size_t i, Word& acc) {
        if (i == w.size()) {
          if (std::find(t.final_states.begin(), t.final_states.end(), q) !=
              t.final_states.end()) {
            Word full = acc;
            auto it = t.final_output.find(q);
            if (it != t.final_output.end())
              full.insert(full.end(), it->second.begin(), it->second.end());
            out.insert(full);
          }
          return;
        }
        for (const auto& tr : t.transitions)
          if (tr.from == q && tr.in == w[i]) {
            std::size_t before = acc.size();
            acc.insert(acc.end(), tr.out.begin(), tr.out.end());
            rec(tr.to, i + 1, acc);
            acc.resize(before);
          }
      };
  for (const auto& q0 : t.initial) {
    Word acc;
    auto it = t.initial_output.find(q0);
    if (it != t.initial_output.end()) acc = it->second;
    rec(q0, 0, acc);
  }
  return {out.begin(), out.end()};
}

Nfa apply_to_nfa(const Nfa& a, const Transducer& t) {
  Nfa r;
  r.alphabet = t.output_alphabet;
  if (r.alphabet.empty()) r.alphabet = a.alphabet;
  auto name = [](const std::string& q, const std::string& p) {
    return q + "|" + p;
  };
  std::size_t fresh = 0;
  auto chain = [&](const std::string& from, const Word& out, const std::string& to,
                   Nfa& n) {
    // Adds a path from..to labelled by 'out' (ε edge when empty).
    if (out.empty()) {
      n.transitions.push_back({from, "", to});
      return;
    }
    std::string cur = from;
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::string nxt = (i + 1 == out.size()) ? to : "c" + std::to_string(fresh++);
      if (nxt != to && !n.has_state(nxt)) n.states.push_back(nxt);
      n.transitions.push_back({cur, out[i], nxt});
      cur = nxt;
    }
  };
  for (const auto& q : a.states)
    for (const auto& p : t.states) r.states.push_back(name(q, p));
  // Initial: fresh start per (initial a-state, initial t-state) handling
  // initial outputs.
  std::string start = "start";
  r.states.push_back(start);
  r.initial = {start};
  for (const auto& q : a.initial)
    for (const auto& p : t.initial) {
      Word w;
      auto it = t.initial_output.find(p);
      if (it != t.initial_output.end()) w = it->second;
      chain(start, w, name(q, p), r);
    }
  std::string end = "end";
  r.states.push_back(end);
  r.final_states = {end};
  for (const auto& q : a.final_states)
    for (const auto& p : t.final_states) {
      Word w;
      auto it = t.final_output.find(p);
      if (it != t.final_output.end()) w = it->second;
      chain(name(q, p), w, end, r);
    }
  for (const NfaTransition& ta : a.transitions) {
    if (ta.label.empty()) {
      // ε input: transducer state unchanged.
      for (const auto& p : t.states)
        r.transitions.push_back({name(ta.from, p), "", name(ta.to, p)});
    } else {
      for (const auto& tt : t.transitions)
        if (tt.in == ta.label)
          chain(name(ta.from, tt.from), tt.out, name(ta.to, tt.to), r);
    }
  }
  return r;
}

}  // namespace amalgam
