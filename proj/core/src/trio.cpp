// trio.cpp -- generic full-trio closure: systems decorated with coherent
// accepting transducer paths.
#include <algorithm>
#include <set>
#include <sstream>

#include "amalgam/transducer.hpp"

namespace amalgam {

namespace {

class TransducedRunData final : public RunData {
 public:
  Run base;
  std::vector<std::size_t> dec;  ///< transducer transition index per yield letter
  std::string initial_state;    ///< chosen initial transducer state
  std::string ser;
  std::string serialize() const override { return ser; }
  std::size_t size() const override { return base->size(); }
};

std::string make_ser(const Run& base, const std::string& q0,
                     const std::vector<std::size_t>& dec) {
  std::ostringstream os;
  os << base->serialize() << '|' << q0 << '|';
  for (std::size_t i = 0; i < dec.size(); ++i) {
    if (i) os << '.';
    os << dec[i];
  }
  return os.str();
}

class TransducedSystem final : public System {
 public:
  TransducedSystem(SystemPtr base, Transducer t)
      : base_(std::move(base)), t_(std::move(t)) {
    if (t_.has_boundary_outputs())
      throw std::invalid_argument(
          "generic transduced systems do not support initial/final outputs");
  }

  std::string id() const override { return base_->id() + "+T"; }
  std::vector<Letter> alphabet() const override { return t_.output_alphabet; }

  std::vector<Run> enumerate_runs(std::size_t max_size) const override {
    std::vector<Run> out;
    for (const Run& b : base_->enumerate_runs(max_size)) {
      Word y = base_->yield_of(b);
      decorate(b, y, out);
    }
    std::sort(out.begin(), out.end(), [](const Run& x, const Run& y) {
      if (x->size() != y->size()) return x->size() < y->size();
      return x->serialize() < y->serialize();
    });
    return out;
  }

  Decomposition canon(const Run& rho) const override {
    const auto& r = cast(rho);
    Decomposition base_canon = base_->canon(r.base);
    Decomposition out;
    std::size_t yi = 0;
    for (const Factor& fct : base_canon) {
      if (fct.empty()) {
        out.push_back("");
        continue;
      }
      const Word& ow = t_.transitions.at(r.dec.at(yi)).out;
      ++yi;
      if (ow.empty())
        out.push_back("");
      else
        for (const Letter& l : ow) out.push_back(l);
    }
    return out;
  }

  std::vector<MonotoneMap> admissible_embeddings(const Run& rho,
                                                 const Run& sigma) const override {
    const auto& r = cast(rho);
    const auto& s = cast(sigma);
    std::vector<MonotoneMap> out;
    for (const MonotoneMap& f : base_embeddings(r, s)) out.push_back(expand(r, s, f));
    std::sort(out.begin(), out.end(), [](const MonotoneMap& a, const MonotoneMap& b) {
      return a.image < b.image;
    });
    return out;
  }

  AmalgamResult amalgamate(const Run& rho0, const MonotoneMap& f, const Run& rho1,
                           const MonotoneMap& g, const Run& rho2,
                           std::size_t gap) const override {
    const auto& r0 = cast(rho0);
    const auto& r1 = cast(rho1);
    const auto& r2 = cast(rho2);
    MonotoneMap bf = contract(r0, r1, f);
    MonotoneMap bg = contract(r0, r2, g);
    // Map the expanded chosen gap to a base gap: gap k of the expanded
    // decomposition lies inside or at the boundary of a base block; the
    // base-level insertion point is the number of complete base blocks
    // before it. Gap words at the expanded level are concatenations of
    // full blocks, so the correspondence is exact.
    std::vector<std::size_t> w0 = widths(r0);
    std::size_t base_gap = 0, acc = 0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
      if (acc + w0[i] > gap) break;
      acc += w0[i];
      ++base_gap;
    }
    AmalgamResult base_res =
        base_->amalgamate(r0.base, bf, r1.base, bg, r2.base, base_gap);

    // Decorate rho3: positions in f'-image take rho1's decorations, the
    // rest are in g'-image and take rho2's.
    Decomposition c3 = base_->canon(base_res.rho3);
    std::vector<std::size_t> y3 = yield_positions(c3);
    Decomposition c1 = base_->canon(r1.base);
    Decomposition c2 = base_->canon(r2.base);
    std::vector<std::size_t> y1 = yield_positions(c1);
    std::vector<std::size_t> y2 = yield_positions(c2);
    auto yidx = [](const std::vector<std::size_t>& ys, std::size_t pos) {
      auto it = std::lower_bound(ys.begin(), ys.end(), pos);
      return (it != ys.end() && *it == pos)
                 ? static_cast<std::size_t>(it - ys.begin()) + 1
                 : std::size_t{0};
    };
    auto rd = std::make_shared<TransducedRunData>();
    rd->base = base_res.rho3;
    rd->initial_state = r1.initial_state;
    for (std::size_t pos : y3) {
      std::size_t p1 = preimage(base_res.f_prime, pos);
      if (p1) {
        rd->dec.push_back(r1.dec.at(yidx(y1, p1) - 1));
        continue;
      }
      std::size_t p2 = preimage(base_res.g_prime, pos);
      if (!p2)
        throw std::logic_error("amalgam position outside both embeddings");
      rd->dec.push_back(r2.dec.at(yidx(y2, p2) - 1));
    }
    rd->ser = make_ser(rd->base, rd->initial_state, rd->dec);

    AmalgamResult res;
    res.rho3 = rd;
    res.f_prime = expand(r1, *rd, base_res.f_prime);
    res.g_prime = expand(r2, *rd, base_res.g_prime);
    return res;
  }

  Verdict emptiness(const Budget& budget) const override {
    Verdict base_empty = base_->emptiness(budget);
    if (base_empty.negative())
      return Verdict::neg({{"reason", "base system empty"},
                           {"base", base_empty.certificate}});
    for (const Run& r : enumerate_runs(budget.max_run_size))
      return Verdict::pos({{"run", r->serialize()}});
    return Verdict::exhausted();
  }

  Run parse_run(const std::string& text) const override {
    auto p1 = text.find('|');
    auto p2 = text.rfind('|');
    if (p1 == std::string::npos || p2 == p1)
      throw std::invalid_argument("bad transduced run");
    auto rd = std::make_shared<TransducedRunData>();
    rd->base = base_->parse_run(text.substr(0, p1));
    rd->initial_state = text.substr(p1 + 1, p2 - p1 - 1);
    std::string rest = text.substr(p2 + 1);
    std::string cur;
    for (char c : rest) {
      if (c == '.') {
        if (!cur.empty()) rd->dec.push_back(std::stoul(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) rd->dec.push_back(std::stoul(cur));
    rd->ser = make_ser(rd->base, rd->initial_state, rd->dec);
    return rd;
  }

 private:
  static const TransducedRunData& cast(const Run& r) {
    auto* p = dynamic_cast<const TransducedRunData*>(r.get());
    if (!p) throw std::invalid_argument("run does not belong to this system");
    return *p;
  }

  /// Expanded block widths per base canon position.
  std::vector<std::size_t> widths(const TransducedRunData& r) const {
    Decomposition bc = base_->canon(r.base);
    std::vector<std::size_t> w;
    std::size_t yi = 0;
    for (const Factor& fct : bc) {
      if (fct.empty()) {
        w.push_back(1);
      } else {
        const Word& ow = t_.transitions.at(r.dec.at(yi++)).out;
        w.push_back(std::max<std::size_t>(1, ow.size()));
      }
    }
    return w;
  }

  /// Base embeddings respecting decoration equality pointwise.
  std::vector<MonotoneMap> base_embeddings(const TransducedRunData& r,
                                           const TransducedRunData& s) const {
    std::vector<MonotoneMap> out;
    if (r.initial_state != s.initial_state) return out;
    Decomposition cr = base_->canon(r.base), cs = base_->canon(s.base);
    std::vector<std::size_t> yr = yield_positions(cr), ys = yield_positions(cs);
    auto yidx = [](const std::vector<std::size_t>& v, std::size_t pos) {
      auto it = std::lower_bound(v.begin(), v.end(), pos);
      return (it != v.end() && *it == pos)
                 ? static_cast<std::size_t>(it - v.begin()) + 1
                 : std::size_t{0};
    };
    for (const MonotoneMap& f : base_->admissible_embeddings(r.base, s.base)) {
      bool ok = true;
      for (std::size_t i = 1; i <= f.domain_len() && ok; ++i) {
        std::size_t a = yidx(yr, i);
        if (!a) continue;
        std::size_t b = yidx(ys, f(i));
        if (!b || r.dec[a - 1] != s.dec[b - 1]) ok = false;
      }
      if (ok) out.push_back(f);
    }
    return out;
  }

  /// Lifts a base embedding to the expanded decompositions blockwise.
  MonotoneMap expand(const TransducedRunData& r, const TransducedRunData& s,
                     const MonotoneMap& f) const {
    std::vector<std::size_t> wr = widths(r), ws = widths(s);
    std::vector<std::size_t> sr(wr.size() + 1, 0), ss(ws.size() + 1, 0);
    for (std::size_t i = 0; i < wr.size(); ++i) sr[i + 1] = sr[i] + wr[i];
    for (std::size_t i = 0; i < ws.size(); ++i) ss[i + 1] = ss[i] + ws[i];
    MonotoneMap out;
    out.target_len = ss[ws.size()];
    for (std::size_t i = 1; i <= f.domain_len(); ++i) {
      std::size_t j = f(i);
      for (std::size_t k = 1; k <= wr[i - 1]; ++k)
        out.image.push_back(ss[j - 1] + k);
    }
    return out;
  }

  /// Inverse of expand: recovers the base embedding from block starts.
  MonotoneMap contract(const TransducedRunData& r, const TransducedRunData& s,
                       const MonotoneMap& f) const {
    std::vector<std::size_t> wr = widths(r), ws = widths(s);
    std::vector<std::size_t> sr(wr.size() + 1, 0), ss(ws.size() + 1, 0);
    for (std::size_t i = 0; i < wr.size(); ++i) sr[i + 1] = sr[i] + wr[i];
    for (std::size_t i = 0; i < ws.size(); ++i) ss[i + 1] = ss[i] + ws[i];
    MonotoneMap out;
    out.target_len = ws.size();
    for (std::size_t i = 0; i < wr.size(); ++i) {
      std::size_t img = f(sr[i] + 1);  // image of block i's first slot
      // Find the block of sigma whose first slot is img.
      auto it = std::lower_bound(ss.begin(), ss.end(), img - 1);
      if (it == ss.end() || *it != img - 1)
        throw std::invalid_argument("embedding not block-aligned");
      out.image.push_back(static_cast<std::size_t>(it - ss.begin()) + 1);
    }
    return out;
  }

  /// Enumerates coherent accepting decorations of a base run.
  void decorate(const Run& b, const Word& y, std::vector<Run>& out) const {
    std::function<void(const std::string&, std::size_t, std::vector<std::size_t>&,
                       const std::string&)>
        rec = [&](const std::string& q, std::size_t i, std::vector<std::size_t>& acc,
                  const std::string& q0) {
          if (i == y.size()) {
            if (std::find(t_.final_states.begin(), t_.final_states.end(), q) !=
                t_.final_states.end()) {
              auto rd = std::make_shared<TransducedRunData>();
              rd->base = b;
              rd->dec = acc;
              rd->initial_state = q0;
              rd->ser = make_ser(b, q0, acc);
              out.push_back(rd);
            }
            return;
          }
          for (std::size_t k = 0; k < t_.transitions.size(); ++k)
            if (t_.transitions[k].from == q && t_.transitions[k].in == y[i]) {
              acc.push_back(k);
              rec(t_.transitions[k].to, i + 1, acc, q0);
              acc.pop_back();
            }
        };
    for (const auto& q0 : t_.initial) {
      std::vector<std::size_t> acc;
      rec(q0, 0, acc, q0);
    }
  }

  SystemPtr base_;
  Transducer t_;
};

}  // namespace

SystemPtr make_transduced_system(SystemPtr base, const Transducer& t) {
  return std::make_shared<TransducedSystem>(std::move(base), t);
}

std::shared_ptr<const System> System::transduce(const Transducer& t) const {
  return make_transduced_system(shared_from_this(), t);
}

SystemPtr intersect_regular(SystemPtr base, const Nfa& a) {
  return base->transduce(filter_transducer(a));
}

}  // namespace amalgam
