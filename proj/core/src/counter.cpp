#include "amalgam/counter.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace amalgam {

std::vector<long> effect(const UnitUpdateWord& w, std::size_t dim) {
  std::vector<long> e(dim, 0);
  for (int u : w) {
    if (u > 0) ++e[static_cast<std::size_t>(u) - 1];
    else if (u < 0) --e[static_cast<std::size_t>(-u) - 1];
  }
  return e;
}

bool nd_member(const UnitUpdateWord& w, std::size_t dim) {
  std::vector<long> e(dim, 0);
  for (int u : w) {
    if (u > 0) ++e[static_cast<std::size_t>(u) - 1];
    else if (u < 0) {
      long& c = e[static_cast<std::size_t>(-u) - 1];
      if (--c < 0) return false;
    }
  }
  return std::all_of(e.begin(), e.end(), [](long c) { return c == 0; });
}

UnitUpdateWord TameMorphism::apply(const Word& w) const {
  UnitUpdateWord out;
  for (const auto& a : w) {
    auto it = images.find(a);
    if (it == images.end())
      throw std::invalid_argument("effect morphism is undefined on: " + a);
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

bool is_tame(const TameMorphism& eta) {
  for (const auto& [a, w] : eta.images) {
    for (std::size_t i = 1; i <= eta.dim; ++i) {
      bool seen_dec = false;
      for (int u : w) {
        if (u == -static_cast<int>(i)) seen_dec = true;
        if (u == static_cast<int>(i) && seen_dec) return false;
      }
    }
    for (int u : w)
      if (u > static_cast<int>(eta.dim) || u < -static_cast<int>(eta.dim))
        return false;
  }
  return true;
}

namespace {

using Vec = std::vector<long>;
using Pair = std::pair<Vec, Vec>;

std::string vec_str(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

Vec vec_add(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

bool vec_leq(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

class CounterRunData final : public RunData {
 public:
  Run base;
  std::vector<Pair> pairs;  // one per yield position
  std::string ser;

  std::string serialize() const override { return ser; }
  std::size_t size() const override { return base->size(); }
};

const CounterRunData& as_counter(const Run& r) {
  auto* p = dynamic_cast<const CounterRunData*>(r.get());
  if (!p) throw std::invalid_argument("expected a counter-decorated run");
  return *p;
}

// Map on yield positions induced by a factor-preserving canon embedding.
std::vector<std::size_t> yield_map(const MonotoneMap& f,
                                   const Decomposition& src,
                                   const Decomposition& dst) {
  std::vector<std::size_t> ys = yield_positions(src);
  std::vector<std::size_t> yd = yield_positions(dst);
  std::vector<std::size_t> m;  // 1-based indices into dst's yield
  for (std::size_t p : ys) {
    std::size_t img = f(p);
    auto it = std::lower_bound(yd.begin(), yd.end(), img);
    if (it == yd.end() || *it != img)
      throw std::logic_error("embedding maps a yield position to padding");
    m.push_back(static_cast<std::size_t>(it - yd.begin()) + 1);
  }
  return m;
}

class CounterSystem final : public System {
 public:
  CounterSystem(SystemPtr base, TameMorphism eta, AlphabeticMorphism alpha,
                std::string name)
      : base_(std::move(base)), eta_(std::move(eta)), alpha_(std::move(alpha)),
        name_(std::move(name)) {
    if (!is_tame(eta_))
      throw std::invalid_argument("effect morphism is not tame");
    for (const auto& [a, img] : alpha_)
      if (img.empty() ? false : img.find(' ') != std::string::npos)
        throw std::invalid_argument("relabeling must be alphabetic");
  }

  std::string id() const override { return name_; }

  std::vector<Letter> alphabet() const override {
    std::vector<Letter> out;
    for (const auto& [a, img] : alpha_)
      if (!img.empty() &&
          std::find(out.begin(), out.end(), img) == out.end())
        out.push_back(img);
    std::sort(out.begin(), out.end());
    return out;
  }

  // The coherent decoration of a base run is unique: counters start at zero
  // and follow the effect morphism along the yield.  A run is accepting
  // exactly when all intermediate values are nonnegative and the final
  // value is zero.
  std::optional<std::vector<Pair>> decorate(const Run& base_run) const {
    Word y = base_->yield_of(base_run);
    std::vector<Pair> pairs;
    Vec cur(eta_.dim, 0);
    for (const auto& a : y) {
      auto it = eta_.images.find(a);
      if (it == eta_.images.end()) return std::nullopt;
      if (!nd_prefix_ok(cur, it->second)) return std::nullopt;
      Vec nxt = vec_add(cur, effect(it->second, eta_.dim));
      pairs.push_back({cur, nxt});
      cur = nxt;
    }
    if (!std::all_of(cur.begin(), cur.end(), [](long c) { return c == 0; }))
      return std::nullopt;
    return pairs;
  }

  Run wrap(const Run& base_run, std::vector<Pair> pairs) const {
    auto r = std::make_shared<CounterRunData>();
    r->base = base_run;
    r->pairs = std::move(pairs);
    std::string dec;
    for (std::size_t i = 0; i < r->pairs.size(); ++i) {
      if (i) dec += ";";
      dec += vec_str(r->pairs[i].first) + "/" + vec_str(r->pairs[i].second);
    }
    r->ser = base_run->serialize() + "|" + dec;
    return r;
  }

  std::vector<Run> enumerate_runs(std::size_t max_size) const override {
    std::vector<Run> out;
    for (const auto& b : base_->enumerate_runs(max_size))
      if (auto d = decorate(b)) out.push_back(wrap(b, std::move(*d)));
    return out;
  }

  Decomposition canon(const Run& rho) const override {
    Decomposition base_dec = base_->canon(as_counter(rho).base);
    Decomposition out;
    for (const auto& f : base_dec) {
      if (f.empty()) {
        out.push_back("");
        continue;
      }
      auto it = alpha_.find(f);
      if (it == alpha_.end())
        throw std::invalid_argument("relabeling is undefined on: " + f);
      out.push_back(it->second);
    }
    return out;
  }

  std::vector<MonotoneMap> admissible_embeddings(const Run& rho,
                                                 const Run& sigma) const override {
    const auto& a = as_counter(rho);
    const auto& b = as_counter(sigma);
    Decomposition da = base_->canon(a.base);
    Decomposition db = base_->canon(b.base);
    std::vector<MonotoneMap> out;
    for (const auto& f : base_->admissible_embeddings(a.base, b.base)) {
      std::vector<std::size_t> ym = yield_map(f, da, db);
      bool ok = true;
      for (std::size_t i = 0; i < ym.size(); ++i) {
        const Pair& pa = a.pairs[i];
        const Pair& pb = b.pairs[ym[i] - 1];
        if (!vec_leq(pa.first, pb.first) || !vec_leq(pa.second, pb.second)) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(f);
    }
    return out;
  }

  AmalgamResult amalgamate(const Run& rho0, const MonotoneMap& f,
                           const Run& rho1, const MonotoneMap& g,
                           const Run& rho2, std::size_t gap) const override {
    const auto& r0 = as_counter(rho0);
    const auto& r1 = as_counter(rho1);
    const auto& r2 = as_counter(rho2);
    AmalgamResult base =
        base_->amalgamate(r0.base, f, r1.base, g, r2.base, gap);
    Decomposition d0 = base_->canon(r0.base);
    Decomposition d1 = base_->canon(r1.base);
    Decomposition d2 = base_->canon(r2.base);
    Decomposition d3 = base_->canon(base.rho3);
    MonotoneMap h = compose_maps(f, base.f_prime);
    std::vector<std::size_t> fy = yield_map(f, d0, d1);
    std::vector<std::size_t> gy = yield_map(g, d0, d2);
    std::vector<std::size_t> fpy = yield_map(base.f_prime, d1, d3);
    std::vector<std::size_t> gpy = yield_map(base.g_prime, d2, d3);
    std::vector<std::size_t> hy = yield_map(h, d0, d3);
    std::size_t n = hy.size();
    Vec zero(eta_.dim, 0);
    // Displacements of the two contexts at each base yield position; the
    // border conventions c_0 = d_0 = c_{n+1} = d_{n+1} = 0 hold because all
    // three runs are accepting.
    std::vector<Vec> c(n + 2, zero), d(n + 2, zero);
    for (std::size_t i = 1; i <= n; ++i) {
      c[i] = vec_sub(r1.pairs[fy[i - 1] - 1].first, r0.pairs[i - 1].first);
      d[i] = vec_sub(r2.pairs[gy[i - 1] - 1].first, r0.pairs[i - 1].first);
    }
    auto gap_index = [](const std::vector<std::size_t>& ym, std::size_t j) {
      std::size_t i = 0;
      while (i < ym.size() && ym[i] < j) ++i;
      return i;  // j lies in gap i of the embedding
    };
    std::size_t m = yield_positions(d3).size();
    std::vector<Pair> pairs(m, {zero, zero});
    std::vector<bool> set(m, false);
    for (std::size_t i = 1; i <= n; ++i) {
      Vec off = vec_add(c[i], d[i]);
      pairs[hy[i - 1] - 1] = {vec_add(r0.pairs[i - 1].first, off),
                              vec_add(r0.pairs[i - 1].second, off)};
      set[hy[i - 1] - 1] = true;
    }
    for (std::size_t j = 1; j <= fpy.size(); ++j) {
      std::size_t k = fpy[j - 1];
      if (set[k - 1]) continue;
      std::size_t i = gap_index(fy, j);
      pairs[k - 1] = {vec_add(r1.pairs[j - 1].first, d[i]),
                      vec_add(r1.pairs[j - 1].second, d[i])};
      set[k - 1] = true;
    }
    for (std::size_t j = 1; j <= gpy.size(); ++j) {
      std::size_t k = gpy[j - 1];
      if (set[k - 1]) continue;
      std::size_t i = gap_index(gy, j);
      pairs[k - 1] = {vec_add(r2.pairs[j - 1].first, c[i + 1]),
                      vec_add(r2.pairs[j - 1].second, c[i + 1])};
      set[k - 1] = true;
    }
    for (bool s : set)
      if (!s) throw std::logic_error("amalgam yield position not decorated");
    // Safety net: the coherent decoration of a run is unique, so the
    // recipe above must reproduce it.
    auto expect = decorate(base.rho3);
    if (!expect || *expect != pairs)
      throw std::logic_error("amalgam decoration is not accepting");
    AmalgamResult out;
    out.rho3 = wrap(base.rho3, std::move(pairs));
    out.f_prime = base.f_prime;
    out.g_prime = base.g_prime;
    return out;
  }

  Verdict emptiness(const Budget& budget) const override {
    Verdict base = base_->emptiness(budget);
    if (base.value == VerdictValue::Negative) {
      nlohmann::json cert;
      cert["reason"] = "base system is empty";
      cert["base"] = base.certificate;
      return Verdict::neg(cert, base.steps_used);
    }
    std::uint64_t steps = base.steps_used;
    for (std::size_t s = 1; s <= budget.max_run_size; ++s) {
      auto runs = enumerate_runs(s);
      steps += runs.size() + 1;
      if (!runs.empty()) {
        nlohmann::json cert;
        cert["run"] = runs.front()->serialize();
        cert["yield"] = word_str(yield_of(runs.front()));
        return Verdict::pos(cert, steps);
      }
      if (steps > budget.max_steps) break;
    }
    return Verdict::exhausted(steps);
  }

  Run parse_run(const std::string& text) const override {
    auto bar = text.rfind('|');
    if (bar == std::string::npos)
      throw std::invalid_argument("malformed counter run: " + text);
    Run base_run = base_->parse_run(text.substr(0, bar));
    std::string dec = text.substr(bar + 1);
    std::vector<Pair> pairs;
    if (!dec.empty()) {
      std::istringstream in(dec);
      std::string item;
      while (std::getline(in, item, ';')) {
        auto slash = item.find('/');
        if (slash == std::string::npos)
          throw std::invalid_argument("malformed decoration: " + item);
        auto parse_vec = [&](const std::string& s) {
          Vec v;
          std::istringstream vs(s);
          std::string tok;
          while (std::getline(vs, tok, ',')) v.push_back(std::stol(tok));
          if (v.size() != eta_.dim)
            throw std::invalid_argument("decoration dimension mismatch");
          return v;
        };
        pairs.push_back({parse_vec(item.substr(0, slash)),
                         parse_vec(item.substr(slash + 1))});
      }
    }
    auto expect = decorate(base_run);
    if (!expect || *expect != pairs)
      throw std::invalid_argument("decoration is not accepting for this run");
    return wrap(base_run, std::move(pairs));
  }

 private:
  static bool nd_prefix_ok(const Vec& start, const UnitUpdateWord& w) {
    Vec cur = start;
    for (int u : w) {
      if (u > 0) ++cur[static_cast<std::size_t>(u) - 1];
      else if (u < 0) {
        long& x = cur[static_cast<std::size_t>(-u) - 1];
        if (--x < 0) return false;
      }
    }
    return true;
  }

  SystemPtr base_;
  TameMorphism eta_;
  AlphabeticMorphism alpha_;
  std::string name_;
};

}  // namespace

SystemPtr build_counter_extension(const SystemPtr& base,
                                  const TameMorphism& eta,
                                  const AlphabeticMorphism& alpha,
                                  const std::string& name) {
  return std::make_shared<CounterSystem>(base, eta, alpha, name);
}

CounterDescriptor parse_counter_descriptor(
    const std::string& text,
    const std::function<SystemPtr(const std::string&)>& loader) {
  CounterDescriptor d;
  bool have_dim = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::string, std::string>> etas, alphas;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& msg) {
      throw std::invalid_argument("descriptor line " + std::to_string(lineno) +
                                  ": " + msg);
    };
    if (key == "base:") {
      std::string ref;
      if (!(ls >> ref) || ref.empty() || ref[0] != '@') fail("expected @file");
      d.base = loader(ref.substr(1));
    } else if (key == "dim:") {
      if (!(ls >> d.eta.dim)) fail("expected a dimension");
      have_dim = true;
    } else if (key == "eta:" || key == "alpha:") {
      std::string a, arrow, rest;
      if (!(ls >> a >> arrow) || arrow != "->") fail("expected 'a -> ...'");
      std::getline(ls, rest);
      (key == "eta:" ? etas : alphas).push_back({a, rest});
    } else {
      fail("unknown key " + key);
    }
  }
  if (!d.base) throw std::invalid_argument("descriptor is missing base:");
  if (!have_dim) throw std::invalid_argument("descriptor is missing dim:");
  for (const auto& [a, rest] : etas) {
    UnitUpdateWord w;
    std::istringstream rs(rest);
    std::string tok;
    while (rs >> tok) {
      if (tok == "_") continue;
      w.push_back(std::stoi(tok));
    }
    d.eta.images[a] = w;
  }
  for (const auto& [a, rest] : alphas) {
    std::istringstream rs(rest);
    std::string tok;
    if (!(rs >> tok)) tok = "_";
    d.alpha[a] = tok == "_" ? "" : tok;
  }
  // Defaults: letters without an eta line carry no updates; letters without
  // an alpha line keep their name.
  for (const auto& a : d.base->alphabet()) {
    if (!d.eta.images.count(a)) d.eta.images[a] = {};
    if (!d.alpha.count(a)) d.alpha[a] = a;
  }
  if (!is_tame(d.eta))
    throw std::invalid_argument("descriptor effect morphism is not tame");
  return d;
}

}  // namespace amalgam
