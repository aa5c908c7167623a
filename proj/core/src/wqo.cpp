// wqo.cpp -- implementation of order primitives.
#include "amalgam/wqo.hpp"

#include <algorithm>

namespace amalgam {

Word decomposition_yield(const Decomposition& dec) {
  Word out;
  for (const Factor& f : dec)
    if (!f.empty()) out.push_back(f);
  return out;
}

std::string word_str(const Word& w) {
  bool multi = std::any_of(w.begin(), w.end(),
                           [](const Letter& l) { return l.size() > 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (multi && i) out += "\xc2\xb7";
    out += w[i];
  }
  return out;
}

bool MonotoneMap::strictly_monotone() const {
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] < 1 || image[i] > target_len) return false;
    if (i && image[i] <= image[i - 1]) return false;
  }
  return true;
}

MonotoneMap identity_map(std::size_t n) {
  MonotoneMap f;
  f.target_len = n;
  f.image.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.image[i] = i + 1;
  return f;
}

MonotoneMap compose_maps(const MonotoneMap& f, const MonotoneMap& g) {
  if (f.target_len != g.domain_len())
    throw std::invalid_argument("compose_maps: length mismatch");
  MonotoneMap h;
  h.target_len = g.target_len;
  h.image.reserve(f.domain_len());
  for (std::size_t i = 1; i <= f.domain_len(); ++i) h.image.push_back(g(f(i)));
  return h;
}

bool in_image(const MonotoneMap& f, std::size_t j) {
  return std::binary_search(f.image.begin(), f.image.end(), j);
}

std::size_t preimage(const MonotoneMap& f, std::size_t j) {
  auto it = std::lower_bound(f.image.begin(), f.image.end(), j);
  if (it == f.image.end() || *it != j) return 0;
  return static_cast<std::size_t>(it - f.image.begin()) + 1;
}

OrderedAlphabet OrderedAlphabet::equality(std::vector<Letter> elems) {
  OrderedAlphabet a;
  a.elements = std::move(elems);
  a.leq = [](const Letter& x, const Letter& y) { return x == y; };
  return a;
}

void OrderedAlphabet::validate() const {
  for (const Letter& x : elements)
    if (!leq(x, x)) throw std::invalid_argument("quasi-order not reflexive");
  for (const Letter& x : elements)
    for (const Letter& y : elements)
      for (const Letter& z : elements)
        if (leq(x, y) && leq(y, z) && !leq(x, z))
          throw std::invalid_argument("quasi-order not transitive");
}

std::vector<MonotoneMap> enumerate_embeddings_by_predicate(
    std::size_t n, std::size_t m,
    const std::function<bool(std::size_t, std::size_t)>& pos_leq) {
  std::vector<MonotoneMap> out;
  std::vector<std::size_t> img;
  img.reserve(n);
  // Depth-first search in lexicographic image order.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i,
                                                          std::size_t lo) {
    if (i > n) {
      out.push_back(MonotoneMap{img, m});
      return;
    }
    // Prune: remaining positions must fit.
    for (std::size_t j = lo; j + (n - i) <= m; ++j) {
      if (pos_leq(i, j)) {
        img.push_back(j);
        rec(i + 1, j + 1);
        img.pop_back();
      }
    }
  };
  rec(1, 1);
  return out;
}

std::vector<MonotoneMap> enumerate_word_embeddings(const Word& u, const Word& v,
                                                   const OrderedAlphabet& alpha) {
  return enumerate_embeddings_by_predicate(
      u.size(), v.size(),
      [&](std::size_t i, std::size_t j) { return alpha.leq(u[i - 1], v[j - 1]); });
}

bool word_embeds(const Word& u, const Word& v,
                 const std::function<bool(const Letter&, const Letter&)>& leq) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < v.size() && i < u.size(); ++j)
    if (leq(u[i], v[j])) ++i;
  return i == u.size();
}

bool tree_embeds_homeomorphic(const LabelledTree& t1, const LabelledTree& t2,
                              const OrderedAlphabet& alpha) {
  // t1 embeds at the root of t2: label condition plus a subsequence of
  // children each embedding the corresponding child of t1.
  std::function<bool(const LabelledTree&, const LabelledTree&)> at_root =
      [&](const LabelledTree& a, const LabelledTree& b) -> bool {
    if (!alpha.leq(a.label, b.label)) return false;
    // Greedy does not suffice for trees; use DP over child positions.
    std::size_t n = a.children.size(), m = b.children.size();
    if (n == 0) return true;
    if (n > m) return false;
    std::vector<std::vector<char>> dp(n + 1, std::vector<char>(m + 1, 0));
    for (std::size_t j = 0; j <= m; ++j) dp[0][j] = 1;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= m; ++j) {
        dp[i][j] = dp[i][j - 1];
        if (!dp[i][j] && dp[i - 1][j - 1] &&
            tree_embeds_homeomorphic(a.children[i - 1], b.children[j - 1], alpha))
          dp[i][j] = 1;
      }
    return dp[n][m] != 0;
  };
  if (at_root(t1, t2)) return true;
  for (const LabelledTree& c : t2.children)
    if (tree_embeds_homeomorphic(t1, c, alpha)) return true;
  return false;
}

}  // namespace amalgam
