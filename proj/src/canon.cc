#include "atlas/canon.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <optional>

#include "atlas/perm_group.hpp"

namespace atlas {

ColoredGraph::ColoredGraph(std::vector<std::uint32_t> colors,
                           std::span<const std::pair<std::uint32_t, std::uint32_t>> edges)
    : colors_(std::move(colors)) {
  const std::size_t n = colors_.size();
  std::vector<std::size_t> degree(n, 0);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw Error("edge endpoint out of range");
    if (a == b) throw Error("loops are not supported");
    ++degree[a];
    ++degree[b];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [a, b] : edges) {
    targets_[fill[a]++] = b;
    targets_[fill[b]++] = a;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) throw Error("repeated edge");
  }
}

bool ColoredGraph::adjacent(std::uint32_t a, std::uint32_t b) const {
  auto nb = neighbours(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

ColoredGraph ColoredGraph::relabeled(const Permutation& perm) const {
  const std::size_t n = order();
  if (perm.degree() != n) throw Error("relabeling of the wrong degree");
  std::vector<std::uint32_t> colors(n);
  for (std::uint32_t v = 0; v < n; ++v) colors[perm[v]] = colors_[v];
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t u : neighbours(v))
      if (v < u) edges.emplace_back(perm[v], perm[u]);
  return ColoredGraph(std::move(colors), edges);
}

ColoredGraph encode_design(const IncidenceStructure& design) {
  std::vector<std::uint32_t> colors(design.v, 0);
  colors.resize(design.v + design.b(), 1);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < design.b(); ++i)
    design.blocks[i].for_each([&](Point p) { edges.emplace_back(p, static_cast<std::uint32_t>(design.v + i)); });
  return ColoredGraph(std::move(colors), edges);
}

ColoredGraph encode_graph(const UGraph& graph) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t a = 0; a < graph.order(); ++a)
    for (std::size_t b : graph.neighbours(a))
      if (a < b) edges.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  return ColoredGraph(std::vector<std::uint32_t>(graph.order(), 0), edges);
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string CanonicalForm::digest() const { return sha256_hex(bytes); }

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

void mix(u64& h, u64 x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdull;
}

/// Ordered partition of the vertices; cells are contiguous ranges of `lab`
/// and are named by their first position.
struct Partition {
  std::vector<u32> lab;   // position -> vertex
  std::vector<u32> pos;   // vertex -> position
  std::vector<u32> cell;  // vertex -> start of its cell
  std::vector<u32> len;   // cell start -> cell length
  u32 cells = 0;
};

class Refiner {
 public:
  explicit Refiner(const ColoredGraph& g)
      : g_(g), count_(g.order(), 0), queued_(g.order(), 0), marked_(g.order(), 0), hits_(g.order(), 0) {}

  /// Equitable refinement driven by the given splitter cells. Returns a hash
  /// of the splitting trace, which depends only on labelling-invariant data.
  u64 refine(Partition& p, std::span<const u32> splitters) {
    const std::size_t n = g_.order();
    u64 h = 0xcbf29ce484222325ull;
    std::deque<u32> queue;
    for (u32 s : splitters) {
      queue.push_back(s);
      queued_[s] = 1;
    }
    while (!queue.empty() && p.cells < n) {
      const u32 s = queue.front();
      queue.pop_front();
      queued_[s] = 0;
      const u32 length = p.len[s];
      touched_.clear();
      cells_.clear();
      for (u32 i = s; i < s + length; ++i)
        for (u32 u : g_.neighbours(p.lab[i]))
          if (count_[u]++ == 0) touched_.push_back(u);
      for (u32 u : touched_) {
        const u32 c = p.cell[u];
        if (!marked_[c]) {
          marked_[c] = 1;
          cells_.push_back(c);
        }
        ++hits_[c];
      }
      std::sort(cells_.begin(), cells_.end());
      mix(h, (u64{s} << 32) | touched_.size());
      for (u32 c : cells_) {
        marked_[c] = 0;
        const u32 hits = hits_[c];
        hits_[c] = 0;
        split(p, c, hits, queue, h);
      }
      for (u32 u : touched_) count_[u] = 0;
    }
    for (u32 s : queue) queued_[s] = 0;
    mix(h, p.cells);
    return h;
  }

 private:
  void split(Partition& p, u32 c, u32 hits, std::deque<u32>& queue, u64& h) {
    const u32 length = p.len[c];
    if (length == 1) return;
    auto first = p.lab.begin() + c;
    auto last = first + length;
    if (hits == length) {
      const u32 k = count_[*first];
      if (std::all_of(first, last, [&](u32 v) { return count_[v] == k; })) return;
    }
    std::sort(first, last, [&](u32 a, u32 b) { return count_[a] < count_[b]; });
    fragments_.clear();
    u32 start = c;
    for (u32 i = c; i < c + length; ++i) {
      const u32 v = p.lab[i];
      p.pos[v] = i;
      if (i > c && count_[v] != count_[p.lab[i - 1]]) {
        fragments_.push_back(start);
        start = i;
      }
    }
    fragments_.push_back(start);
    u32 largest = fragments_.front(), largest_len = 0;
    for (std::size_t f = 0; f < fragments_.size(); ++f) {
      const u32 a = fragments_[f];
      const u32 b = f + 1 < fragments_.size() ? fragments_[f + 1] : c + length;
      p.len[a] = b - a;
      for (u32 i = a; i < b; ++i) p.cell[p.lab[i]] = a;
      mix(h, (u64{a} << 40) ^ (u64{b - a} << 20) ^ count_[p.lab[a]]);
      if (b - a > largest_len) {
        largest = a;
        largest_len = b - a;
      }
    }
    p.cells += static_cast<u32>(fragments_.size() - 1);
    const bool was_queued = queued_[c];
    for (u32 a : fragments_) {
      if (queued_[a]) continue;
      if (!was_queued && a == largest) continue;
      queued_[a] = 1;
      queue.push_back(a);
    }
  }

  const ColoredGraph& g_;
  std::vector<u32> count_;
  std::vector<std::uint8_t> queued_;
  std::vector<std::uint8_t> marked_;
  std::vector<u32> hits_;
  std::vector<u32> touched_;
  std::vector<u32> cells_;
  std::vector<u32> fragments_;
};

u32 individualize(Partition& p, u32 v) {
  const u32 s = p.cell[v];
  const u32 length = p.len[s];
  const u32 i = p.pos[v];
  const u32 w = p.lab[s];
  std::swap(p.lab[s], p.lab[i]);
  p.pos[v] = s;
  p.pos[w] = i;
  p.len[s] = 1;
  p.len[s + 1] = length - 1;
  for (u32 j = s + 1; j < s + length; ++j) p.cell[p.lab[j]] = s + 1;
  ++p.cells;
  return s;
}

struct UnionFind {
  std::vector<u32> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  u32 find(u32 x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(u32 a, u32 b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

class Search {
 public:
  Search(const ColoredGraph& g, const CanonOptions& options) : g_(g), refiner_(g), options_(options) {}

  CanonicalForm run() {
    const std::size_t n = g_.order();
    Partition p;
    p.lab.resize(n);
    p.pos.resize(n);
    p.cell.resize(n);
    p.len.assign(n, 0);
    std::iota(p.lab.begin(), p.lab.end(), 0u);
    std::stable_sort(p.lab.begin(), p.lab.end(), [&](u32 a, u32 b) { return g_.colors()[a] < g_.colors()[b]; });
    std::vector<u32> starts;
    for (u32 i = 0; i < n; ++i) {
      p.pos[p.lab[i]] = i;
      if (i == 0 || g_.colors()[p.lab[i]] != g_.colors()[p.lab[i - 1]]) {
        starts.push_back(i);
        ++p.cells;
      }
      p.cell[p.lab[i]] = starts.back();
      ++p.len[starts.back()];
    }
    std::vector<u64> trace;
    if (n > 0) {
      trace.push_back(refiner_.refine(p, starts));
      dfs(p, trace, 0, true);
    }

    CanonicalForm out;
    out.nodes = nodes_;
    out.generators = generators_;
    out.labeling.assign(n, 0);
    for (u32 i = 0; i < n; ++i) out.labeling[best_.lab[i]] = i;
    out.bytes = encode(best_);
    out.aut_order = 1;
    for (std::size_t level = 0; level < first_path_.size(); ++level) {
      UnionFind uf = orbits_fixing(level);
      const u32 root = uf.find(first_path_[level]);
      std::uint64_t size = 0;
      for (u32 v = 0; v < n; ++v) size += uf.find(v) == root;
      out.aut_order *= size;
    }
    return out;
  }

 private:
  struct Leaf {
    std::vector<u64> trace;
    std::vector<u32> lab;
    std::vector<u64> form;
  };
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<u64> form_of(const std::vector<u32>& lab) const {
    std::vector<u32> pos(lab.size());
    for (u32 i = 0; i < lab.size(); ++i) pos[lab[i]] = i;
    std::vector<u64> edges;
    edges.reserve(g_.edge_count());
    for (u32 v = 0; v < g_.order(); ++v)
      for (u32 u : g_.neighbours(v))
        if (v < u) {
          const u64 a = pos[v], b = pos[u];
          edges.push_back(a < b ? (a << 32) | b : (b << 32) | a);
        }
    std::sort(edges.begin(), edges.end());
    return edges;
  }

  std::vector<std::uint8_t> encode(const Leaf& leaf) const {
    std::vector<std::uint8_t> bytes;
    auto put = [&](u32 x) {
      for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    };
    put(static_cast<u32>(g_.order()));
    // Colour of each canonical position, run-length encoded.
    for (std::size_t i = 0; i < leaf.lab.size();) {
      std::size_t j = i;
      const u32 c = g_.colors()[leaf.lab[i]];
      while (j < leaf.lab.size() && g_.colors()[leaf.lab[j]] == c) ++j;
      put(c);
      put(static_cast<u32>(j - i));
      i = j;
    }
    put(static_cast<u32>(leaf.form.size()));
    for (u64 e : leaf.form) {
      put(static_cast<u32>(e >> 32));
      put(static_cast<u32>(e));
    }
    return bytes;
  }

  static int compare(const std::vector<u64>& a, const std::vector<u64>& b) {
    if (a == b) return 0;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()) ? -1 : 1;
  }

  /// Compares a partial trace with the first len(trace) entries of `full`.
  static int compare_prefix(const std::vector<u64>& trace, const std::vector<u64>& full) {
    const std::size_t m = std::min(trace.size(), full.size());
    for (std::size_t i = 0; i < m; ++i)
      if (trace[i] != full[i]) return trace[i] < full[i] ? -1 : 1;
    return trace.size() > full.size() ? 1 : 0;
  }

  UnionFind orbits_fixing(std::size_t level) const {
    UnionFind uf(g_.order());
    for (const auto& gen : generators_) {
      bool fixes = true;
      for (std::size_t i = 0; i < level && fixes; ++i) fixes = gen[first_path_[i]] == first_path_[i];
      if (!fixes) continue;
      for (u32 v = 0; v < g_.order(); ++v) uf.unite(v, gen[v]);
    }
    return uf;
  }

  void add_generator(const std::vector<u32>& from, const std::vector<u32>& to) {
    std::vector<Point> images(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) images[from[i]] = to[i];
    Permutation gen = Permutation::from_images(std::move(images));
    if (!gen.is_identity()) generators_.push_back(std::move(gen));
  }

  std::size_t leaf(const Partition& p, const std::vector<u64>& trace) {
    Leaf l{trace, p.lab, form_of(p.lab)};
    if (!have_first_) {
      have_first_ = true;
      first_path_ = path_;
      first_ = l;
      best_ = std::move(l);
      return kNone;
    }
    if (l.trace == first_.trace && l.form == first_.form) {
      add_generator(first_.lab, l.lab);
      std::size_t common = 0;
      while (common < path_.size() && common < first_path_.size() && path_[common] == first_path_[common]) ++common;
      return common;
    }
    int c = compare(l.trace, best_.trace);
    if (c == 0) c = compare(l.form, best_.form);
    if (c == 0) {
      add_generator(best_.lab, l.lab);
    } else if (c > 0) {
      best_ = std::move(l);
    }
    return kNone;
  }

  std::size_t dfs(const Partition& p, std::vector<u64>& trace, std::size_t level, bool on_first) {
    if (++nodes_ > options_.max_nodes)
      throw BudgetExceeded("canonization exceeded " + std::to_string(options_.max_nodes) + " nodes at depth " +
                           std::to_string(level) + " with " + std::to_string(p.cells) + " of " +
                           std::to_string(g_.order()) + " cells");
    if (p.cells == g_.order()) return leaf(p, trace);

    // First smallest non-singleton cell.
    u32 target = 0, target_len = 0;
    for (u32 i = 0; i < g_.order(); i += p.len[i])
      if (p.len[i] > 1 && (target_len == 0 || p.len[i] < target_len)) {
        target = i;
        target_len = p.len[i];
      }
    std::vector<u32> children(p.lab.begin() + target, p.lab.begin() + target + target_len);
    std::sort(children.begin(), children.end());

    std::vector<u32> explored;
    std::size_t cached_generators = kNone;
    std::optional<UnionFind> orbits;
    for (u32 w : children) {
      if (on_first && have_first_ && !explored.empty()) {
        if (cached_generators != generators_.size()) {
          orbits = orbits_fixing(level);
          cached_generators = generators_.size();
        }
        const u32 root = orbits->find(w);
        if (std::any_of(explored.begin(), explored.end(), [&](u32 e) { return orbits->find(e) == root; })) continue;
      }
      Partition q = p;
      const u32 s = individualize(q, w);
      const u32 splitter[] = {s};
      trace.push_back(refiner_.refine(q, splitter));
      path_.push_back(w);
      bool keep = true;
      if (have_first_ && compare_prefix(trace, first_.trace) != 0) keep = compare_prefix(trace, best_.trace) >= 0;
      std::size_t r = kNone;
      if (keep) {
        const bool child_first = on_first && (!have_first_ || first_path_[level] == w);
        r = dfs(q, trace, level + 1, child_first);
      }
      trace.pop_back();
      path_.pop_back();
      explored.push_back(w);
      if (r != kNone && r < level) return r;
    }
    return kNone;
  }

  const ColoredGraph& g_;
  Refiner refiner_;
  CanonOptions options_;
  bool have_first_ = false;
  Leaf first_, best_;
  std::vector<u32> first_path_;
  std::vector<u32> path_;
  std::vector<Permutation> generators_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

CanonicalForm canonical_form(const ColoredGraph& graph, const CanonOptions& options) {
  if (graph.order() > options.max_vertices)
    throw BudgetExceeded("graph with " + std::to_string(graph.order()) + " vertices exceeds canonization cap " +
                         std::to_string(options.max_vertices));
  return Search(graph, options).run();
}

AutReport aut_order_report(const IncidenceStructure& design, std::span<const Permutation> construction,
                           const CanonOptions& options) {
  return aut_order_report(design, canonical_form(encode_design(design), options), construction);
}

AutReport aut_order_report(const IncidenceStructure& design, const CanonicalForm& cf,
                           std::span<const Permutation> construction) {
  AutReport r;
  for (const auto& g : cf.generators) {
    std::vector<Point> images(g.images().begin(), g.images().begin() + static_cast<std::ptrdiff_t>(design.v));
    Permutation restricted = Permutation::from_images(std::move(images));
    if (!restricted.is_identity()) r.point_generators.push_back(std::move(restricted));
  }
  PermGroup group = r.point_generators.empty() ? PermGroup::trivial(design.v) : PermGroup(r.point_generators);
  r.order = group.order();
  r.orbit_product_agrees = r.order == cf.aut_order;
  for (const auto& g : construction) {
    if (g.degree() != design.v) throw Error("construction generator of the wrong degree");
    for (const auto& block : design.blocks)
      if (!std::binary_search(design.blocks.begin(), design.blocks.end(), block.image(g), LexLess{})) {
        r.contains_construction = false;
        break;
      }
  }
  if (!r.contains_construction) throw Error("constructing group does not act on the design");
  return r;
}

AutReport aut_order_report(const UGraph& graph, const CanonOptions& options) {
  return aut_order_report(graph, canonical_form(encode_graph(graph), options));
}

AutReport aut_order_report(const UGraph& graph, const CanonicalForm& cf) {
  AutReport r;
  r.point_generators = cf.generators;
  PermGroup group = cf.generators.empty() ? PermGroup::trivial(graph.order()) : PermGroup(cf.generators);
  r.order = group.order();
  r.orbit_product_agrees = r.order == cf.aut_order;
  return r;
}

namespace {

struct BucketKey {
  std::size_t v = 0, b = 0, k = 0;
  std::vector<std::uint64_t> intersections;  // histogram, empty above the cap
  std::vector<std::size_t> point_degrees;    // sorted, in the square of the incidence graph
  std::vector<std::size_t> block_degrees;
  friend auto operator<=>(const BucketKey&, const BucketKey&) = default;
};

BucketKey bucket_key(const IncidenceStructure& d) {
  BucketKey key{d.v, d.b(), d.k, {}, {}, {}};
  for (Point p = 0; p < d.v; ++p) {
    PointMask together;
    for (const auto& block : d.blocks)
      if (block.test(p)) together |= block;
    key.point_degrees.push_back(together.count() - (together.test(p) ? 1 : 0));
  }
  std::sort(key.point_degrees.begin(), key.point_degrees.end());
  if (d.b() <= 20'000) {
    key.intersections.assign(d.k + 1, 0);
    std::vector<std::size_t> meets(d.b(), 0);
    for (std::size_t i = 0; i < d.b(); ++i)
      for (std::size_t j = i + 1; j < d.b(); ++j) {
        const std::size_t c = (d.blocks[i] & d.blocks[j]).count();
        ++key.intersections[c];
        if (c) {
          ++meets[i];
          ++meets[j];
        }
      }
    std::sort(meets.begin(), meets.end());
    key.block_degrees = std::move(meets);
  }
  return key;
}

}  // namespace

IsoClasses iso_classes(std::span<const IncidenceStructure> designs, const CanonOptions& options) {
  return iso_classes(designs, [&](std::size_t i) { return canonical_form(encode_design(designs[i]), options).digest(); });
}

IsoClasses iso_classes(std::span<const IncidenceStructure> designs, const DigestFn& digest) {
  std::map<BucketKey, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < designs.size(); ++i) buckets[bucket_key(designs[i])].push_back(i);
  IsoClasses out;
  for (auto& [key, members] : buckets) {
    if (members.size() == 1) {
      out.classes.push_back(members);
      ++out.min_count;
      ++out.max_count;
      continue;
    }
    std::map<std::string, std::vector<std::size_t>> by_digest;
    bool failed = false;
    for (std::size_t i : members) {
      try {
        by_digest[digest(i)].push_back(i);
      } catch (const BudgetExceeded&) {
        failed = true;
        break;
      }
    }
    if (failed) {
      ++out.unresolved_buckets;
      for (std::size_t i : members) out.classes.push_back({i});
      out.min_count += 1;
      out.max_count += members.size();
      continue;
    }
    for (auto& [digest, cls] : by_digest) out.classes.push_back(cls);
    out.min_count += by_digest.size();
    out.max_count += by_digest.size();
  }
  return out;
}

}  // namespace atlas
