#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "atlas/analytics.hpp"
#include "atlas/canon.hpp"
#include "atlas/m11.hpp"
#include "atlas/subgroup_atlas.hpp"

using namespace atlas;

namespace {

struct Fixture {
  SubgroupLattice lattice{PermGroup(m11_generators())};
  std::vector<SubgroupClass> classes = enumerate_subgroup_classes(PermGroup(m11_generators()));

  GroupAction action(std::uint64_t order) {
    for (const auto& c : classes)
      if (c.order == order) return coset_action(lattice.shared_index(), c.representative);
    throw Error("no such class");
  }

  std::vector<IncidenceStructure> designs(GroupAction& omega2, std::uint64_t stabilizer_order, std::size_t k,
                                          std::uint64_t b) {
    DesignSweep sweep(omega2);
    SweepOptions opts;
    opts.block_size = k;
    for (const auto& c : classes)
      if (c.order == stabilizer_order) sweep.add_stabilizer(c.representative, 0, opts);
    std::vector<IncidenceStructure> out;
    for (const auto& seed : sweep.seeds())
      if (seed.b == b) out.push_back(sweep.build(seed));
    return out;
  }

  IncidenceStructure best(GroupAction& omega2, std::uint64_t stabilizer_order, std::size_t k, std::uint64_t b) {
    auto all = designs(omega2, stabilizer_order, k, b);
    REQUIRE(!all.empty());
    return *std::max_element(all.begin(), all.end(), [](const auto& x, const auto& y) {
      return max_t_lambda(x, 5).t < max_t_lambda(y, 5).t;
    });
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

Permutation random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> images(n);
  std::iota(images.begin(), images.end(), 0u);
  std::shuffle(images.begin(), images.end(), rng);
  return Permutation::from_images(std::move(images));
}

// Relabeling that keeps colour classes in place as sets.
Permutation colour_respecting(const ColoredGraph& g, std::mt19937_64& rng) {
  std::map<std::uint32_t, std::vector<Point>> by_colour;
  for (Point v = 0; v < g.order(); ++v) by_colour[g.colors()[v]].push_back(v);
  std::vector<Point> images(g.order());
  for (auto& [c, vs] : by_colour) {
    auto shuffled = vs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < vs.size(); ++i) images[vs[i]] = shuffled[i];
  }
  return Permutation::from_images(std::move(images));
}

UGraph triangular(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  UGraph g(pairs.size());
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      auto [p, q] = pairs[a];
      auto [r, s] = pairs[b];
      if (p == r || p == s || q == r || q == s) g.add_edge(a, b);
    }
  return g;
}

UGraph petersen() {
  UGraph g(10);
  for (std::size_t i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(i + 5, (i + 2) % 5 + 5);
  }
  return g;
}

UGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  UGraph g(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(rng)) g.add_edge(a, b);
  return g;
}

// Oracle: count automorphisms by trying every permutation.
std::uint64_t brute_force_aut(const UGraph& g) {
  std::vector<std::size_t> p(g.order());
  std::iota(p.begin(), p.end(), 0);
  std::uint64_t count = 0;
  do {
    bool ok = true;
    for (std::size_t a = 0; a < g.order() && ok; ++a)
      for (std::size_t b = a + 1; b < g.order() && ok; ++b) ok = g.adjacent(a, b) == g.adjacent(p[a], p[b]);
    count += ok;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

void check_automorphisms(const ColoredGraph& g, const CanonicalForm& cf) {
  for (const auto& gen : cf.generators) {
    for (std::uint32_t v = 0; v < g.order(); ++v) {
      REQUIRE(g.colors()[gen[v]] == g.colors()[v]);
      for (std::uint32_t u : g.neighbours(v)) REQUIRE(g.adjacent(gen[v], gen[u]));
    }
  }
}

}  // namespace

TEST_CASE("canonical form is invariant under relabeling") {
  std::mt19937_64 rng(7);
  std::vector<ColoredGraph> structures;
  for (std::size_t n : {6, 9, 12, 15, 20, 25, 30})
    for (double p : {0.2, 0.5}) structures.push_back(encode_graph(random_graph(n, p, rng)));
  structures.push_back(encode_graph(petersen()));
  structures.push_back(encode_graph(triangular(7)));
  structures.push_back(encode_graph(triangular(8)));
  structures.push_back(encode_graph(UGraph(8)));
  structures.push_back(encode_graph(UGraph(8).complement()));
  auto& f = fixture();
  GroupAction a11 = f.action(720);
  for (const auto& d : f.designs(a11, 120, 5, 66)) structures.push_back(encode_design(d));
  for (const auto& d : f.designs(a11, 720, 3, 165)) structures.push_back(encode_design(d));
  for (const auto& d : f.designs(a11, 144, 4, 330)) structures.push_back(encode_design(d));
  REQUIRE(structures.size() >= 20);

  for (const auto& g : structures) {
    const CanonicalForm base = canonical_form(g);
    check_automorphisms(g, base);
    // The labeling really produces the canonical edge set.
    ColoredGraph relabeled = g.relabeled(Permutation::from_images({base.labeling.begin(), base.labeling.end()}));
    for (int i = 0; i < 100; ++i) {
      const ColoredGraph h = g.relabeled(colour_respecting(g, rng));
      const CanonicalForm other = canonical_form(h);
      REQUIRE(other.bytes == base.bytes);
      REQUIRE(other.aut_order == base.aut_order);
      ColoredGraph other_relabeled =
          h.relabeled(Permutation::from_images({other.labeling.begin(), other.labeling.end()}));
      for (std::uint32_t v = 0; v < g.order(); ++v) {
        auto x = relabeled.neighbours(v), y = other_relabeled.neighbours(v);
        REQUIRE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
      }
    }
  }
}

TEST_CASE("automorphism counts match brute force on small graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const UGraph g = random_graph(7, trial % 2 ? 0.3 : 0.5, rng);
    const CanonicalForm cf = canonical_form(encode_graph(g));
    CHECK(cf.aut_order == brute_force_aut(g));
    CHECK(aut_order_report(g).orbit_product_agrees);
  }
  CHECK(canonical_form(encode_graph(petersen())).aut_order == 120);
  CHECK(canonical_form(encode_graph(UGraph(6))).aut_order == 720);
}

TEST_CASE("digests separate the isomorphism classes of 5-vertex graphs") {
  // Oracle: orbit representatives under all 120 relabelings, by minimum edge mask.
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) slots.emplace_back(a, b);
  auto slot_of = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return static_cast<int>(std::find(slots.begin(), slots.end(), std::make_pair(a, b)) - slots.begin());
  };
  std::set<int> orbit_minima;
  std::set<std::string> digests;
  for (int mask = 0; mask < 1024; ++mask) {
    std::vector<int> p{0, 1, 2, 3, 4};
    int best = mask;
    do {
      int image = 0;
      for (int s = 0; s < 10; ++s)
        if (mask >> s & 1) image |= 1 << slot_of(p[slots[s].first], p[slots[s].second]);
      best = std::min(best, image);
    } while (std::next_permutation(p.begin(), p.end()));
    orbit_minima.insert(best);
    UGraph g(5);
    for (int s = 0; s < 10; ++s)
      if (mask >> s & 1) g.add_edge(slots[s].first, slots[s].second);
    digests.insert(canonical_form(encode_graph(g)).digest());
  }
  CHECK(digests.size() == orbit_minima.size());
}

TEST_CASE("automorphism groups of designs and graphs from the group") {
  auto& f = fixture();
  GroupAction a11 = f.action(720);
  IncidenceStructure steiner = f.best(a11, 120, 5, 66);
  REQUIRE(max_t_lambda(steiner, 5).t == 4);
  const ColoredGraph g = encode_design(steiner);
  CHECK(g.order() == 77);
  std::vector<Permutation> construction(a11.image_generators().begin(), a11.image_generators().end());
  AutReport r = aut_order_report(steiner, construction);
  CHECK(r.order == 7920);
  CHECK(r.orbit_product_agrees);
  CHECK(r.contains_construction);

  GroupAction a12 = f.action(660);
  IncidenceStructure d12 = f.best(a12, 10, 6, 792);
  CHECK(aut_order_report(d12).order == 95040);

  GroupAction a22 = f.action(360);
  IncidenceStructure d22 = f.best(a22, 10, 7, 792);
  AutReport r22 = aut_order_report(d22);
  CHECK(r22.order == 15840);
  CHECK(r22.orbit_product_agrees);

  AutReport t11 = aut_order_report(triangular(11));
  CHECK(t11.order == 39916800);
  CHECK(t11.orbit_product_agrees);
}

TEST_CASE("isomorphism classes") {
  auto& f = fixture();
  GroupAction a11 = f.action(720);
  IncidenceStructure steiner = f.best(a11, 120, 5, 66);
  std::mt19937_64 rng(3);

  std::vector<IncidenceStructure> copies;
  for (int i = 0; i < 4; ++i) {
    IncidenceStructure d = steiner;
    const Permutation p = random_perm(d.v, rng);
    for (auto& block : d.blocks) block = block.image(p);
    std::sort(d.blocks.begin(), d.blocks.end(), LexLess{});
    copies.push_back(std::move(d));
  }
  IsoClasses one = iso_classes(copies);
  CHECK(one.classes.size() == 1);
  CHECK(one.min_count == 1);
  CHECK(one.max_count == 1);

  // Every 5-subset system on 11 points, in two orders.
  std::vector<IncidenceStructure> mixed = f.designs(a11, 120, 5, 66);
  for (const auto& d : f.designs(a11, 144, 5, 396)) mixed.push_back(d);
  mixed.push_back(copies[0]);
  IsoClasses forward = iso_classes(mixed);
  std::vector<IncidenceStructure> reversed(mixed.rbegin(), mixed.rend());
  IsoClasses backward = iso_classes(reversed);
  CHECK(forward.classes.size() == backward.classes.size());
  CHECK(forward.unresolved_buckets == 0);
  std::set<std::set<std::size_t>> fa, fb;
  for (const auto& c : forward.classes) fa.insert({c.begin(), c.end()});
  for (const auto& c : backward.classes) {
    std::set<std::size_t> s;
    for (std::size_t i : c) s.insert(mixed.size() - 1 - i);
    fb.insert(s);
  }
  CHECK(fa == fb);
  // The copy joins the class of the original Steiner system.
  bool joined = false;
  for (const auto& c : forward.classes) joined |= c.size() >= 2 && std::find(c.begin(), c.end(), mixed.size() - 1) != c.end();
  CHECK(joined);
}

TEST_CASE("canonization budgets") {
  CanonOptions tight;
  tight.max_vertices = 10;
  CHECK_THROWS_AS(canonical_form(encode_graph(triangular(6)), tight), BudgetExceeded);
  tight.max_vertices = 10000;
  tight.max_nodes = 3;
  CHECK_THROWS_AS(canonical_form(encode_graph(triangular(7)), tight), BudgetExceeded);
}

TEST_CASE("isomorphism classes of the 7-subset systems on 22 points") {
  auto& f = fixture();
  GroupAction a22 = f.action(360);
  std::vector<IncidenceStructure> t3, t2;
  for (auto& d : f.designs(a22, 2, 7, 3960)) {
    const auto profile = max_t_lambda(d, 5);
    if (profile.t == 3 && profile.lambda == 90) t3.push_back(d);
    if (profile.t == 2 && profile.lambda == 360) t2.push_back(d);
  }
  IsoClasses c3 = iso_classes(t3);
  CHECK(c3.classes.size() == 3);
  CHECK(c3.unresolved_buckets == 0);
  std::set<std::string> digests;
  for (const auto& d : t2) digests.insert(canonical_form(encode_design(d)).digest());
  CHECK(digests.size() == 3);
  // A relabeled copy of each system lands in the class of its original.
  std::mt19937_64 rng(5);
  std::vector<IncidenceStructure> shuffled = t3;
  for (const auto& d : t3) {
    IncidenceStructure copy = d;
    const Permutation p = random_perm(d.v, rng);
    for (auto& block : copy.blocks) block = block.image(p);
    std::sort(copy.blocks.begin(), copy.blocks.end(), LexLess{});
    shuffled.push_back(std::move(copy));
  }
  IsoClasses doubled = iso_classes(shuffled);
  REQUIRE(doubled.classes.size() == 3);
  for (const auto& c : doubled.classes) {
    REQUIRE(c.size() == 2);
    CHECK(c[1] == c[0] + t3.size());
  }
}
