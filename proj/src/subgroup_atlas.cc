#include "atlas/subgroup_atlas.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace atlas {

namespace {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Greedy generating set: scan elements in rank order and keep those not yet
/// generated.
std::vector<ElementId> small_generating_set(const ElementIndex& index, const ElementSet& elements) {
  std::vector<ElementId> gens;
  ElementSet current = index.closure(gens);
  elements.for_each([&](ElementId e) {
    if (current.contains(e)) return;
    gens.push_back(e);
    current = index.closure(gens);
  });
  return gens;
}

}  // namespace

SubgroupLattice::SubgroupLattice(const PermGroup& group, LatticeLimits limits)
    : index_(std::make_shared<ElementIndex>(group, limits.max_group_order)), limits_(limits) {
  for (const auto& g : group.generators()) {
    const ElementId s = index_->rank(g);
    std::vector<ElementId> map(index_->size());
    for (ElementId e = 0; e < index_->size(); ++e) map[e] = index_->conjugate(e, s);
    conjugation_maps_.push_back(std::move(map));
  }
}

std::optional<std::size_t> SubgroupLattice::find(const ElementSet& elements) const {
  auto it = known_.find(elements);
  if (it == known_.end()) return std::nullopt;
  return it->second;
}

std::size_t SubgroupLattice::register_subgroup(const ElementSet& elements) {
  if (auto id = find(elements)) return *id;
  const std::size_t id = classes_.size();

  std::vector<ElementSet> members{elements};
  known_.emplace(elements, id);
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const auto& map : conjugation_maps_) {
      ElementSet image(index_->size());
      members[i].for_each([&](ElementId e) { image.insert(map[e]); });
      if (known_.count(image)) continue;
      if (known_.size() >= limits_.max_subgroups)
        throw BudgetExceeded("subgroup lattice exceeds " + std::to_string(limits_.max_subgroups) + " subgroups");
      known_.emplace(image, id);
      members.push_back(std::move(image));
    }
  }

  const ElementSet* least = &members.front();
  for (const auto& m : members)
    if (m.lex_less(*least)) least = &m;

  SubgroupClass cls;
  cls.elements = *least;
  std::vector<Permutation> gens;
  for (ElementId e : small_generating_set(*index_, cls.elements)) gens.push_back(index_->element(e));
  if (gens.empty()) gens.emplace_back(index_->degree());
  cls.representative = PermGroup(std::move(gens));
  cls.order = cls.elements.size();
  cls.index = index_->size() / cls.order;
  cls.class_size = members.size();
  std::map<std::uint64_t, std::uint64_t> orders;
  cls.elements.for_each([&](ElementId e) { ++orders[index_->element_order(e)]; });
  cls.fingerprint.element_orders.assign(orders.begin(), orders.end());
  auto [steps, solvable] = derived_series(cls.representative);
  cls.fingerprint.derived_length = steps;
  cls.solvable = solvable;
  classes_.push_back(std::move(cls));
  return id;
}

std::vector<ElementId> SubgroupLattice::normalizer(std::size_t class_id) const {
  const SubgroupClass& cls = classes_.at(class_id);
  std::vector<ElementId> gens;
  for (const auto& g : cls.representative.generators()) gens.push_back(index_->rank(g));
  std::vector<ElementId> out;
  for (ElementId g = 0; g < index_->size(); ++g) {
    bool normalizes = std::all_of(gens.begin(), gens.end(),
                                  [&](ElementId h) { return cls.elements.contains(index_->conjugate(h, g)); });
    if (normalizes) out.push_back(g);
  }
  return out;
}

std::vector<std::size_t> SubgroupLattice::cyclic_extensions(std::size_t class_id) {
  const ElementSet base = classes_.at(class_id).elements;
  const std::vector<ElementId> members = base.to_vector();
  ElementSet covered = base;
  std::set<std::size_t> reached;
  for (ElementId x : normalizer(class_id)) {
    if (covered.contains(x)) continue;
    // Order of x modulo the base subgroup.
    std::uint64_t m = 1;
    ElementId power = x;
    while (!base.contains(power)) {
      power = index_->multiply(power, x);
      ++m;
    }
    if (!is_prime(m)) continue;
    ElementSet extension = base;
    ElementId coset = 0;
    for (std::uint64_t i = 1; i < m; ++i) {
      coset = index_->multiply(coset, x);
      for (ElementId h : members) extension.insert(index_->multiply(h, coset));
    }
    // Every element of extension \ base generates the same extension.
    extension.for_each([&](ElementId e) { covered.insert(e); });
    reached.insert(register_subgroup(extension));
  }
  return {reached.begin(), reached.end()};
}

std::vector<std::size_t> SubgroupLattice::perfect_subgroups(const std::vector<std::uint64_t>& target_orders) {
  const std::set<std::uint64_t> targets(target_orders.begin(), target_orders.end());
  const std::uint64_t group_order = index_->size();
  std::set<std::size_t> found;
  if (targets.count(1)) found.insert(register_subgroup(index_->closure({})));

  std::optional<bool> whole_group_perfect;
  std::vector<ElementSet> perfect_sets;  // perfect subgroups met so far, not up to conjugacy
  for (const auto& cls : index_->conjugacy_classes()) {
    const ElementId x = cls.front();
    if (x == 0) continue;
    const Permutation px = index_->element(x);
    // Pairs (x, y) and (x, y^c) with c centralizing x generate conjugate
    // subgroups, so one y per orbit of the centralizer suffices.
    ElementSet centralizer(group_order);
    for (ElementId c = 0; c < group_order; ++c)
      if (index_->multiply(x, c) == index_->multiply(c, x)) centralizer.insert(c);
    const std::vector<ElementId> cgens = small_generating_set(*index_, centralizer);
    std::vector<bool> visited(group_order, false);
    for (ElementId y = 1; y < group_order; ++y) {
      if (visited[y]) continue;
      std::vector<ElementId> orbit{y};
      visited[y] = true;
      for (std::size_t i = 0; i < orbit.size(); ++i)
        for (ElementId c : cgens) {
          const ElementId z = index_->conjugate(orbit[i], c);
          if (!visited[z]) {
            visited[z] = true;
            orbit.push_back(z);
          }
        }
      const std::uint64_t ox = index_->element_order(x), oy = index_->element_order(y);
      bool divides = std::any_of(targets.begin(), targets.end(),
                                 [&](std::uint64_t t) { return t >= 60 && t % ox == 0 && t % oy == 0; });
      if (!divides) continue;
      PermGroup pair({px, index_->element(y)});
      const std::uint64_t order = pair.order_u64();
      // Nontrivial perfect groups have order at least 60.
      if (order < 60 || !targets.count(order)) continue;
      if (order == group_order) {
        if (!whole_group_perfect) {
          whole_group_perfect = derived_subgroup(index_->group()).order() == group_order;
          if (*whole_group_perfect) found.insert(register_subgroup(index_->elements_of(index_->group())));
        }
        continue;
      }
      bool known = std::any_of(perfect_sets.begin(), perfect_sets.end(), [&](const ElementSet& k) {
        return k.size() == order && k.contains(x) && k.contains(y);
      });
      if (known || derived_subgroup(pair).order() != order) continue;
      const ElementId gens[] = {x, y};
      ElementSet elements = index_->closure(gens);
      found.insert(register_subgroup(elements));
      perfect_sets.push_back(std::move(elements));
    }
  }
  return {found.begin(), found.end()};
}

std::vector<SubgroupClass> SubgroupLattice::sorted_classes() const {
  std::vector<SubgroupClass> out = classes_;
  std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
    if (a.order != b.order) return a.order < b.order;
    if (a.fingerprint != b.fingerprint) return a.fingerprint < b.fingerprint;
    return a.elements.lex_less(b.elements);
  });
  return out;
}

std::vector<SubgroupClass> enumerate_subgroup_classes(const PermGroup& group, LatticeLimits limits) {
  SubgroupLattice lattice(group, limits);
  const std::uint64_t n = lattice.index().size();
  std::vector<std::uint64_t> divisors;
  for (std::uint64_t d = 1; d <= n; ++d)
    if (n % d == 0) divisors.push_back(d);

  std::set<std::pair<std::uint64_t, std::size_t>> pending;
  auto push = [&](std::size_t id) { pending.emplace(lattice.classes()[id].order, id); };
  push(lattice.register_subgroup(lattice.index().closure({})));
  for (std::size_t id : lattice.perfect_subgroups(divisors)) push(id);

  std::set<std::size_t> done;
  while (!pending.empty()) {
    auto [order, id] = *pending.begin();
    pending.erase(pending.begin());
    if (!done.insert(id).second) continue;
    for (std::size_t ext : lattice.cyclic_extensions(id))
      if (!done.count(ext)) push(ext);
  }
  return lattice.sorted_classes();
}

std::vector<SubgroupClass> cyclic_extension_step(const PermGroup& group, const std::vector<SubgroupClass>& layer,
                                                 LatticeLimits limits) {
  if (layer.empty()) return {};
  SubgroupLattice lattice(group, limits);
  std::set<std::size_t> reached;
  for (const auto& cls : layer) {
    const std::size_t id = lattice.register_subgroup(lattice.index().elements_of(cls.representative));
    for (std::size_t ext : lattice.cyclic_extensions(id)) reached.insert(ext);
  }
  std::vector<SubgroupClass> out;
  for (std::size_t id : reached) out.push_back(lattice.classes()[id]);
  std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
    if (a.order != b.order) return a.order < b.order;
    if (a.fingerprint != b.fingerprint) return a.fingerprint < b.fingerprint;
    return a.elements.lex_less(b.elements);
  });
  return out;
}

std::vector<SubgroupClass> perfect_subgroup_search(const PermGroup& group,
                                                   const std::vector<std::uint64_t>& target_orders,
                                                   LatticeLimits limits) {
  const std::uint64_t n = to_u64(group.order());
  for (auto t : target_orders)
    if (t == 0 || n % t != 0) throw Error("target order " + std::to_string(t) + " does not divide the group order");
  SubgroupLattice lattice(group, limits);
  std::vector<SubgroupClass> out;
  for (std::size_t id : lattice.perfect_subgroups(target_orders)) out.push_back(lattice.classes()[id]);
  std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.elements.lex_less(b.elements);
  });
  return out;
}

std::vector<AtlasRow> atlas_rows(const std::vector<SubgroupClass>& classes) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> counts;
  for (const auto& c : classes) ++counts[{c.order, c.index}];
  std::vector<AtlasRow> rows;
  for (const auto& [key, mult] : counts) rows.push_back({key.first, key.second, mult});
  return rows;
}

AtlasReport verify_atlas(const std::vector<SubgroupClass>& classes, const std::vector<AtlasRow>& expected) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<std::uint64_t, std::uint64_t>> table;
  AtlasReport report;
  for (const auto& row : expected) {
    table[{row.order, row.index}].first += row.multiplicity;
    report.expected_classes += row.multiplicity;
  }
  for (const auto& row : atlas_rows(classes)) table[{row.order, row.index}].second += row.multiplicity;
  report.computed_classes = classes.size();
  for (const auto& [key, counts] : table)
    if (counts.first != counts.second)
      report.mismatches.push_back({key.first, key.second, counts.first, counts.second});
  return report;
}

std::vector<AtlasRow> parse_atlas_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<AtlasRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line.rfind("order,index,multiplicity", 0) != 0) throw ParseError("atlas CSV header must be order,index,multiplicity");
      header = false;
      continue;
    }
    AtlasRow row;
    char c1 = 0, c2 = 0;
    std::istringstream fields(line);
    if (!(fields >> row.order >> c1 >> row.index >> c2 >> row.multiplicity) || c1 != ',' || c2 != ',')
      throw ParseError("malformed atlas CSV row: " + line);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json atlas_to_json(const std::vector<SubgroupClass>& classes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : classes) {
    nlohmann::json fp = nlohmann::json::object();
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& [order, count] : c.fingerprint.element_orders) orders.push_back({order, count});
    fp["element_orders"] = orders;
    fp["derived_length"] = c.fingerprint.derived_length;
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : c.representative.generators()) gens.push_back(to_cycle_string(g));
    out.push_back({{"order", c.order},
                   {"index", c.index},
                   {"class_size", c.class_size},
                   {"solvable", c.solvable},
                   {"fingerprint", fp},
                   {"generators", gens}});
  }
  return out;
}

}  // namespace atlas
