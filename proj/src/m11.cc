#include "atlas/m11.hpp"

#include "atlas/element_index.hpp"

namespace atlas {

std::vector<Permutation> m11_generators() {
  return {parse_permutation("(0,1,2,3,4,5,6,7,8,9,10)", 11), parse_permutation("(2,6,10,7)(3,9,4,5)", 11)};
}

bool is_simple(const PermGroup& group) {
  if (group.is_trivial()) return false;
  ElementIndex index(group);
  for (const auto& cls : index.conjugacy_classes()) {
    if (cls.front() == 0) continue;
    const Permutation rep[] = {index.element(cls.front())};
    if (normal_closure(group, rep).order() != group.order()) return false;
  }
  return true;
}

GroupValidation validate_m11(const PermGroup& group) {
  GroupValidation v;
  v.order_ok = group.order() == 7920;
  v.simple = v.order_ok && is_simple(group);
  const auto t = transitivity_degree(group);
  v.four_transitive = group.degree() == 11 && t == 4;
  v.detail = "order " + group.order().str() + ", transitivity degree " + std::to_string(t) +
             (v.simple ? ", simple" : ", not simple");
  return v;
}

}  // namespace atlas
