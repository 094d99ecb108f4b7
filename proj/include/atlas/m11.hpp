#pragma once

#include <string>
#include <vector>

#include "atlas/perm_group.hpp"

namespace atlas {

/// Two permutations of degree 11 generating the Mathieu group M11.
std::vector<Permutation> m11_generators();

struct GroupValidation {
  bool order_ok = false;
  bool simple = false;
  bool four_transitive = false;
  std::string detail;

  bool ok() const { return order_ok && simple && four_transitive; }
};

/// Startup checks for the embedded generators: order 7920, no proper
/// nontrivial normal closure of any element, transitivity degree 4.
GroupValidation validate_m11(const PermGroup& group);

/// True when no nontrivial element has a proper normal closure. Enumerates
/// conjugacy class representatives, so the group must fit an element table.
bool is_simple(const PermGroup& group);

}  // namespace atlas
