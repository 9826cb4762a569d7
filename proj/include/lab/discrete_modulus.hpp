#pragma once

#include <vector>

namespace lab {

struct DiscreteModulusResult {
  double value = 0.0;
  std::vector<double> rho;       // optimal vertex weights
  bool disconnected = false;
  std::vector<int> reachable;    // disconnection certificate: side-A component
  int paths_generated = 0;
  double shortest_length = 0.0;  // min rho-length of a crossing path at exit
};

// Discrete modulus of the family of paths joining side_a to side_b:
// minimizes sum rho(v)^2 subject to every crossing path having vertex
// rho-length at least 1.  Constraint generation with a vertex-weighted
// shortest-path oracle; the quadratic subproblems are solved on the active
// paths through their nonnegative dual.  Terminates when the shortest
// crossing path has length >= 1 - 1e-9.
DiscreteModulusResult discrete_modulus(const std::vector<std::vector<int>>& adjacency,
                                       const std::vector<int>& side_a,
                                       const std::vector<int>& side_b);

}  // namespace lab
