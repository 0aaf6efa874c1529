#pragma once

// Exact rational polytope volume from a half-space description.  Used for the
// alpha constant, which must come out as an exact rational.  The algorithm is
// entirely rational: candidate vertices are solutions of d x d subsystems of
// tight facets, the face lattice is recovered from tight-set inclusion, and
// each face is triangulated by coning from its first vertex.

#include <vector>

#include "d4/arith.hpp"

namespace d4::polytope {

// One inequality a . t <= b.
struct HalfSpace {
  std::vector<Rat> a;
  Rat b;
};

struct Polytope {
  int dim = 0;
  std::vector<HalfSpace> facets;
};

// The six-dimensional polytope whose volume is the alpha constant:
// t_i >= 0 together with the five inequalities listed in d4_alpha_polytope's
// definition.  Volume must be exactly 1/23040.
Polytope d4_alpha_polytope();

Polytope unit_cube(int dim);
// t_i >= 0, sum t_i <= 1; volume 1/dim!.
Polytope standard_simplex(int dim);
// Half-space description of the simplex with the given dim+1 vertices
// (must be full-dimensional).
Polytope simplex_from_vertices(const std::vector<std::vector<Rat>>& vertices);

// All vertices (deduplicated, exact).
std::vector<std::vector<Rat>> enumerate_vertices(const Polytope& p);

// True if the recession cone {d : A d <= 0} is trivial.
bool is_bounded(const Polytope& p);

// Exact volume.  Throws std::invalid_argument if the polytope is unbounded
// or not full-dimensional.
Rat volume(const Polytope& p);

}  // namespace d4::polytope
