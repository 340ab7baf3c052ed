#pragma once

#include "mtq/core.hpp"

#include <array>
#include <map>
#include <optional>
#include <utility>

namespace mtq {

using Point = std::array<double, 2>;

// x -> ratio * O x + t with O a signed permutation matrix (quarter-turn
// rotations and reflections); in q = 1 only O = +-1 on the first axis occurs.
struct Similitude {
  double ratio = 1.0;
  std::array<int, 4> O{1, 0, 0, 1};
  Point t{0.0, 0.0};

  static std::array<int, 4> orthogonal(int rot, bool reflect);
  Point apply(const Point& x) const;
  Similitude then(const Similitude& inner) const;  // this o inner
};

struct Box {
  Point lo{0.0, 0.0}, hi{0.0, 0.0};
  double diameter(int q) const;
  Point centroid() const;
  bool contains(const Box& b, int q, double tol = 1e-12) const;
};

Box image(const Similitude& f, const Box& b, int q);
double box_distance(const Box& a, const Box& b, int q);

struct GeometrySpec {
  int q = 1;
  std::vector<Box> seeds;                          // J_i, i in Psi
  std::map<std::pair<int, int>, Similitude> maps;  // T_{i,j} per cell in S_2
};

struct SystemSpec;

// Default layout: J_i = [2i, 2i+1] in q = 1 (or unit-diameter squares in
// q = 2); children of row i are placed left to right in their slots.
GeometrySpec default_geometry(const SystemSpec& spec, int q = 1);

struct CylinderRegion {
  Box box;
  double diameter = 0.0;
  Similitude map;
};

CylinderRegion cylinder_set(const Word& sigma, const SystemSpec& spec);

struct GeometryCheck {
  bool pass = false;
  double delta = 0.0;
  std::string message;
  std::vector<std::pair<std::string, std::string>> witnesses;
};

GeometryCheck validate_geometry(const GeometrySpec& g, const SystemSpec& spec);

Point realize_point(const Word& lifted, const SystemSpec& spec);

}  // namespace mtq
