#include "mtq/geometry.hpp"

#include "mtq/model.hpp"

#include <algorithm>

namespace mtq {

std::array<int, 4> Similitude::orthogonal(int rot, bool reflect) {
  std::array<int, 4> O{reflect ? -1 : 1, 0, 0, 1};
  for (int k = 0; k < ((rot % 4) + 4) % 4; ++k) {
    // left-multiply by the quarter turn [[0,-1],[1,0]]
    O = {-O[2], -O[3], O[0], O[1]};
  }
  return O;
}

Point Similitude::apply(const Point& x) const {
  return {ratio * (O[0] * x[0] + O[1] * x[1]) + t[0], ratio * (O[2] * x[0] + O[3] * x[1]) + t[1]};
}

Similitude Similitude::then(const Similitude& inner) const {
  Similitude out;
  out.ratio = ratio * inner.ratio;
  out.O = {O[0] * inner.O[0] + O[1] * inner.O[2], O[0] * inner.O[1] + O[1] * inner.O[3],
           O[2] * inner.O[0] + O[3] * inner.O[2], O[2] * inner.O[1] + O[3] * inner.O[3]};
  out.t = apply(inner.t);
  return out;
}

double Box::diameter(int q) const {
  const double dx = hi[0] - lo[0], dy = q == 2 ? hi[1] - lo[1] : 0.0;
  return std::sqrt(dx * dx + dy * dy);
}

Point Box::centroid() const { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }

bool Box::contains(const Box& b, int q, double tol) const {
  for (int k = 0; k < q; ++k)
    if (b.lo[k] < lo[k] - tol || b.hi[k] > hi[k] + tol) return false;
  return true;
}

Box image(const Similitude& f, const Box& b, int q) {
  const Point p = f.apply(b.lo), r = f.apply(b.hi);
  Box out;
  for (int k = 0; k < 2; ++k) {
    out.lo[k] = std::min(p[k], r[k]);
    out.hi[k] = std::max(p[k], r[k]);
  }
  if (q == 1) out.lo[1] = out.hi[1] = 0.0;
  return out;
}

double box_distance(const Box& a, const Box& b, int q) {
  double acc = 0.0;
  for (int k = 0; k < q; ++k) {
    const double gap = std::max({0.0, a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]});
    acc += gap * gap;
  }
  return std::sqrt(acc);
}

GeometrySpec default_geometry(const SystemSpec& spec, int q) {
  if (q != 1 && q != 2) throw InputError("default geometry supports q = 1 or 2");
  const int N = spec.N;
  const double side = q == 1 ? 1.0 : 1.0 / std::sqrt(2.0);
  GeometrySpec g;
  g.q = q;
  for (int i = 0; i < N; ++i) {
    Box b;
    b.lo = {2.0 * i, 0.0};
    b.hi = {2.0 * i + side, q == 2 ? side : 0.0};
    g.seeds.push_back(b);
  }
  for (int i = 0; i < N; ++i) {
    std::vector<int> kids;
    double total = 0.0;
    for (int j = 0; j < N; ++j)
      if (spec.ratio(i, j) > 0.0) {
        kids.push_back(j);
        total += spec.ratio(i, j);
      }
    if (total >= 1.0) throw InputError("ratios of row " + std::to_string(i + 1) + " are too large for the slot layout");
    const double gap = kids.size() > 1 ? (1.0 - total) / static_cast<double>(kids.size() - 1) : 0.0;
    double cursor = kids.size() > 1 ? 0.0 : 0.5 * (1.0 - total);
    for (int j : kids) {
      Similitude f;
      f.ratio = spec.ratio(i, j);
      if (q == 2) f.O = Similitude::orthogonal((i + j) % 4, (i + j) % 2 == 1);
      // place the image's lower corner at the slot start
      const Box raw = image(f, g.seeds[j], q);
      const double x0 = g.seeds[i].lo[0] + cursor * side;
      const double y0 = q == 2 ? g.seeds[i].lo[1] + 0.5 * (side - (raw.hi[1] - raw.lo[1])) : 0.0;
      f.t = {x0 - raw.lo[0], q == 2 ? y0 - raw.lo[1] : 0.0};
      g.maps[{i, j}] = f;
      cursor += f.ratio + gap;
    }
  }
  return g;
}

namespace {

const GeometrySpec& need_geometry(const SystemSpec& spec) {
  if (!spec.geometry) throw InputError("spec '" + spec.name + "' has no geometry");
  return *spec.geometry;
}

const Similitude& cell_map(const GeometrySpec& g, int i, int j) {
  auto it = g.maps.find({i, j});
  if (it == g.maps.end())
    throw InputError("no similitude for cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  return it->second;
}

}  // namespace

CylinderRegion cylinder_set(const Word& sigma, const SystemSpec& spec) {
  const auto& g = need_geometry(spec);
  if (!in_S(sigma, spec.graph)) throw InputError("word " + format_word(sigma) + " is not in S_n");
  Similitude f;
  for (std::size_t h = 0; h + 1 < sigma.size(); ++h) f = f.then(cell_map(g, sigma[h], sigma[h + 1]));
  CylinderRegion out;
  out.map = f;
  out.box = image(f, g.seeds[sigma.back()], g.q);
  out.diameter = out.box.diameter(g.q);
  return out;
}

GeometryCheck validate_geometry(const GeometrySpec& g, const SystemSpec& spec) {
  GeometryCheck out;
  const int N = spec.N;
  const int q = g.q;
  double delta = std::numeric_limits<double>::infinity();
  auto bad = [&](const std::string& msg, std::string a, std::string b) {
    out.pass = false;
    if (out.message.empty()) out.message = msg;
    out.witnesses.emplace_back(std::move(a), std::move(b));
  };
  out.pass = true;
  if (static_cast<int>(g.seeds.size()) != N) {
    bad("seed count differs from N", "", "");
    return out;
  }
  for (int i = 0; i < N; ++i)
    if (std::abs(g.seeds[i].diameter(q) - 1.0) > 1e-12) bad("seed diameter is not 1", "J" + std::to_string(i + 1), "");
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double d = box_distance(g.seeds[i], g.seeds[j], q);
      if (d <= 0.0) bad("seeds intersect", "J" + std::to_string(i + 1), "J" + std::to_string(j + 1));
      delta = std::min(delta, d);
    }
  for (int i = 0; i < N; ++i) {
    std::vector<std::pair<int, Box>> imgs;
    for (int j = 0; j < N; ++j) {
      if (spec.ratio(i, j) <= 0.0) continue;
      auto it = g.maps.find({i, j});
      const std::string cell = "T" + format_word({i, j});
      if (it == g.maps.end()) {
        bad("missing similitude", cell, "");
        continue;
      }
      if (std::abs(it->second.ratio - spec.ratio(i, j)) > 1e-12) bad("similitude ratio disagrees with spec", cell, "");
      const Box b = image(it->second, g.seeds[j], q);
      if (!g.seeds[i].contains(b, q)) bad("image leaves its parent seed", cell, "J" + std::to_string(i + 1));
      imgs.emplace_back(j, b);
    }
    for (std::size_t a = 0; a < imgs.size(); ++a)
      for (std::size_t b = a + 1; b < imgs.size(); ++b) {
        const double d = box_distance(imgs[a].second, imgs[b].second, q);
        const double scale = std::max(imgs[a].second.diameter(q), imgs[b].second.diameter(q));
        if (d <= 0.0)
          bad("images overlap", "T" + format_word({i, imgs[a].first}), "T" + format_word({i, imgs[b].first}));
        delta = std::min(delta, d / scale);
      }
  }
  out.delta = out.pass ? delta : 0.0;
  if (out.pass && !(out.delta > 0.0)) {
    out.pass = false;
    out.message = "separation constant is not positive";
  }
  return out;
}

Point realize_point(const Word& lifted, const SystemSpec& spec) {
  const auto& g = need_geometry(spec);
  const Word sigma = project(lifted, spec.N);
  Point x = g.seeds[sigma.back()].centroid();
  for (std::size_t h = sigma.size() - 1; h-- > 0;) x = cell_map(g, sigma[h], sigma[h + 1]).apply(x);
  return x;
}

}  // namespace mtq
