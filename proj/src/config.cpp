#include "mtq/model.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace mtq {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw InputError("unknown field '" + it.key() + "' in " + where);
}

struct Entry {
  bool exact = false;
  Rational q;
  double d = 0.0;
};

Entry read_entry(const json& v, const std::string& where) {
  Entry e;
  if (v.is_string()) {
    e.q = parse_rational(v.get<std::string>());
    e.d = to_double(e.q);
    e.exact = true;
  } else if (v.is_number_integer() || v.is_number_unsigned()) {
    e.q = Rational(v.get<long long>());
    e.d = static_cast<double>(v.get<long long>());
    e.exact = true;
  } else if (v.is_number()) {
    e.d = v.get<double>();
  } else {
    throw InputError("expected a number or \"a/b\" string in " + where);
  }
  return e;
}

std::pair<int, int> parse_cell_key(const std::string& key, int N) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw InputError("cell key '" + key + "' must look like \"i,j\"");
  int i = 0, j = 0;
  try {
    i = std::stoi(key.substr(0, comma));
    j = std::stoi(key.substr(comma + 1));
  } catch (const std::exception&) {
    throw InputError("cell key '" + key + "' must look like \"i,j\"");
  }
  if (i < 1 || j < 1 || i > N || j > N) throw InputError("cell key '" + key + "' out of range 1..N");
  return {i - 1, j - 1};
}

Point read_point(const json& v, int q, const std::string& where) {
  Point p{0.0, 0.0};
  if (!v.is_array() || static_cast<int>(v.size()) != q) throw InputError(where + " must have " + std::to_string(q) + " coordinates");
  for (int k = 0; k < q; ++k) p[k] = v[k].get<double>();
  return p;
}

GeometrySpec read_geometry(const json& g, int N) {
  reject_unknown(g, {"q", "seeds", "maps"}, "geometry");
  GeometrySpec out;
  out.q = g.value("q", 1);
  if (out.q != 1 && out.q != 2) throw InputError("geometry.q must be 1 or 2");
  const auto& seeds = g.at("seeds");
  if (!seeds.is_array() || static_cast<int>(seeds.size()) != N) throw InputError("geometry.seeds needs N entries");
  for (const auto& s : seeds) {
    Box b;
    if (out.q == 1) {
      if (!s.is_array() || s.size() != 2) throw InputError("1D seed must be [lo, hi]");
      b.lo = {s[0].get<double>(), 0.0};
      b.hi = {s[1].get<double>(), 0.0};
    } else {
      if (!s.is_array() || s.size() != 2) throw InputError("2D seed must be [[x0,y0],[x1,y1]]");
      b.lo = read_point(s[0], 2, "seed corner");
      b.hi = read_point(s[1], 2, "seed corner");
    }
    out.seeds.push_back(b);
  }
  for (auto it = g.at("maps").begin(); it != g.at("maps").end(); ++it) {
    reject_unknown(*it, {"ratio", "translate", "reflect", "rotate"}, "geometry map " + it.key());
    Similitude f;
    f.ratio = it->at("ratio").get<double>();
    f.t = read_point(it->at("translate"), out.q, "translate of " + it.key());
    const int rot = it->value("rotate", 0);
    if (rot < 0 || rot > 3 || (out.q == 1 && rot != 0)) throw InputError("rotate must be 0..3 (0 in q = 1)");
    f.O = Similitude::orthogonal(rot, it->value("reflect", false));
    out.maps[parse_cell_key(it.key(), N)] = f;
  }
  return out;
}

SystemSpec from_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) throw InputError(origin + ": top level must be an object");
  reject_unknown(doc, {"N", "P", "chi", "ratios", "geometry", "r", "name"}, origin);
  const int N = doc.at("N").get<int>();
  if (N < 1) throw InputError("N must be positive");
  const int m = 2 * N;
  const auto& Pj = doc.at("P");
  if (!Pj.is_array() || static_cast<int>(Pj.size()) != m) throw InputError("P must have 2N rows");
  std::vector<Entry> P, chi;
  bool exact = true;
  for (int a = 0; a < m; ++a) {
    if (!Pj[a].is_array() || static_cast<int>(Pj[a].size()) != m) throw InputError("P must have 2N columns");
    for (int b = 0; b < m; ++b) {
      P.push_back(read_entry(Pj[a][b], "P"));
      exact = exact && P.back().exact;
    }
  }
  const auto& cj = doc.at("chi");
  if (!cj.is_array() || static_cast<int>(cj.size()) != m) throw InputError("chi must have length 2N");
  for (const auto& v : cj) {
    chi.push_back(read_entry(v, "chi"));
    exact = exact && chi.back().exact;
  }
  const double r = doc.value("r", 2.0);
  const std::string name = doc.value("name", origin);

  std::optional<GeometrySpec> geo;
  if (doc.contains("geometry")) geo = read_geometry(doc.at("geometry"), N);

  Mat R = Mat::Zero(N, N);
  if (doc.contains("ratios")) {
    for (auto it = doc.at("ratios").begin(); it != doc.at("ratios").end(); ++it) {
      auto [i, j] = parse_cell_key(it.key(), N);
      R(i, j) = it->get<double>();
    }
  } else if (geo) {
    for (const auto& [cell, f] : geo->maps) R(cell.first, cell.second) = f.ratio;
  } else {
    throw InputError("either ratios or geometry.maps must be given");
  }

  SystemSpec s;
  if (exact) {
    std::vector<Rational> Pq, cq;
    for (const auto& e : P) Pq.push_back(e.q);
    for (const auto& e : chi) cq.push_back(e.q);
    s = make_spec_exact(name, N, std::move(Pq), std::move(cq), R, r);
  } else {
    Mat Pd(m, m);
    Vec cd(m);
    for (int a = 0; a < m; ++a) {
      cd(a) = chi[a].d;
      for (int b = 0; b < m; ++b) Pd(a, b) = P[static_cast<std::size_t>(a) * m + b].d;
    }
    s = make_spec(name, std::move(Pd), std::move(cd), R, r);
  }
  // Entries in ratios for empty cells are a configuration error, not noise.
  for (const auto& c : overlap_cells(s.graph))
    if (c.empty() && R(c.i, c.j) != 0.0)
      throw InputError("ratio given for empty cell (" + std::to_string(c.i + 1) + "," + std::to_string(c.j + 1) + ")");
  if (geo) {
    for (const auto& c : overlap_cells(s.graph)) {
      if (c.empty()) continue;
      auto it = geo->maps.find({c.i, c.j});
      if (it == geo->maps.end())
        throw InputError("geometry lacks a map for cell (" + std::to_string(c.i + 1) + "," + std::to_string(c.j + 1) + ")");
      if (std::abs(it->second.ratio - s.ratio(c.i, c.j)) > 1e-12)
        throw InputError("geometry map ratio disagrees with ratios for cell (" + std::to_string(c.i + 1) + "," +
                         std::to_string(c.j + 1) + ")");
    }
    s.geometry = std::move(geo);
  }
  return s;
}

}  // namespace

SystemSpec load_json_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return from_json(doc, origin);
  } catch (const json::exception& e) {
    throw InputError(origin + ": " + e.what());
  }
}

SystemSpec load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_json_text(ss.str(), path);
}

}  // namespace mtq
