#pragma once

// JSON encodings of the library's values. Treatments are 1-based in every
// file format.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uslsq/algebra.hpp"
#include "uslsq/canon.hpp"
#include "uslsq/design.hpp"
#include "uslsq/error.hpp"
#include "uslsq/resolution.hpp"
#include "uslsq/spectrum.hpp"
#include "uslsq/square.hpp"

namespace uslsq {

using Json = nlohmann::json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

namespace detail {
template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(std::string("field \"") + key + "\" has the wrong type");
  }
}
}  // namespace detail

inline Json to_json(const LatinSquare& l) { return Json{{"n", l.order()}, {"grid", l.grid()}}; }

inline LatinSquare latin_from_json(const Json& j) {
  auto n = detail::field<int>(j, "n");
  auto grid = detail::field<std::vector<std::vector<int>>>(j, "grid");
  if (static_cast<int>(grid.size()) != n) throw Error("Latin square: grid has " + std::to_string(grid.size()) + " rows, n = " + std::to_string(n));
  return LatinSquare::from_grid(std::move(grid));
}

inline Json to_json(const SemiLatinSquare& s) {
  Json rows = Json::array();
  for (int i = 0; i < s.n(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < s.n(); ++j) row.push_back(s.cell(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"n", s.n()}, {"k", s.k()}, {"cells", std::move(rows)}};
}

/// Parses and validates; structural violations throw SquareValidationError.
inline SemiLatinSquare square_from_json(const Json& j) {
  auto n = detail::field<int>(j, "n");
  auto k = detail::field<int>(j, "k");
  auto grid = detail::field<std::vector<std::vector<std::vector<int>>>>(j, "cells");
  return SemiLatinSquare::validate(n, k, grid);
}

inline Json to_json(const BlockDesign& d) { return Json{{"v", d.v()}, {"blocks", d.blocks()}}; }

inline BlockDesign design_from_json(const Json& j) {
  return BlockDesign(detail::field<int>(j, "v"), detail::field<std::vector<Block>>(j, "blocks"));
}

inline Json to_json(const Resolution& r) { return Json{{"classes", r.classes}}; }

inline Resolution resolution_from_json(const Json& j) {
  Resolution r{detail::field<std::vector<std::vector<Block>>>(j, "classes")};
  r.normalize();
  return r;
}

inline Json to_json(const EtaVector& e) { return Json(e.counts); }

inline Json to_json(const Spectrum& s) {
  Json c = Json::array();
  for (auto [val, m] : s.clusters) c.push_back(Json{{"value", val}, {"multiplicity", m}});
  return Json{{"clusters", c}, {"excludes_trivial_zero", s.excludes_trivial_zero}};
}

/// Integers that fit in 64 bits as JSON numbers, larger ones as decimal strings.
inline Json to_json(const BigInt& x) {
  if (x <= BigInt(std::numeric_limits<std::uint64_t>::max())) return Json(x.convert_to<std::uint64_t>());
  return Json(x.str());
}

inline Json to_json(const DesignParams& p) { return Json{{"v", p.v}, {"b", p.b}, {"r", p.r}, {"k", p.k}}; }

}  // namespace uslsq
