// uslsq: construct, verify, transform and classify semi-Latin squares.
//
// Exit status: 0 success, 1 verification failure, 2 input or parameter error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uslsq/algebra.hpp"
#include "uslsq/catalog.hpp"
#include "uslsq/classify.hpp"
#include "uslsq/derived.hpp"
#include "uslsq/design.hpp"
#include "uslsq/io.hpp"
#include "uslsq/isomorph.hpp"
#include "uslsq/oa.hpp"
#include "uslsq/resolution.hpp"
#include "uslsq/spectrum.hpp"
#include "uslsq/square.hpp"

namespace {

using namespace uslsq;

struct Outcome {
  Json result = Json::object();
  bool passed = true;
};

// ---- text rendering -------------------------------------------------------

std::string inline_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    bool flat = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
    if (!flat) return v.dump();
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + inline_value(v[i]);
    return s + ")";
  }
  if (v.is_object()) {
    std::string s;
    for (auto it = v.begin(); it != v.end(); ++it) s += (s.empty() ? "" : " ") + it.key() + "=" + inline_value(*it);
    return s;
  }
  return v.dump();
}

void render(const std::string& prefix, const Json& v, std::ostream& os) {
  for (auto it = v.begin(); it != v.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const Json& x = *it;
    if (x.is_object() && !x.empty()) {
      render(key, x, os);
    } else if (x.is_array() && !x.empty() && (x.front().is_object() || x.front().is_string())) {
      os << key << ":\n";
      for (const auto& e : x) os << "  - " << inline_value(e) << "\n";
    } else {
      os << key << ": " << inline_value(x) << "\n";
    }
  }
}

// ---- input helpers --------------------------------------------------------

enum class Kind { kSquare, kDesign, kLatin, kMols };

Kind kind_of(const Json& j, const std::string& path) {
  if (j.is_object()) {
    if (j.contains("cells")) return Kind::kSquare;
    if (j.contains("blocks")) return Kind::kDesign;
    if (j.contains("grid")) return Kind::kLatin;
    if (j.contains("squares")) return Kind::kMols;
  }
  throw Error(path + ": not a square, design, Latin square or MOLS file");
}

SemiLatinSquare load_square(const std::string& path) {
  auto j = read_json_file(path);
  switch (kind_of(j, path)) {
    case Kind::kSquare:
      return square_from_json(j);
    case Kind::kLatin:
      return SemiLatinSquare::from_latin(latin_from_json(j));
    default:
      throw Error(path + ": expected a semi-Latin square");
  }
}

std::vector<LatinSquare> load_mols(const std::string& path) {
  auto j = read_json_file(path);
  if (kind_of(j, path) != Kind::kMols) throw Error(path + ": expected a MOLS file");
  std::vector<LatinSquare> out;
  for (const auto& l : j.at("squares")) out.push_back(latin_from_json(l));
  return out;
}

// Square files give their underlying design; design files give themselves.
BlockDesign load_design(const std::string& path, bool* was_square = nullptr) {
  auto j = read_json_file(path);
  auto k = kind_of(j, path);
  if (was_square) *was_square = k != Kind::kDesign;
  if (k == Kind::kDesign) return design_from_json(j);
  return underlying_design(load_square(path));
}

Json params_json(const BlockDesign& d) {
  auto p = d.params();
  if (!p) return Json{{"v", d.v()}, {"b", d.b()}};
  return to_json(*p);
}

Json square_summary(const SemiLatinSquare& s) {
  Json r{{"n", s.n()}, {"k", s.k()}, {"treatments", s.treatments()}};
  if (s.n() > 2) {
    auto u = uniformity(s);
    r["uniform"] = u.uniform;
    if (u.uniform) r["mu"] = u.mu;
  }
  r["eta"] = to_json(eta(underlying_design(s)));
  return r;
}

void write_json_out(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

// Stores `value` in the result, or writes it to `out` and records the path.
void emit(Outcome& o, const std::string& out, const char* key, const Json& value) {
  if (out.empty()) {
    o.result[key] = value;
  } else {
    write_json_out(out, value);
    o.result["file"] = out;
  }
}

Json design_with_resolution(const BlockDesign& d, const Resolution& res) {
  auto j = to_json(d);
  j["resolution"] = to_json(res);
  return j;
}

Json cell_pair_json(const CellPair& c) {
  return Json{{"cell1", {c.row1 + 1, c.col1 + 1}}, {"cell2", {c.row2 + 1, c.col2 + 1}}, {"intersection", c.intersection}};
}

const char* violation_kind(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::kCellSize: return "cell_size";
    case Violation::Kind::kOutOfRange: return "out_of_range";
    case Violation::Kind::kRepeatedInRow: return "repeated_in_row";
    case Violation::Kind::kMissingFromRow: return "missing_from_row";
    case Violation::Kind::kRepeatedInColumn: return "repeated_in_column";
    case Violation::Kind::kMissingFromColumn: return "missing_from_column";
  }
  return "unknown";
}

int default_workers() {
  if (const char* w = std::getenv("USLSQ_WORKERS")) {
    try {
      int n = std::stoi(w);
      if (n >= 1) return n;
    } catch (const std::logic_error&) {
    }
    throw Error(std::string("USLSQ_WORKERS must be a positive integer, got \"") + w + "\"");
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Latin squares: construction, verification, derived designs and classification", "uslsq"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "print the report as JSON");

  std::map<CLI::App*, std::function<Outcome()>> handlers;
  std::string out, in, in2, axis = "d1";
  int q = 0, s = 0, n = 0, mu = 0, workers = 0;
  std::string seed_range;
  std::vector<std::string> inputs;
  bool full = false;

  auto* field = app.add_subcommand("field", "finite field GF(q) tables");
  field->add_option("--q", q, "field order (prime power)")->required();
  handlers[field] = [&] {
    auto f = finite_field(q);
    Json add = Json::array(), mul = Json::array();
    for (int a = 0; a < q; ++a) {
      Json ra = Json::array(), rm = Json::array();
      for (int b = 0; b < q; ++b) {
        ra.push_back(f.add(a, b));
        rm.push_back(f.mul(a, b));
      }
      add.push_back(ra);
      mul.push_back(rm);
    }
    Outcome o;
    o.result = Json{{"q", q},          {"characteristic", f.characteristic()}, {"degree", f.degree()},
                    {"modulus", f.modulus()}, {"addition", add},                 {"multiplication", mul}};
    return o;
  };

  auto* mols = app.add_subcommand("mols", "Bose construction of q-1 MOLS of order q");
  mols->add_option("--q", q, "order (prime power >= 3)")->required();
  mols->add_option("--out", out, "write the squares to this file");
  handlers[mols] = [&] {
    auto ls = bose_mols(q);
    bool orth = true;
    for (std::size_t a = 0; a < ls.size(); ++a)
      for (std::size_t b = a + 1; b < ls.size(); ++b) orth = orth && are_orthogonal(ls[a], ls[b]);
    Json sq = Json::array();
    for (const auto& l : ls) sq.push_back(to_json(l));
    Outcome o;
    o.result = Json{{"q", q}, {"count", ls.size()}, {"pairwise_orthogonal", orth}};
    emit(o, out, "squares", Json{{"q", q}, {"squares", sq}});
    return o;
  };

  auto* construct = app.add_subcommand("construct", "build a semi-Latin square");
  construct->require_subcommand(1);
  auto* superpose_cmd = construct->add_subcommand("superpose", "superpose squares with disjoint treatment sets");
  superpose_cmd->add_option("inputs", inputs, "square, Latin square or MOLS files")->required();
  superpose_cmd->add_option("--out", out, "output square file");
  handlers[superpose_cmd] = [&] {
    std::vector<SemiLatinSquare> parts;
    for (const auto& path : inputs) {
      auto j = read_json_file(path);
      if (kind_of(j, path) == Kind::kMols) {
        for (const auto& l : load_mols(path)) parts.push_back(SemiLatinSquare::from_latin(l));
      } else {
        parts.push_back(load_square(path));
      }
    }
    auto sq = superpose(parts);
    Outcome o;
    o.result = square_summary(sq);
    emit(o, out, "square", to_json(sq));
    return o;
  };
  auto* inflate_cmd = construct->add_subcommand("inflate", "replace each treatment by s treatments");
  inflate_cmd->add_option("input", in, "square file")->required();
  inflate_cmd->add_option("--s", s, "inflation factor")->required();
  inflate_cmd->add_option("--out", out, "output square file");
  handlers[inflate_cmd] = [&] {
    if (s < 1) throw Error("inflation factor must be >= 1, got " + std::to_string(s));
    auto sq = inflate(load_square(in), s);
    Outcome o;
    o.result = square_summary(sq);
    emit(o, out, "square", to_json(sq));
    return o;
  };
  auto* bars_cmd = construct->add_subcommand("bars", "((n+1)x(n+1))/(n(n-2)) square from n-1 MOLS of order n");
  bars_cmd->add_option("--n", n, "order; uses the Bose MOLS of order n");
  bars_cmd->add_option("--mols", in, "MOLS file to use instead");
  bars_cmd->add_option("--out", out, "output square file");
  handlers[bars_cmd] = [&] {
    if (in.empty() && n == 0) throw Error("construct bars needs --n or --mols");
    auto ls = in.empty() ? bose_mols(n) : load_mols(in);
    auto sq = bar_s(ls);
    Outcome o;
    o.result = square_summary(sq);
    emit(o, out, "square", to_json(sq));
    return o;
  };

  auto* verify = app.add_subcommand("verify", "validate a square (structure and uniformity) or a design");
  verify->add_option("input", in, "square or design file")->required();
  handlers[verify] = [&] {
    Outcome o;
    auto j = read_json_file(in);
    if (kind_of(j, in) == Kind::kDesign) {
      auto d = design_from_json(j);
      o.result = params_json(d);
      o.result["regular"] = d.params().has_value();
      o.passed = d.params().has_value();
      if (auto l = is_bibd(d)) o.result["bibd_lambda"] = *l;
      return o;
    }
    std::optional<SemiLatinSquare> sq;
    try {
      sq = kind_of(j, in) == Kind::kLatin ? SemiLatinSquare::from_latin(latin_from_json(j)) : square_from_json(j);
    } catch (const SquareValidationError& e) {
      Json v = Json::array();
      for (const auto& x : e.violations())
        v.push_back(Json{{"kind", violation_kind(x.kind)},
                         {"treatment", x.treatment},
                         {"row", x.row},
                         {"column", x.column},
                         {"message", x.describe()}});
      o.result = Json{{"valid", false}, {"violations", v}};
      o.passed = false;
      return o;
    }
    o.result = Json{{"valid", true}};
    o.result.update(square_summary(*sq));
    if (sq->n() <= 2) return o;
    auto u = uniformity(*sq);
    if (u.uniform) {
      auto d = underlying_design(*sq);
      auto p = d.require_params("verify");
      o.result["eta0_lower_bound"] = to_string(eta0_lower_bound(p.v, p.b, p.r, p.k, u.mu));
    } else {
      o.passed = false;
      if (u.reference) o.result["reference"] = cell_pair_json(*u.reference);
      if (u.witness) o.result["witness"] = cell_pair_json(*u.witness);
    }
    return o;
  };

  auto* eta_cmd = app.add_subcommand("eta", "concurrence census (eta vector) of a design or a square's underlying design");
  eta_cmd->add_option("input", in, "square or design file")->required();
  handlers[eta_cmd] = [&] {
    bool sq = false;
    auto d = load_design(in, &sq);
    auto p = d.require_params("eta");
    Outcome o;
    o.result = to_json(p);
    o.result["eta"] = to_json(eta(d));
    if (sq) {
      auto square = load_square(in);
      if (square.n() > 2) {
        auto u = uniformity(square);
        if (u.uniform) o.result["eta0_lower_bound"] = to_string(eta0_lower_bound(p.v, p.b, p.r, p.k, u.mu));
      }
    }
    return o;
  };

  auto* spectrum_cmd = app.add_subcommand("spectrum", "canonical efficiency factors");
  spectrum_cmd->add_option("input", in, "square or design file")->required();
  spectrum_cmd->add_flag("--full", full, "include the zero eigenvalue of the all-one vector");
  handlers[spectrum_cmd] = [&] {
    auto d = load_design(in);
    auto p = d.require_params("spectrum");
    Spectrum sp;
    if (full) {
      sp = cluster_eigenvalues(sym_eig(scaled_information_matrix(d), static_cast<std::size_t>(d.v())), false);
    } else {
      sp = canonical_efficiency_factors(d);
    }
    double trace = 0;
    for (auto& [v, m] : sp.clusters) {
      trace += v * m;
      v = std::round(v * 1e10) / 1e10;
    }
    trace = std::round(trace * 1e10) / 1e10;
    Outcome o;
    o.result = to_json(p);
    o.result["spectrum"] = to_json(sp);
    o.result["trace"] = trace;
    return o;
  };

  auto* dual_cmd = app.add_subcommand("dual", "dual design (cells of a square, or points/blocks swapped)");
  dual_cmd->add_option("input", in, "square or design file")->required();
  dual_cmd->add_option("--out", out, "output design file");
  handlers[dual_cmd] = [&] {
    auto j = read_json_file(in);
    auto d = kind_of(j, in) == Kind::kDesign ? design_dual(design_from_json(j)) : dual(load_square(in));
    Outcome o;
    o.result = params_json(d);
    emit(o, out, "design", to_json(d));
    return o;
  };

  auto* under_cmd = app.add_subcommand("underlying", "underlying block design of a square");
  under_cmd->add_option("input", in, "square file")->required();
  under_cmd->add_option("--out", out, "output design file");
  handlers[under_cmd] = [&] {
    auto d = underlying_design(load_square(in));
    Outcome o;
    o.result = params_json(d);
    emit(o, out, "design", to_json(d));
    return o;
  };

  auto* derive = app.add_subcommand("derive", "derived designs of a uniform square");
  derive->add_option("which", axis, "d1, d2 or d3")->required()->check(CLI::IsMember({"d1", "d2", "d3"}));
  derive->add_option("input", in, "uniform square file")->required();
  derive->add_option("--out", out, "output design file");
  handlers[derive] = [&] {
    auto sq = load_square(in);
    Outcome o;
    if (axis == "d3") {
      auto d = delta3(sq);
      o.result = params_json(d);
      if (auto l = is_bibd(d)) o.result["bibd_lambda"] = *l;
      emit(o, out, "design", to_json(d));
      return o;
    }
    auto ax = axis == "d1" ? Axis::kRows : Axis::kColumns;
    auto d = delta12(sq, ax);
    auto res = delta12_resolution(sq, ax);
    o.result = params_json(d);
    if (auto m = is_affine_resolvable(d, res)) o.result["affine_mu"] = *m;
    emit(o, out, "design", design_with_resolution(d, res));
    return o;
  };

  auto* to_oa = app.add_subcommand("to-oa", "orthogonal array of an affine resolvable design");
  to_oa->add_option("input", in, "design file (a \"resolution\" field is used when present)")->required();
  to_oa->add_option("--out", out, "output OA text file");
  handlers[to_oa] = [&] {
    auto j = read_json_file(in);
    if (kind_of(j, in) != Kind::kDesign) throw Error(in + ": expected a design");
    auto d = design_from_json(j);
    std::optional<Resolution> res;
    if (j.contains("resolution")) {
      res = resolution_from_json(j.at("resolution"));
      check_resolution(d, *res);
    } else {
      res = find_resolution(d);
      if (!res) throw ValidationError("to-oa: design is not resolvable");
    }
    auto oa = to_orthogonal_array(d, *res);
    Outcome o;
    o.result = Json{{"N", oa.rows}, {"r", oa.columns}, {"s", oa.symbols}, {"strength", oa_strength(oa)}};
    std::ostringstream text;
    write_oa(text, oa);
    if (out.empty()) {
      o.result["array"] = oa.entries;
    } else {
      write_text_file(out, text.str());
      o.result["file"] = out;
    }
    return o;
  };

  auto* oa_strength_cmd = app.add_subcommand("oa-strength", "strength of an orthogonal array (text \"N r s\" format)");
  oa_strength_cmd->add_option("input", in, "OA text file")->required();
  handlers[oa_strength_cmd] = [&] {
    std::ifstream f(in);
    if (!f) throw Error("cannot read " + in);
    auto oa = read_oa(f);
    Outcome o;
    o.result = Json{{"N", oa.rows}, {"r", oa.columns}, {"s", oa.symbols}, {"strength", oa_strength(oa)}};
    return o;
  };

  auto* resolve = app.add_subcommand("resolve", "search for a resolution of a design");
  resolve->add_option("input", in, "square or design file")->required();
  resolve->add_option("--out", out, "write the resolution here");
  handlers[resolve] = [&] {
    auto d = load_design(in);
    auto res = find_resolution(d);
    Outcome o;
    o.result = params_json(d);
    o.result["resolvable"] = res.has_value();
    if (res) {
      o.result["parallel_classes"] = res->classes.size();
      auto m = is_affine_resolvable(d, *res);
      o.result["affine_resolvable"] = m.has_value();
      if (m) o.result["affine_mu"] = *m;
      if (!out.empty()) {
        write_json_out(out, to_json(*res));
        o.result["file"] = out;
      }
    }
    return o;
  };

  auto* iso = app.add_subcommand("iso", "isomorphism test for two squares or two designs");
  iso->add_option("first", in, "square or design file")->required();
  iso->add_option("second", in2, "square or design file")->required();
  handlers[iso] = [&] {
    auto a = read_json_file(in), b = read_json_file(in2);
    auto ka = kind_of(a, in), kb = kind_of(b, in2);
    Outcome o;
    if (ka == Kind::kDesign && kb == Kind::kDesign) {
      o.result = Json{{"kind", "design"}, {"isomorphic", designs_are_isomorphic(design_from_json(a), design_from_json(b))}};
    } else if (ka != Kind::kDesign && kb != Kind::kDesign) {
      o.result = Json{{"kind", "square"}, {"isomorphic", sls_are_isomorphic(load_square(in), load_square(in2))}};
    } else {
      throw Error("iso: cannot compare a square with a design");
    }
    return o;
  };

  auto* aut = app.add_subcommand("aut", "automorphism group order");
  aut->add_option("input", in, "square or design file")->required();
  handlers[aut] = [&] {
    auto j = read_json_file(in);
    Outcome o;
    if (kind_of(j, in) == Kind::kDesign) {
      o.result = Json{{"kind", "design"}, {"aut_order", to_json(aut_order(design_from_json(j)))}};
    } else {
      auto sq = load_square(in);
      o.result = Json{{"kind", "square"}, {"aut_order", to_json(aut_order(sq))}, {"aut_dual", to_json(aut_order(dual(sq)))}};
    }
    return o;
  };

  auto* cert = app.add_subcommand("cert", "canonical certificate");
  cert->add_option("input", in, "square or design file")->required();
  handlers[cert] = [&] {
    auto j = read_json_file(in);
    bool design = kind_of(j, in) == Kind::kDesign;
    auto c = design ? design_certificate(design_from_json(j)) : square_certificate(load_square(in));
    Outcome o;
    o.result = Json{{"kind", design ? "design" : "square"}, {"certificate", c.hex()}, {"aut_order", to_json(c.aut_order)}};
    return o;
  };

  auto* classify = app.add_subcommand("classify", "classify uniform (n x n)/(mu(n-1)) squares into a directory");
  classify->add_option("--n", n, "side")->required();
  classify->add_option("--mu", mu, "uniformity")->required();
  classify->add_option("--out", out, "output directory")->required();
  classify->add_option("--workers", workers, "worker threads (default USLSQ_WORKERS or 1)");
  classify->add_option("--seed-range", seed_range, "process only seeds a..b (half-open)");
  handlers[classify] = [&] {
    if (n < 3 || mu < 1) throw Error("classify needs --n >= 3 and --mu >= 1");
    RunOptions opt;
    opt.workers = workers > 0 ? workers : default_workers();
    if (!seed_range.empty()) opt.seed_range = parse_seed_range(seed_range);
    auto st = run_classification(out, n, mu, opt);
    Outcome o;
    o.result = Json{{"n", n},           {"mu", mu},         {"directory", out},
                    {"seeds", st.seeds}, {"completed_seeds", st.completed}, {"solutions", st.solutions},
                    {"complete", st.complete}};
    if (st.complete) {
      auto manifest = read_json_file((std::filesystem::path(out) / "manifest.json").string());
      o.result["classes"] = manifest.at("class_count");
    }
    return o;
  };

  auto* catalog = app.add_subcommand("catalog", "summarise a finished classification directory");
  catalog->add_option("directory", in, "classification output directory")->required();
  handlers[catalog] = [&] {
    auto [manifest, index] = load_catalog(in);
    const auto& classes = index.at("classes");
    Outcome o;
    std::size_t count = classes.size();
    o.result = Json{{"n", manifest.at("n")},
                    {"mu", manifest.at("mu")},
                    {"summary", std::to_string(count) + (count == 1 ? " class" : " classes")},
                    {"class_count", count},
                    {"seed_count", manifest.at("seed_count")},
                    {"solution_count", manifest.at("solution_count")},
                    {"statistics", manifest.at("statistics")}};
    if (count > 0) {
      o.result["eta_min"] = classes.front().at("eta");
      if (count > 1) o.result["eta_next"] = classes.at(1).at("eta");
      o.result["eta_worst"] = classes.back().at("eta");
      auto sq = load_square((std::filesystem::path(in) / classes.front().at("file").get<std::string>()).string());
      Json derived = Json::array();
      auto d1 = delta12(sq, Axis::kRows);
      auto res = delta12_resolution(sq, Axis::kRows);
      std::string line = "delta1/delta2: " + to_string(d1.require_params("catalog")) + "-design";
      if (is_affine_resolvable(d1, res)) line += ", affine resolvable";
      derived.push_back(line);
      auto d3 = delta3(sq);
      auto p3 = d3.require_params("catalog");
      if (auto l = is_bibd(d3))
        derived.push_back("delta3: (" + std::to_string(p3.v) + "," + std::to_string(p3.b) + "," + std::to_string(p3.r) +
                          "," + std::to_string(p3.k) + "," + std::to_string(*l) + ")-BIBD");
      else
        derived.push_back("delta3: " + to_string(p3) + "-design");
      o.result["derived"] = derived;
    }
    Json rows = Json::array();
    for (const auto& c : classes)
      rows.push_back(Json{{"id", c.at("id")},
                          {"eta", c.at("eta")},
                          {"aut_square", c.at("aut_square")},
                          {"aut_dual", c.at("aut_dual")}});
    o.result["classes"] = rows;
    return o;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* chosen = nullptr;
  std::string command;
  for (auto* sub = app.get_subcommands().front(); sub;) {
    command += (command.empty() ? "" : " ") + sub->get_name();
    chosen = sub;
    auto subs = sub->get_subcommands();
    sub = subs.empty() ? nullptr : subs.front();
  }

  Json report{{"command", command}};
  int status = 0;
  try {
    auto o = handlers.at(chosen)();
    report["status"] = o.passed ? "ok" : "failed";
    report["result"] = std::move(o.result);
    status = o.passed ? 0 : 1;
  } catch (const ValidationError& e) {
    report["status"] = "failed";
    report["error"] = e.what();
    status = 1;
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = e.what();
    status = 2;
  }

  if (json) {
    std::cout << report.dump(2) << "\n";
  } else if (report.contains("error")) {
    std::cerr << "uslsq " << command << ": " << report["error"].get<std::string>() << "\n";
  } else {
    render("", report, std::cout);
  }
  return status;
}
