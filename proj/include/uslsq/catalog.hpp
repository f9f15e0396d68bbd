#pragma once

// On-disk classification runs: resumable checkpoints, per-class square files,
// an index and a manifest.
//
// Directory layout:
//   checkpoint.jsonl   header line {"format":"uslsq-checkpoint","version":1,
//                      "n":..,"mu":..,"seeds":t}, then one line per completed
//                      seed {"seed":i,"solutions":c,"seconds":x,"classes":[..]}
//                      where each class is a canonical solution written as
//                      [[block, multiplicity], ...]; blocks index the
//                      lexicographic list of permutations of 0..n-1.
//   index.json         classes sorted by (eta, certificate)
//   manifest.json      run parameters, counts, timings and class statistics
//   squares/class_NNNNN.json   one square per class, in the square format
//
// A run may be split with a seed range and resumed after interruption; the
// final files are written once every seed index has a checkpoint line.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uslsq/classify.hpp"
#include "uslsq/io.hpp"

namespace uslsq {

namespace fs = std::filesystem;

struct RunOptions {
  int workers = 1;
  // Half-open range of seed indices to process in this invocation.
  std::optional<std::pair<std::size_t, std::size_t>> seed_range;
};

struct RunStatus {
  std::size_t seeds = 0;
  std::size_t completed = 0;
  std::uint64_t solutions = 0;
  bool complete = false;
};

/// Parses "a..b" (half-open).
inline std::pair<std::size_t, std::size_t> parse_seed_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) throw Error("seed range must look like a..b, got \"" + text + "\"");
  try {
    std::size_t used = 0;
    auto a = std::stoull(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(text);
    auto rest = text.substr(dots + 2);
    auto b = std::stoull(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    if (a > b) throw Error("seed range " + text + " is empty");
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error("seed range must look like a..b, got \"" + text + "\"");
  }
}

inline Json to_json(const PartialSolution& s) {
  Json a = Json::array();
  for (auto [b, m] : s) a.push_back(Json::array({b, m}));
  return a;
}

inline PartialSolution solution_from_json(const Json& j) {
  PartialSolution s;
  for (const auto& p : j) s.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  return s;
}

namespace detail {

struct Checkpoint {
  int n = 0, mu = 0;
  std::size_t seeds = 0;
  std::map<std::size_t, std::uint64_t> solutions;
  std::map<std::size_t, double> seconds;
  std::set<PartialSolution> classes;
  std::vector<std::string> lines;  // valid lines, header first
  bool torn = false;
};

inline Json checkpoint_header(int n, int mu, std::size_t seeds) {
  return Json{{"format", "uslsq-checkpoint"}, {"version", 1}, {"n", n}, {"mu", mu}, {"seeds", seeds}};
}

/// Reads a checkpoint; a torn final line (interrupted write) is dropped.
inline std::optional<Checkpoint> read_checkpoint(const fs::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) return std::nullopt;
  Checkpoint cp;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Json j;
    try {
      j = Json::parse(lines[i]);
    } catch (const Json::exception&) {
      if (i + 1 == lines.size() && i > 0) {
        cp.torn = true;
        break;
      }
      throw Error("corrupt checkpoint line " + std::to_string(i + 1) + " in " + file.string());
    }
    cp.lines.push_back(lines[i]);
    if (i == 0) {
      if (!j.is_object() || j.value("format", "") != "uslsq-checkpoint")
        throw Error(file.string() + " is not a classification checkpoint");
      cp.n = j.at("n").get<int>();
      cp.mu = j.at("mu").get<int>();
      cp.seeds = j.at("seeds").get<std::size_t>();
      continue;
    }
    auto seed = j.at("seed").get<std::size_t>();
    cp.solutions[seed] = j.at("solutions").get<std::uint64_t>();
    cp.seconds[seed] = j.value("seconds", 0.0);
    for (const auto& c : j.at("classes")) cp.classes.insert(solution_from_json(c));
  }
  return cp;
}

inline std::string class_file(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "squares/class_%05zu.json", id);
  return buf;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Summary statistics over a class list.
inline Json class_statistics(const std::vector<ClassRecord>& records) {
  std::size_t nontrivial_dual = 0, max_conc_le2 = 0, top_pair = 0, transposing = 0;
  for (const auto& r : records) {
    nontrivial_dual += r.aut_dual > 1;
    transposing += r.transposing;
    const auto& c = r.eta.counts;
    bool le2 = true;
    for (std::size_t i = 3; i < c.size(); ++i) le2 = le2 && c[i] == 0;
    max_conc_le2 += le2;
    top_pair += !c.empty() && c.back() >= 1;
  }
  return Json{{"nontrivial_dual_automorphism", nontrivial_dual},
              {"max_concurrence_at_most_2", max_conc_le2},
              {"pair_with_concurrence_n", top_pair},
              {"row_column_interchanging_automorphism", transposing}};
}

inline Json to_json(const ClassRecord& r, std::size_t id) {
  return Json{{"id", id},
              {"eta", to_json(r.eta)},
              {"aut_square", to_json(r.aut_square)},
              {"aut_dual", to_json(r.aut_dual)},
              {"transposing", r.transposing},
              {"certificate", r.certificate},
              {"file", detail::class_file(id)}};
}

/// Writes index.json, manifest.json and squares/ from a complete checkpoint.
inline void finalize_classification(const fs::path& dir, const ClassifyContext& ctx, const detail::Checkpoint& cp,
                                    double wall_seconds, int workers) {
  auto records = build_records(ctx, cp.classes);
  fs::create_directories(dir / "squares");
  Json index = Json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto entry = to_json(records[i], i + 1);
    auto sq = to_json(records[i].square);
    sq["class"] = i + 1;
    sq["blocks"] = to_json(records[i].solution);
    write_text_file((dir / detail::class_file(i + 1)).string(), detail::dump(sq));
    index.push_back(std::move(entry));
  }
  std::uint64_t solutions = 0;
  double seed_seconds = 0;
  for (auto [s, c] : cp.solutions) solutions += c;
  for (auto [s, t] : cp.seconds) seed_seconds += t;
  write_text_file((dir / "index.json").string(),
                  detail::dump(Json{{"n", ctx.n()}, {"mu", ctx.mu()}, {"classes", index}}));
  Json manifest{{"n", ctx.n()},
                {"mu", ctx.mu()},
                {"k", ctx.mu() * (ctx.n() - 1)},
                {"seed_count", cp.seeds},
                {"solution_count", solutions},
                {"class_count", records.size()},
                {"wall_seconds", wall_seconds},
                {"seed_seconds", seed_seconds},
                {"workers", workers},
                {"complete", true},
                {"statistics", class_statistics(records)}};
  write_text_file((dir / "manifest.json").string(), detail::dump(manifest));
}

/// Runs (or resumes) a classification into dir. Seeds already recorded in the
/// checkpoint are skipped. Once all seeds are done the catalog files are
/// written.
inline RunStatus run_classification(const fs::path& dir, int n, int mu, const RunOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  ClassifyContext ctx(n, mu);
  auto seeds = seed_phase(ctx);
  fs::create_directories(dir);
  auto file = dir / "checkpoint.jsonl";
  auto loaded = detail::read_checkpoint(file);
  detail::Checkpoint cp;
  if (loaded) {
    cp = std::move(*loaded);
    if (cp.n != n || cp.mu != mu || cp.seeds != seeds.size())
      throw Error("checkpoint in " + dir.string() + " belongs to a different run (n=" + std::to_string(cp.n) +
                  ", mu=" + std::to_string(cp.mu) + ", " + std::to_string(cp.seeds) + " seeds)");
  } else {
    cp.n = n;
    cp.mu = mu;
    cp.seeds = seeds.size();
  }
  if (!loaded || cp.torn) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    if (loaded)
      for (const auto& line : cp.lines) out << line << "\n";
    else
      out << detail::checkpoint_header(n, mu, seeds.size()).dump() << "\n";
  }

  std::size_t first = 0, last = seeds.size();
  if (opt.seed_range) {
    first = std::min(opt.seed_range->first, seeds.size());
    last = std::min(opt.seed_range->second, seeds.size());
  }
  std::ofstream out(file, std::ios::app);
  if (!out) throw Error("cannot append to " + file.string());
  run_seeds(
      ctx, seeds, first, last, opt.workers,
      [&](std::size_t i, SeedResult&& r) {
        Json line{{"seed", i}, {"solutions", r.solutions}, {"seconds", r.seconds}, {"classes", Json::array()}};
        for (const auto& c : r.classes)
          if (!cp.classes.count(c)) line["classes"].push_back(to_json(c));
        out << line.dump() << "\n" << std::flush;
        cp.solutions[i] = r.solutions;
        cp.seconds[i] = r.seconds;
        cp.classes.merge(r.classes);
      },
      [&](std::size_t i) { return cp.solutions.count(i) > 0; });
  out.close();

  RunStatus st;
  st.seeds = seeds.size();
  st.completed = cp.solutions.size();
  for (auto [s, c] : cp.solutions) st.solutions += c;
  st.complete = st.completed == st.seeds;
  if (st.complete) {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finalize_classification(dir, ctx, cp, wall, opt.workers);
  }
  return st;
}

/// Loads a finished run's manifest and index; errors on a missing, empty or
/// incomplete directory.
inline std::pair<Json, Json> load_catalog(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  if (fs::is_empty(dir)) throw Error(dir.string() + " is empty; run classify first");
  auto cp = detail::read_checkpoint(dir / "checkpoint.jsonl");
  if (!cp) throw Error("no checkpoint in " + dir.string());
  if (cp->solutions.size() != cp->seeds) {
    std::size_t missing = 0;
    for (std::size_t i = 0; i < cp->seeds; ++i) missing += cp->solutions.count(i) == 0;
    throw Error("classification in " + dir.string() + " is incomplete: " + std::to_string(missing) + " of " +
                std::to_string(cp->seeds) + " seeds have no checkpoint entry");
  }
  if (!fs::exists(dir / "manifest.json") || !fs::exists(dir / "index.json"))
    throw Error("classification in " + dir.string() + " has no manifest; rerun classify to finalize");
  return {read_json_file((dir / "manifest.json").string()), read_json_file((dir / "index.json").string())};
}

}  // namespace uslsq
