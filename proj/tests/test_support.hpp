#pragma once

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "uslsq/io.hpp"
#include "uslsq/square.hpp"

namespace uslsq::testing {

inline std::string fixture(const std::string& name) { return std::string(USLSQ_FIXTURE_DIR) + "/" + name; }

inline SemiLatinSquare fixture_square(const std::string& name) { return square_from_json(read_json_file(fixture(name))); }

inline SemiLatinSquare square_3x3() { return fixture_square("eq1_3x3_4.json"); }
inline SemiLatinSquare square_m() { return fixture_square("fig1_M_6x6_10.json"); }

inline std::vector<int> random_permutation(int n, std::mt19937& rng, int base = 0) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), base);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Renames treatments (1-based) by a random bijection.
inline BlockDesign relabel(const BlockDesign& d, std::mt19937& rng) {
  auto p = random_permutation(d.v(), rng, 1);
  std::vector<Block> blocks;
  for (const auto& b : d.blocks()) {
    Block nb;
    for (int x : b) nb.push_back(p[x - 1]);
    blocks.push_back(nb);
  }
  std::shuffle(blocks.begin(), blocks.end(), rng);
  return BlockDesign(d.v(), blocks);
}

/// Applies random row, column and treatment permutations and optionally a transpose.
inline SemiLatinSquare scramble(const SemiLatinSquare& s, std::mt19937& rng) {
  int n = s.n();
  auto rows = random_permutation(n, rng), cols = random_permutation(n, rng);
  auto names = random_permutation(s.treatments(), rng, 1);
  bool t = rng() & 1;
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> c;
      for (int x : s.cell(i, j)) c.push_back(names[x - 1]);
      int a = rows[i], b = cols[j];
      if (t) std::swap(a, b);
      cells[static_cast<std::size_t>(a) * n + b] = c;
    }
  return SemiLatinSquare::validate(n, s.k(), cells);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("uslsq_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace uslsq::testing
