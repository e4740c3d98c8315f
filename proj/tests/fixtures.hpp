#pragma once

// Hand-built fixtures shared by the unit tests and the acceptance binary.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hdbench/dataio/tabular.hpp"
#include "hdbench/random.hpp"

namespace fixture {

// 50 films: 40 rated rows in four blocks and 10 unrated rows interleaved at
// every fifth position. Block means per context value:
//   director  Ava 7.0, Bo 8.5, Cy 5.0
//   writer    Wes 6.0, Xia 8.5, Yul 4.0
//   genre     Drama 5.5, War 8.5, Comedy 4.5
//   actors    Kim 5.5, Lee 7.75, Mo 5.0
//   global    6.125
struct ImputeFixture {
  hdbench::TabularFrame frame;
  std::map<std::size_t, double> expected;  // row -> hand-executed fill
};

inline ImputeFixture impute_fixture() {
  using hdbench::Cell;
  using hdbench::ColumnKind;
  ImputeFixture f{hdbench::TabularFrame(
                      {{"director"}, {"writer"}, {"genre"}, {"actors"}, {"rating", ColumnKind::number}}),
                  {}};
  auto s = [](const char* v) -> Cell { return v ? Cell{std::string(v)} : Cell{}; };

  struct Block {
    const char *director, *writer, *genre, *actors;
    std::vector<double> ratings;
  };
  const std::vector<Block> blocks = {
      {"Ava", "Wes", "Drama", "Kim, Lee", {6, 7, 8, 6, 7, 8, 6, 7, 8, 7}},
      {"Bo", "Xia", "War", "Lee", {8, 8, 8, 8, 8, 9, 9, 9, 9, 9}},
      {"Cy", "Wes", "Comedy", "Mo", {5, 5, 5, 5, 5, 5, 5, 5, 5, 5}},
      {nullptr, "Yul", "Drama, Comedy", "Kim", {4, 4, 4, 4, 4, 4, 4, 4, 4, 4}},
  };
  struct Gap {
    const char *director, *writer, *genre, *actors;
    double fill;
  };
  const std::vector<Gap> gaps = {
      {"Ava", "Xia", "War", "Lee", 7.0},                           // director hit
      {"Bo, Cy", nullptr, nullptr, nullptr, (8.5 + 5.0) / 2},      // multi-valued director
      {"Zed", "Wes", "War", nullptr, 6.0},                         // unseen director, writer hit
      {nullptr, nullptr, "Drama, War", "Mo", (5.5 + 8.5) / 2},     // genre level
      {"Zed", "Qu", "Horror", "Nobody", 6.125},                    // nothing known
      {nullptr, nullptr, nullptr, nullptr, 6.125},                 // nothing present
      {"Zed, Ava", "Yul", nullptr, nullptr, 7.0},                  // one known director value
      {nullptr, "Yul, Xia", "Comedy", nullptr, (4.0 + 8.5) / 2},   // multi-valued writer
      {nullptr, "Qu", "Horror", "Kim, Lee, Mo", (5.5 + 7.75 + 5.0) / 3},
      {"", "Qu", "Comedy, Western", nullptr, 4.5},                 // empty director cell
  };

  std::size_t b = 0, k = 0, g = 0;
  for (std::size_t row = 0; row < 50; ++row) {
    if (row % 5 == 2) {
      const auto& gap = gaps[g++];
      f.frame.add_row({s(gap.director), s(gap.writer), s(gap.genre), s(gap.actors), Cell{}});
      f.expected[row] = gap.fill;
    } else {
      const auto& blk = blocks[b];
      f.frame.add_row({s(blk.director), s(blk.writer), s(blk.genre), s(blk.actors), blk.ratings[k]});
      if (++k == blk.ratings.size()) {
        k = 0;
        ++b;
      }
    }
  }
  return f;
}

// Three concentric shells in 4 dimensions with radii 1, 2 and 3 and radial
// jitter below 0.1, so shells never interleave by distance. Sizes 60, 90
// and 150 make the shells coincide with 2, 3 and 5 of 10 equal rings.
struct Shells {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> shell;
};

inline Shells three_shells(std::uint64_t seed) {
  hdbench::Rng rng(seed);
  Shells out;
  const std::size_t sizes[3] = {60, 90, 150};
  // Build the shells symmetric around the origin so the centroid stays there.
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < sizes[s] / 2; ++i) {
      std::vector<double> dir(4);
      double n2 = 0.0;
      for (auto& v : dir) {
        v = rng.normal();
        n2 += v * v;
      }
      const double radius = static_cast<double>(s + 1) + 0.1 * (rng.uniform() - 0.5);
      for (auto& v : dir) v *= radius / std::sqrt(n2);
      std::vector<double> mirror(4);
      for (int j = 0; j < 4; ++j) mirror[j] = -dir[j];
      out.points.push_back(dir);
      out.points.push_back(mirror);
      out.shell.push_back(s);
      out.shell.push_back(s);
    }
  }
  // Interleave so input order carries no shell information.
  std::vector<std::size_t> perm(out.points.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(std::span<std::size_t>(perm));
  Shells mixed;
  for (auto i : perm) {
    mixed.points.push_back(out.points[i]);
    mixed.shell.push_back(out.shell[i]);
  }
  return mixed;
}

// Rest-Mex polarity distribution: class label -> count.
inline std::vector<int> restmex_polarity_labels() {
  const std::pair<int, std::size_t> counts[] = {{1, 5441}, {2, 5496}, {3, 15519}, {4, 45034}, {5, 136561}};
  std::vector<int> labels;
  for (const auto& [label, n] : counts) labels.insert(labels.end(), n, label);
  return labels;
}

// Twenty one-line film blurbs for the text pipeline.
inline const char* const kFilmBlurbs[20] = {
    "The Dark Knight rises over Gotham city",
    "A quiet drama about family, loss and memory",
    "Space pirates hunt a lost treasure across the galaxy",
    "Romantic comedy set in Paris during the spring festival",
    "Detective hunts a killer in the foggy streets of London",
    "Animated adventure of a brave little robot",
    "Documentary on climate change and melting glaciers",
    "War epic following soldiers through the winter campaign",
    "A heist crew plans one last job in Las Vegas",
    "Horror in an abandoned asylum on a stormy night",
    "Sports drama: an underdog boxer fights for the title",
    "Musical about a young singer chasing fame in New York",
    "Science fiction thriller about time loops and memory",
    "Coming of age story in a small coastal town",
    "Political thriller inside the White House",
    "Fantasy quest to destroy a cursed ring",
    "Biography of a pioneering scientist, 1867-1934",
    "Superhero team assembles to save the city again",
    "Crime saga of a family dynasty in New York",
    "Survival story of astronauts stranded on Mars",
};

}  // namespace fixture
