// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bmx/grouped_tsp.hpp"

using namespace bmx;
using doctest::Approx;

namespace {

struct Raw {
  std::vector<double> a2g, g2h;
  SquareMatrix g2g;
  double a2h = 0.0;
};

Raw random_points(std::mt19937& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 20.0);
  std::vector<Vec3> pts(k + 2);
  for (auto& p : pts) p = {u(rng), u(rng), 0.0};
  Raw r;
  r.g2g = SquareMatrix(k, kInf);
  for (int i = 0; i < k; ++i) {
    r.a2g.push_back(distance(pts[0], pts[i + 1]));
    r.g2h.push_back(distance(pts[i + 1], pts[k + 1]));
    for (int j = 0; j < k; ++j)
      // Mild asymmetry keeps the instance a genuine ATSP.
      if (i != j) r.g2g(i, j) = distance(pts[i + 1], pts[j + 1]) * (i < j ? 1.0 : 1.1);
  }
  r.a2h = distance(pts[0], pts[k + 1]);
  return r;
}

GuidanceInstance instance_of(const Raw& r) { return assemble_matrix(r.a2g, r.g2g, r.g2h, r.a2h); }

// Brute force over all visiting orders of the groups.
double brute_force(const GuidanceInstance& inst) {
  const int k = inst.group_count();
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 1);
  double best = kInf;
  do {
    double c = 0.0;
    int prev = 0;
    for (int g : perm) {
      c += inst.cost(prev, g);
      prev = g;
    }
    c += inst.cost(prev, inst.home());
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double tour_cost(const GuidanceInstance& inst, const GuidanceTour& t) {
  double c = 0.0;
  int prev = 0;
  for (int g : t.order) {
    c += inst.cost(prev, g + 1);
    prev = g + 1;
  }
  return c + inst.cost(prev, inst.home());
}

}  // namespace

TEST_CASE("matrix structure") {
  const std::vector<Pose> groups{{{1, 0, 0}, 0.0}, {{2, 0, 0}, 0.0}};
  const GuidanceInstance inst =
      build_matrix({{0, 0, 0}, 0.0}, groups, {3, 0, 0}, CostParams{}, straight_line_length);
  const int n = inst.cost.size();
  REQUIRE(n == 4);
  CHECK(inst.cost(n - 1, 0) == 0.0);
  for (int i = 0; i < n; ++i) {
    CHECK(inst.cost(i, i) == kInf);
    if (i != n - 1) CHECK(inst.cost(i, 0) == kInf);
    if (i != 0) CHECK(inst.cost(n - 1, i) == kInf);
  }
  CHECK(inst.cost(0, 1) == Approx(1.0 / 0.75));
  CHECK(inst.cost(1, 2) == Approx(1.0 / 0.75));
  CHECK(inst.cost(0, n - 1) == Approx(3.0 / 0.75));
}

TEST_CASE("zero groups: start straight to home") {
  const GuidanceInstance inst = build_matrix({{0, 0, 0}, 0.0}, {}, {2, 0, 0}, CostParams{}, straight_line_length);
  CHECK(inst.cost.size() == 2);
  const GuidanceTour t = solve(inst);
  CHECK(t.order.empty());
  CHECK(t.total_time == Approx(2.0 / 0.75));
}

TEST_CASE("two-group example") {
  SquareMatrix g2g(2, kInf);
  g2g(0, 1) = 1.0;
  g2g(1, 0) = 1.0;
  const std::vector<double> a2g{1.0, 3.0}, g2h{3.0, 1.0};
  const GuidanceTour t = solve(assemble_matrix(a2g, g2g, g2h, 5.0));
  CHECK(t.order == std::vector<int>{0, 1});
  CHECK(t.total_time == Approx(3.0));
}

TEST_CASE("groups on a line are visited in order") {
  std::vector<Pose> groups;
  for (double x : {3.0, 1.0, 2.0}) groups.push_back({{x, 0, 0}, 0.0});
  const GuidanceInstance inst = build_matrix({{0, 0, 0}, 0.0}, groups, {5, 0, 0}, CostParams{}, straight_line_length);
  const GuidanceTour t = solve(inst);
  CHECK(t.order == std::vector<int>{1, 2, 0});
  CHECK(t.total_time == Approx(brute_force(inst)));
}

TEST_CASE("single group") {
  const std::vector<Pose> groups{{{1, 1, 0}, 0.0}};
  const GuidanceTour t =
      solve(build_matrix({{0, 0, 0}, 0.0}, groups, {0, 2, 0}, CostParams{}, straight_line_length));
  CHECK(t.order == std::vector<int>{0});
}

TEST_CASE("unreachable groups are skipped, dead ends raise") {
  SquareMatrix g2g(3, 1.0);
  const std::vector<double> a2g{1.0, kInf, 1.0}, g2h{1.0, 1.0, kInf};
  const GuidanceTour t = solve(assemble_matrix(a2g, g2g, g2h, 2.0));
  CHECK(t.order == std::vector<int>{0});
  CHECK(t.skipped == std::vector<int>{1, 2});

  // Two groups each reachable from the anchor and home, but not from each other.
  SquareMatrix cut(2, kInf);
  const std::vector<double> ones{1.0, 1.0};
  CHECK_THROWS_AS(solve(assemble_matrix(ones, cut, ones, 2.0)), PlanningDeadEnd);
  CHECK_THROWS_AS(solve(assemble_matrix(ones, cut, ones, 2.0), SolveOptions{0, 1, 2}), PlanningDeadEnd);
}

TEST_CASE("property: exact solver matches brute force up to 8 groups") {
  std::mt19937 rng(1);
  for (int k = 1; k <= 8; ++k)
    for (int trial = 0; trial < 4; ++trial) {
      const GuidanceInstance inst = instance_of(random_points(rng, k));
      const GuidanceTour t = solve(inst);
      CHECK(t.exact);
      CHECK(t.total_time == Approx(brute_force(inst)));
      CHECK(tour_cost(inst, t) == Approx(t.total_time));
    }
}

TEST_CASE("property: closed-tour solution is pinned start-first, home-last") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 9;
    const GuidanceInstance inst = instance_of(random_points(rng, k));
    auto [cycle, cost] = held_karp_cycle(inst.cost);
    REQUIRE(cycle.size() == static_cast<std::size_t>(k + 2));
    CHECK(cycle.front() == 0);
    CHECK(cycle.back() == inst.home());
    std::vector<int> sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k + 2; ++i) CHECK(sorted[i] == i);
    // Cutting the free home -> start edge leaves the open path cost.
    CHECK(cost == Approx(path_cost(inst.cost, cycle)));
  }
}

TEST_CASE("property: heuristic within 15% of exact at 12 groups; refinement never worse than NN") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GuidanceInstance inst = instance_of(random_points(rng, 12));
    const GuidanceTour exact = solve(inst, SolveOptions{12, 0, 1});
    const GuidanceTour heur = solve(inst, SolveOptions{0, static_cast<std::uint64_t>(trial), 1});
    REQUIRE(exact.exact);
    CHECK_FALSE(heur.exact);
    CHECK(heur.total_time <= 1.15 * exact.total_time + 1e-9);
    CHECK(heur.total_time >= exact.total_time - 1e-9);
    CHECK(heur.order.size() == 12);

    const auto [nn_path, nn_cost] = nearest_neighbor_path(inst.cost);
    const auto [hp, hc] = heuristic_path(inst.cost, 0, 1);
    CHECK(hc <= nn_cost + 1e-9);
    CHECK(hp.front() == 0);
    CHECK(hp.back() == inst.home());
    CHECK(hc == Approx(path_cost(inst.cost, hp)));
  }
}

TEST_CASE("heuristic is deterministic per seed") {
  std::mt19937 rng(5);
  const GuidanceInstance inst = instance_of(random_points(rng, 20));
  const GuidanceTour a = solve(inst, SolveOptions{12, 7, 4});
  const GuidanceTour b = solve(inst, SolveOptions{12, 7, 4});
  CHECK(a.order == b.order);
  CHECK(a.total_time == b.total_time);
}

TEST_CASE("property: suffix table agrees with the exact solver") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + trial % 7;
    const Raw r = random_points(rng, k);
    const SuffixTourTable table(r.g2g, r.g2h);
    std::uniform_int_distribution<std::uint32_t> mask_d(0, (1u << k) - 1);
    for (int q = 0; q < 8; ++q) {
      const std::uint32_t mask = mask_d(rng);
      std::vector<double> a2g, g2h;
      std::vector<int> idx;
      for (int j = 0; j < k; ++j)
        if (mask & (1u << j)) idx.push_back(j);
      SquareMatrix sub(static_cast<int>(idx.size()), kInf);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        a2g.push_back(r.a2g[idx[i]]);
        g2h.push_back(r.g2h[idx[i]]);
        for (std::size_t j = 0; j < idx.size(); ++j)
          if (i != j) sub(static_cast<int>(i), static_cast<int>(j)) = r.g2g(idx[i], idx[j]);
      }
      const double expected = solve(assemble_matrix(a2g, sub, g2h, r.a2h)).total_time;
      CHECK(table.query(r.a2g, r.a2h, mask) == Approx(expected));
    }
  }
}

TEST_CASE("instance dump") {
  const std::vector<Pose> groups{{{1, 0, 0}, 0.0}};
  const auto j = build_matrix({{0, 0, 0}, 0.0}, groups, {2, 0, 0}, CostParams{}, straight_line_length).to_json();
  REQUIRE(j.at("cost").size() == 3);
  CHECK(j.at("cost")[0][0].is_null());
  CHECK(j.at("cost")[2][0] == 0.0);
  CHECK(j.at("cost")[0][1].get<double>() == Approx(1.0 / 0.75));
}
