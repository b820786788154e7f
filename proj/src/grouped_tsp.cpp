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

#include "bmx/grouped_tsp.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace bmx {
namespace {

// Finite stand-in for +inf inside local search so that deltas stay defined.
constexpr double kBig = 1e12;

double finite(double c) { return c < kInf ? c : kBig; }

double soft_path_cost(const SquareMatrix& cost, std::span<const int> path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += finite(cost(path[i], path[i + 1]));
  return total;
}

std::vector<int> randomized_nn(const SquareMatrix& cost, std::mt19937_64* rng) {
  const int n = cost.size();
  std::vector<int> path{0};
  std::vector<char> used(n, 0);
  used[0] = used[n - 1] = 1;
  int cur = 0;
  for (int step = 0; step < n - 2; ++step) {
    int best = -1, second = -1;
    for (int j = 1; j < n - 1; ++j) {
      if (used[j]) continue;
      if (best < 0 || cost(cur, j) < cost(cur, best)) {
        second = best;
        best = j;
      } else if (second < 0 || cost(cur, j) < cost(cur, second)) {
        second = j;
      }
    }
    int pick = best;
    if (rng && second >= 0 && ((*rng)() & 1u)) pick = second;
    used[pick] = 1;
    path.push_back(pick);
    cur = pick;
  }
  path.push_back(n - 1);
  return path;
}

void local_search(const SquareMatrix& cost, std::vector<int>& path) {
  const int len = static_cast<int>(path.size());
  if (len < 4) return;
  // Prefix sums of forward and backward edge costs make every 2-opt and
  // or-opt delta O(1).
  std::vector<double> fwd(len, 0.0), bwd(len, 0.0);
  auto c = [&](int a, int b) { return finite(cost(a, b)); };
  auto refresh = [&] {
    for (int k = 1; k < len; ++k) {
      fwd[k] = fwd[k - 1] + c(path[k - 1], path[k]);
      bwd[k] = k >= 2 ? bwd[k - 1] + c(path[k], path[k - 1]) : 0.0;
    }
  };
  refresh();
  bool improved = true;
  for (int moves = 0; improved && moves < 50 * len; ++moves) {
    improved = false;
    for (int i = 1; i < len - 2 && !improved; ++i) {
      for (int j = i + 1; j < len - 1; ++j) {
        const double before = c(path[i - 1], path[i]) + (fwd[j] - fwd[i]) + c(path[j], path[j + 1]);
        const double after = c(path[i - 1], path[j]) + (bwd[j] - bwd[i]) + c(path[i], path[j + 1]);
        if (after < before - 1e-9) {
          std::reverse(path.begin() + i, path.begin() + j + 1);
          refresh();
          improved = true;
          break;
        }
      }
    }
    for (int seg = 1; seg <= 3 && !improved; ++seg) {
      for (int i = 1; i + seg <= len - 1 && !improved; ++i) {
        const int last = i + seg - 1;
        const double removed = c(path[i - 1], path[i]) + c(path[last], path[last + 1]) - c(path[i - 1], path[last + 1]);
        for (int q = 0; q < len - 1; ++q) {
          if (q >= i - 1 && q <= last) continue;
          const double added = c(path[q], path[i]) + c(path[last], path[q + 1]) - c(path[q], path[q + 1]);
          if (added < removed - 1e-9) {
            if (q < i) std::rotate(path.begin() + q + 1, path.begin() + i, path.begin() + last + 1);
            else std::rotate(path.begin() + i, path.begin() + last + 1, path.begin() + q + 1);
            refresh();
            improved = true;
            break;
          }
        }
      }
    }
  }
}

}  // namespace

nlohmann::json GuidanceInstance::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < cost.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < cost.size(); ++j) {
      if (cost(i, j) < kInf) row.push_back(cost(i, j));
      else row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  return {{"cost", rows}};
}

GuidanceInstance assemble_matrix(std::span<const double> anchor_to_group, const SquareMatrix& group_to_group,
                                 std::span<const double> group_to_home, double anchor_to_home) {
  const int k = static_cast<int>(anchor_to_group.size());
  GuidanceInstance inst;
  inst.cost = SquareMatrix(k + 2, kInf);
  const int home = k + 1;
  for (int j = 0; j < k; ++j) inst.cost(0, j + 1) = anchor_to_group[j];
  inst.cost(0, home) = anchor_to_home;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j)
      if (i != j) inst.cost(i + 1, j + 1) = group_to_group(i, j);
    inst.cost(i + 1, home) = group_to_home[i];
  }
  inst.cost(home, 0) = 0.0;
  return inst;
}

GuidanceInstance build_matrix(const Pose& anchor, std::span<const Pose> group_averages, const Vec3& home,
                              const CostParams& params, const PathLengthFn& estimator) {
  const int k = static_cast<int>(group_averages.size());
  std::vector<double> a2g(k), g2h(k);
  SquareMatrix g2g(k, kInf);
  for (int j = 0; j < k; ++j) {
    a2g[j] = time_cost(anchor, group_averages[j], CostMode::kAverage, params, estimator);
    g2h[j] = time_cost(group_averages[j], Pose{home, group_averages[j].yaw}, CostMode::kAverage, params, estimator);
    for (int i = 0; i < k; ++i)
      if (i != j) g2g(i, j) = time_cost(group_averages[i], group_averages[j], CostMode::kAverage, params, estimator);
  }
  const double a2h = time_cost(anchor, Pose{home, anchor.yaw}, CostMode::kAverage, params, estimator);
  return assemble_matrix(a2g, g2g, g2h, a2h);
}

double path_cost(const SquareMatrix& cost, std::span<const int> path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += cost(path[i], path[i + 1]);
  return total;
}

std::pair<std::vector<int>, double> held_karp_cycle(const SquareMatrix& cost) {
  const int n = cost.size();
  if (n < 2) return {{0}, 0.0};
  const int m = n - 1;
  const std::uint32_t full = (1u << m) - 1u;
  std::vector<double> dp(static_cast<std::size_t>(full + 1) * m, kInf);
  std::vector<std::int8_t> parent(dp.size(), -1);
  for (int j = 0; j < m; ++j) dp[(1u << j) * m + j] = cost(0, j + 1);
  for (std::uint32_t s = 1; s <= full; ++s) {
    for (int j = 0; j < m; ++j) {
      if (!(s & (1u << j))) continue;
      const double base = dp[s * m + j];
      if (!(base < kInf)) continue;
      for (int l = 0; l < m; ++l) {
        if (s & (1u << l)) continue;
        const double c = cost(j + 1, l + 1);
        if (!(c < kInf)) continue;
        const std::uint32_t t = s | (1u << l);
        if (base + c < dp[t * m + l]) {
          dp[t * m + l] = base + c;
          parent[t * m + l] = static_cast<std::int8_t>(j);
        }
      }
    }
  }
  double best = kInf;
  int last = -1;
  for (int j = 0; j < m; ++j) {
    const double c = dp[full * m + j] + cost(j + 1, 0);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  if (last < 0) return {{}, kInf};
  std::vector<int> rev;
  std::uint32_t s = full;
  int j = last;
  while (j >= 0) {
    rev.push_back(j + 1);
    const int p = parent[s * m + j];
    s &= ~(1u << j);
    j = p;
  }
  rev.push_back(0);
  std::reverse(rev.begin(), rev.end());
  return {rev, best};
}

std::pair<std::vector<int>, double> nearest_neighbor_path(const SquareMatrix& cost) {
  std::vector<int> p = randomized_nn(cost, nullptr);
  return {p, path_cost(cost, p)};
}

std::pair<std::vector<int>, double> heuristic_path(const SquareMatrix& cost, std::uint64_t seed, int restarts) {
  std::mt19937_64 rng(seed);
  std::vector<int> best;
  double best_cost = kInf;
  double best_soft = kInf;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<int> p = randomized_nn(cost, r == 0 ? nullptr : &rng);
    local_search(cost, p);
    const double soft = soft_path_cost(cost, p);
    if (soft < best_soft) {
      best_soft = soft;
      best = p;
      best_cost = path_cost(cost, p);
    }
  }
  return {best, best_cost};
}

GuidanceTour solve(const GuidanceInstance& inst, const SolveOptions& options) {
  const int k = inst.group_count();
  const int home = inst.home();
  GuidanceTour tour;
  std::vector<int> kept;
  for (int j = 0; j < k; ++j) {
    if (inst.cost(0, j + 1) < kInf && inst.cost(j + 1, home) < kInf) kept.push_back(j);
    else tour.skipped.push_back(j);
  }
  const int m = static_cast<int>(kept.size()) + 2;
  SquareMatrix reduced(m, kInf);
  auto original = [&](int r) { return r == 0 ? 0 : (r == m - 1 ? home : kept[r - 1] + 1); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) reduced(i, j) = inst.cost(original(i), original(j));

  std::vector<int> path;
  double total = kInf;
  if (static_cast<int>(kept.size()) <= options.exact_limit) {
    auto [cycle, cost] = held_karp_cycle(reduced);
    if (!(cost < kInf) || cycle.empty() || cycle.back() != m - 1)
      throw PlanningDeadEnd("no finite guidance path");
    path = std::move(cycle);
    total = cost;
    tour.exact = true;
  } else {
    auto [p, cost] = heuristic_path(reduced, options.seed, options.restarts);
    if (!(cost < kInf)) throw PlanningDeadEnd("no finite guidance path");
    path = std::move(p);
    total = cost;
  }
  for (std::size_t i = 1; i + 1 < path.size(); ++i) tour.order.push_back(kept[path[i] - 1]);
  tour.total_time = total;
  return tour;
}

SuffixTourTable::SuffixTourTable(const SquareMatrix& group_to_group, std::span<const double> group_to_home)
    : k_(static_cast<int>(group_to_home.size())) {
  if (k_ > 24) throw std::invalid_argument("suffix tour table limited to 24 groups");
  const std::uint32_t count = 1u << k_;
  best_.assign(static_cast<std::size_t>(count) * std::max(k_, 1), kInf);
  std::vector<std::uint32_t> masks(count);
  for (std::uint32_t s = 0; s < count; ++s) masks[s] = s;
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t s : masks) {
    for (int j = 0; j < k_; ++j) {
      if (s & (1u << j)) continue;
      double v = kInf;
      if (s == 0) {
        v = group_to_home[j];
      } else {
        for (int l = 0; l < k_; ++l) {
          if (!(s & (1u << l))) continue;
          const double c = group_to_group(j, l);
          if (!(c < kInf)) continue;
          v = std::min(v, c + best_[static_cast<std::size_t>(s & ~(1u << l)) * k_ + l]);
        }
      }
      best_[static_cast<std::size_t>(s) * k_ + j] = v;
    }
  }
}

double SuffixTourTable::query(std::span<const double> anchor_to_group, double anchor_to_home,
                              std::uint32_t mask) const {
  if (mask == 0) return anchor_to_home;
  double v = kInf;
  for (int j = 0; j < k_; ++j) {
    if (!(mask & (1u << j))) continue;
    const double c = anchor_to_group[j];
    if (!(c < kInf)) continue;
    v = std::min(v, c + best_[static_cast<std::size_t>(mask & ~(1u << j)) * k_ + j]);
  }
  return v;
}

}  // namespace bmx
