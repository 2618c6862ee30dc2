// Copyright (c) 2026 vshadow authors. All rights reserved.
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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace vshadow::testsupport {

namespace {

void WalkDtw(const Eigen::MatrixXd& cost, int i, int j, double so_far,
             double* best) {
  so_far += cost(i, j);
  if (i == cost.rows() - 1 && j == cost.cols() - 1) {
    *best = std::min(*best, so_far);
    return;
  }
  if (i + 1 < cost.rows() && j + 1 < cost.cols()) {
    WalkDtw(cost, i + 1, j + 1, so_far, best);
  }
  if (i + 1 < cost.rows()) WalkDtw(cost, i + 1, j, so_far, best);
  if (j + 1 < cost.cols()) WalkDtw(cost, i, j + 1, so_far, best);
}

void WalkMas(const Eigen::MatrixXd& loglik, int row, int col, double so_far,
             const std::function<void(double)>& emit) {
  so_far += loglik(row, col);
  if (col == loglik.cols() - 1) {
    if (row == loglik.rows() - 1) emit(so_far);
    return;
  }
  WalkMas(loglik, row, col + 1, so_far, emit);
  if (row + 1 < loglik.rows()) WalkMas(loglik, row + 1, col + 1, so_far, emit);
}

}  // namespace

double EnumerateDtwCost(const Eigen::MatrixXd& cost) {
  double best = std::numeric_limits<double>::infinity();
  WalkDtw(cost, 0, 0, 0.0, &best);
  return best;
}

double EnumerateMasScore(const Eigen::MatrixXd& loglik) {
  double best = -std::numeric_limits<double>::infinity();
  WalkMas(loglik, 0, 0, 0.0, [&best](double s) { best = std::max(best, s); });
  return best;
}

double EnumerateForwardSumLogTotal(const Eigen::MatrixXd& loglik) {
  Eigen::MatrixXd normalized = loglik;
  for (int j = 0; j < normalized.cols(); ++j) {
    double hi = normalized.col(j).maxCoeff();
    double sum = 0.0;
    for (int i = 0; i < normalized.rows(); ++i) {
      sum += std::exp(normalized(i, j) - hi);
    }
    const double log_z = hi + std::log(sum);
    for (int i = 0; i < normalized.rows(); ++i) normalized(i, j) -= log_z;
  }
  std::vector<double> scores;
  WalkMas(normalized, 0, 0, 0.0,
          [&scores](double s) { scores.push_back(s); });
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - hi);
  return hi + std::log(sum);
}

int RecursiveEditDistance(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  std::map<std::pair<int, int>, int> memo;
  const std::function<int(int, int)> go = [&](int i, int j) -> int {
    if (i == static_cast<int>(a.size())) return static_cast<int>(b.size()) - j;
    if (j == static_cast<int>(b.size())) return static_cast<int>(a.size()) - i;
    const auto key = std::make_pair(i, j);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

double NestedLoopBertScore(const Eigen::MatrixXf& gen,
                           const Eigen::MatrixXf& ref) {
  double total = 0.0;
  for (int i = 0; i < gen.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < ref.rows(); ++j) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int k = 0; k < gen.cols(); ++k) {
        const double x = gen(i, k);
        const double y = ref(j, k);
        dot += x * y;
        na += x * x;
        nb += y * y;
      }
      double cosine = 0.0;
      if (na > 0.0 && nb > 0.0) {
        cosine = dot / (std::sqrt(na) * std::sqrt(nb));
      }
      best = std::max(best, cosine);
    }
    total += best;
  }
  return total / static_cast<double>(gen.rows());
}

Eigen::MatrixXd DyadicMatrix(int rows, int cols, double lo, double hi,
                             Rng* rng) {
  const int lo_ticks = static_cast<int>(std::ceil(lo * 1024.0));
  const int hi_ticks = static_cast<int>(std::floor(hi * 1024.0));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = rng->UniformInt(lo_ticks, hi_ticks) / 1024.0;
    }
  }
  return m;
}

}  // namespace vshadow::testsupport
