// Copyright 2026 The compo Authors. All Rights Reserved.
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

#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

namespace ref {

Vec project_l1_ball(const Vec& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(v[i]) - theta, 0.0), v[i]);
  }
  return out;
}

Vec project_l1_l2(const Vec& v, double sqrt_s, int iterations) {
  Vec x = v;
  Vec p = Vec::Zero(v.size());
  Vec q = Vec::Zero(v.size());
  for (int k = 0; k < iterations; ++k) {
    const Vec y = project_l1_ball(x + p, sqrt_s);
    p = x + p - y;
    Vec z = y + q;
    const double n = z.norm();
    const Vec w = n > 1.0 ? Vec(z / n) : z;
    q = y + q - w;
    if ((w - x).norm() < 1e-16) {
      x = w;
      break;
    }
    x = w;
  }
  return x;
}

double support_value_dual(const Vec& c, std::size_t s) {
  const double root_s = std::sqrt(static_cast<double>(s));
  auto h = [&](double t) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double a = std::max(std::abs(c[i]) - t, 0.0);
      sq += a * a;
    }
    return root_s * t + std::sqrt(sq);
  };
  double a = 0.0;
  double b = c.cwiseAbs().maxCoeff();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 300; ++it) {
    const double x1 = b - inv_phi * (b - a);
    const double x2 = a + inv_phi * (b - a);
    if (h(x1) <= h(x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return std::min({h(0.5 * (a + b)), h(0.0), h(c.cwiseAbs().maxCoeff())});
}

Vec support_argmax_primal(const Vec& c, std::size_t s, int iterations) {
  const double root_s = std::sqrt(static_cast<double>(s));
  const Vec dir = c / c.norm();
  Vec g = Vec::Zero(c.size());
  for (int k = 0; k < iterations; ++k) g = project_l1_l2(g + dir, root_s, 200);
  return g;
}

Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec grad(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = xp[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double relative_error(const Vec& a, const Vec& b, double floor) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

std::string scratch_dir(const std::string& name) {
  const char* env = std::getenv("COMPO_TMP_DIR");
  const std::filesystem::path root = env != nullptr && *env != '\0' ? std::filesystem::path(env)
                                                                     : std::filesystem::temp_directory_path() / "compo";
  const auto dir = root / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace ref
