#include "cardbench/fit.hpp"

#include <algorithm>
#include <cmath>

#include "cardbench/rng.hpp"

namespace cardbench {
namespace {

// Project a point into the model's bound box.
void clamp_to_bounds(std::vector<double>& theta, const std::vector<Interval>& bounds) {
  for (size_t d = 0; d < theta.size(); ++d) {
    theta[d] = std::clamp(theta[d], bounds[d].lo, bounds[d].hi);
  }
}

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

double simplex_diameter(const Simplex& s) {
  double diam = 0.0;
  for (size_t i = 0; i < s.points.size(); ++i) {
    for (size_t j = i + 1; j < s.points.size(); ++j) {
      double d2 = 0.0;
      for (size_t d = 0; d < s.points[i].size(); ++d) {
        const double diff = s.points[i][d] - s.points[j][d];
        d2 += diff * diff;
      }
      diam = std::max(diam, std::sqrt(d2));
    }
  }
  return diam;
}

// Bounded Nelder-Mead from one start; returns best point found.
template <typename Loss>
std::pair<std::vector<double>, double> nelder_mead(const std::vector<double>& start,
                                                   const std::vector<Interval>& bounds, Loss loss,
                                                   int max_evals, double diameter_tol) {
  const int n = static_cast<int>(start.size());
  int evals = 0;
  auto eval = [&](std::vector<double> p) {
    clamp_to_bounds(p, bounds);
    ++evals;
    return std::make_pair(p, loss(p));
  };

  Simplex s;
  s.points.reserve(n + 1);
  s.values.reserve(n + 1);
  {
    auto [p, v] = eval(start);
    s.points.push_back(p);
    s.values.push_back(v);
  }
  for (int d = 0; d < n; ++d) {
    std::vector<double> p = start;
    const double span = bounds[d].width();
    double step = 0.05 * (span > 0.0 ? span : 1.0);
    if (p[d] + step > bounds[d].hi) step = -step;
    p[d] += step;
    auto [q, v] = eval(p);
    s.points.push_back(q);
    s.values.push_back(v);
  }

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  while (evals < max_evals) {
    // Order ascending by value.
    std::vector<int> idx(s.points.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.values[a] < s.values[b]; });
    Simplex sorted;
    for (int i : idx) {
      sorted.points.push_back(s.points[i]);
      sorted.values.push_back(s.values[i]);
    }
    s = std::move(sorted);

    if (simplex_diameter(s) < diameter_tol) break;

    // Centroid of all but the worst point.
    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < n; ++d) centroid[d] += s.points[i][d];
    }
    for (int d = 0; d < n; ++d) centroid[d] /= n;

    const auto& worst = s.points.back();
    std::vector<double> reflected(n);
    for (int d = 0; d < n; ++d) reflected[d] = centroid[d] + alpha * (centroid[d] - worst[d]);
    auto [rp, rv] = eval(reflected);

    if (rv < s.values.front()) {
      std::vector<double> expanded(n);
      for (int d = 0; d < n; ++d) expanded[d] = centroid[d] + gamma * (rp[d] - centroid[d]);
      auto [ep, ev] = eval(expanded);
      if (ev < rv) {
        s.points.back() = ep;
        s.values.back() = ev;
      } else {
        s.points.back() = rp;
        s.values.back() = rv;
      }
    } else if (rv < s.values[s.values.size() - 2]) {
      s.points.back() = rp;
      s.values.back() = rv;
    } else {
      std::vector<double> contracted(n);
      for (int d = 0; d < n; ++d) contracted[d] = centroid[d] + rho * (worst[d] - centroid[d]);
      auto [cp, cv] = eval(contracted);
      if (cv < s.values.back()) {
        s.points.back() = cp;
        s.values.back() = cv;
      } else {
        // Shrink toward the best point.
        for (size_t i = 1; i < s.points.size(); ++i) {
          std::vector<double> p(n);
          for (int d = 0; d < n; ++d) {
            p[d] = s.points[0][d] + sigma * (s.points[i][d] - s.points[0][d]);
          }
          auto [sp, sv] = eval(p);
          s.points[i] = sp;
          s.values[i] = sv;
        }
      }
    }
  }

  size_t best = 0;
  for (size_t i = 1; i < s.values.size(); ++i) {
    if (s.values[i] < s.values[best]) best = i;
  }
  return {s.points[best], s.values[best]};
}

}  // namespace

double mean_squared_loss(const ResolvedModel& model, const std::vector<double>& theta,
                         const std::vector<ObservationRecord>& records, double scale) {
  if (records.empty()) return 0.0;
  const double sat_sq = (kSaturation * scale) * (kSaturation * scale);
  double sum = 0.0;
  for (const auto& r : records) {
    const double pred = model.eval(theta.data(), r.x.data());
    if (std::isnan(pred) || std::isinf(pred)) {
      sum += sat_sq;
    } else {
      const double err = pred - r.y;
      sum += std::min(err * err, sat_sq);
    }
  }
  return sum / static_cast<double>(records.size());
}

FittedChart fit(const ResolvedModel& model, const std::vector<ObservationRecord>& records,
                const FitOptions& options) {
  FittedChart chart;
  const int n = model.free_parameter_count;
  if (n == 0) {
    chart.fit_loss = mean_squared_loss(model, chart.theta, records, options.scale);
    return chart;
  }

  auto loss = [&](const std::vector<double>& theta) {
    return mean_squared_loss(model, theta, records, options.scale);
  };

  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;
  // Deterministic stratified (Halton) starts over the bound box.
  for (int s = 0; s < options.n_starts; ++s) {
    std::vector<double> start(n);
    for (int d = 0; d < n; ++d) {
      start[d] = model.free_bounds[d].lo + model.free_bounds[d].width() * halton(d, s);
    }
    auto [theta, value] =
        nelder_mead(start, model.free_bounds, loss, options.max_evals_per_start,
                    options.diameter_tol);
    if (value < best_loss) {
      best_loss = value;
      best_theta = theta;
    }
  }
  chart.theta = std::move(best_theta);
  chart.fit_loss = best_loss;
  return chart;
}

double nrmse(const ResolvedModel& model, const std::vector<double>& theta,
             const std::vector<ObservationRecord>& records, double scale) {
  if (records.empty()) return 0.0;
  const double rmse = std::sqrt(mean_squared_loss(model, theta, records, scale));
  return std::min(rmse / scale, kSaturation);
}

}  // namespace cardbench
