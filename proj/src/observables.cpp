// Copyright 2026 The perqwalk Authors
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

#include "perqwalk/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace perqwalk {

PositionDistribution position_distribution(const Eigen::VectorXcd& state, double time) {
  const double norm2 = state.squaredNorm();
  if (!(std::abs(std::sqrt(norm2) - 1.0) <= 1e-8)) {
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(std::sqrt(norm2)) +
                                ")");
  }
  return PositionDistribution{state.cwiseAbs2(), time};
}

double signed_displacement(std::size_t k, std::size_t origin, std::size_t n, bool periodic) {
  auto d = static_cast<long long>(k) - static_cast<long long>(origin);
  if (periodic) {
    const auto nn = static_cast<long long>(n);
    d %= nn;
    if (d < 0) d += nn;
    // (-n/2, n/2]
    if (2 * d > nn) d -= nn;
  }
  return static_cast<double>(d);
}

double variance(const PositionDistribution& dist, std::size_t origin, bool periodic) {
  const auto n = static_cast<std::size_t>(dist.probabilities.size());
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = signed_displacement(k, origin, n, periodic);
    const double p = dist.probabilities[static_cast<Eigen::Index>(k)];
    m1 += p * x;
    m2 += p * x * x;
  }
  return m2 - m1 * m1;
}

std::vector<double> bessel_j_sequence(std::size_t max_order, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("Bessel argument must be finite and non-negative");
  }
  std::vector<double> out(max_order + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // Start well above both the requested order and the turning point x.
  const auto top_order = static_cast<std::size_t>(
      std::max(static_cast<double>(max_order), x) + 30.0 +
      std::sqrt(40.0 * std::max(static_cast<double>(max_order), x)));
  const std::size_t start = top_order + (top_order % 2);  // even
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  double norm = 0.0;
  for (std::size_t k = start; k >= 1; --k) {
    j[k - 1] = 2.0 * static_cast<double>(k) / x * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (std::size_t i = k - 1; i <= start; ++i) j[i] *= 1e-250;
      j[start + 1] *= 1e-250;
    }
  }
  norm = j[0];
  for (std::size_t k = 2; k <= start; k += 2) norm += 2.0 * j[k];
  for (std::size_t k = 0; k <= max_order; ++k) out[k] = j[k] / norm;
  return out;
}

PositionDistribution bessel_distribution(std::size_t n, std::size_t origin, double t, double j0,
                                         bool periodic) {
  if (n < 1 || origin >= n) throw std::invalid_argument("origin outside the lattice");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  const double x = 2.0 * j0 * t;
  const std::size_t span = n;  // no displacement exceeds n
  // Orders well past the represented range so the tail can be summed directly.
  const auto extra = static_cast<std::size_t>(x + 60.0);
  const auto j = bessel_j_sequence(span + extra, x);

  PositionDistribution out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), t};
  // Track which (signed) displacements are represented.
  long long lo = 0;
  long long hi = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto d = static_cast<long long>(signed_displacement(k, origin, n, periodic));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    const auto order = static_cast<std::size_t>(std::llabs(d));
    out.probabilities[static_cast<Eigen::Index>(k)] = j[order] * j[order];
  }
  double tail = 0.0;
  for (std::size_t order = static_cast<std::size_t>(-lo) + 1; order < j.size(); ++order) {
    tail += j[order] * j[order];
  }
  for (std::size_t order = static_cast<std::size_t>(hi) + 1; order < j.size(); ++order) {
    tail += j[order] * j[order];
  }
  if (tail > 1e-12) {
    throw std::invalid_argument("t = " + std::to_string(t) +
                                " is too large for the lattice: Bessel tail mass " +
                                std::to_string(tail) + " exceeds 1e-12");
  }
  return out;
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  if (x.size() < 2) throw std::invalid_argument("fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("log-log fit needs strictly positive values");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("log-log fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Ballistic: return "ballistic";
    case Regime::Diffusive: return "diffusive";
    case Regime::Localized: return "localized";
    case Regime::Crossover: return "crossover";
  }
  return "crossover";
}

RegimeFit classify_regime(std::span<const double> times, std::span<const double> variances) {
  if (times.size() != variances.size()) {
    throw std::invalid_argument("times and variances differ in length");
  }
  if (times.empty()) throw std::invalid_argument("empty variance series");
  const double t_end = times.back();
  const double t_start = 0.5 * t_end;
  std::vector<double> ts;
  std::vector<double> vs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_start || times[i] <= 0.0) continue;
    if (!(variances[i] > 0.0)) {
      throw std::invalid_argument("variance must be positive in the fit window (t = " +
                                  std::to_string(times[i]) + ")");
    }
    ts.push_back(times[i]);
    vs.push_back(variances[i]);
  }
  if (ts.size() < 5) {
    throw std::invalid_argument("regime fit needs at least 5 points in the final half window, got " +
                                std::to_string(ts.size()));
  }
  const auto fit = loglog_fit(ts, vs);
  RegimeFit out{fit.slope, fit.slope_stderr, Regime::Crossover};
  if (fit.slope > 1.6) {
    out.regime = Regime::Ballistic;
  } else if (fit.slope >= 0.7 && fit.slope <= 1.3) {
    out.regime = Regime::Diffusive;
  } else if (fit.slope < 0.4) {
    out.regime = Regime::Localized;
  }
  return out;
}

}  // namespace perqwalk
