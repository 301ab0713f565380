#pragma once

// Low-discrepancy sample points and the library's random-number helpers.

#include <gsl/gsl_qrng.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bitension/errors.hpp"

namespace bitension {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

/// Coordinate hyperplane x[coordinate] == value removed from a chart.
struct Hyperplane {
  int coordinate = 0;
  double value = 0.0;
};

/// Sobol points in a box, shifted modulo 1 by a seed-derived offset so that
/// different seeds give different (still low-discrepancy) point sets. The box
/// is shrunk by `shrink` of its width on every side and points closer than
/// `margin` to an excluded hyperplane are skipped.
inline std::vector<std::vector<double>> sobol_points(const std::vector<Interval>& box,
                                                     const std::vector<Hyperplane>& excluded, int count,
                                                     std::uint64_t seed, double shrink = 0.05,
                                                     double margin = 1e-3) {
  const int dim = static_cast<int>(box.size());
  if (dim < 1 || dim > 40) throw Error("sampling dimension must be between 1 and 40");
  for (const auto& iv : box)
    if (!iv.finite() || !(iv.lo < iv.hi)) throw Error("sampling needs a bounded, non-empty box");

  std::unique_ptr<gsl_qrng, decltype(&gsl_qrng_free)> q(gsl_qrng_alloc(gsl_qrng_sobol, dim), &gsl_qrng_free);
  if (!q) throw Error("cannot allocate Sobol generator");

  Rng rng(seed);
  std::vector<double> shift(dim);
  for (auto& s : shift) s = uniform01(rng);

  std::vector<std::vector<double>> out;
  std::vector<double> u(dim);
  const long budget = 100L * count + 1000;
  for (long k = 0; k < budget && static_cast<int>(out.size()) < count; ++k) {
    gsl_qrng_get(q.get(), u.data());
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i) {
      double t = u[i] + shift[i];
      t -= std::floor(t);
      const double w = box[i].hi - box[i].lo;
      const double lo = box[i].lo + shrink * w;
      x[i] = lo + t * (w * (1.0 - 2.0 * shrink));
    }
    bool keep = true;
    for (const auto& hp : excluded)
      if (std::abs(x[hp.coordinate] - hp.value) < margin) keep = false;
    if (keep) out.push_back(std::move(x));
  }
  if (static_cast<int>(out.size()) < count) throw Error("could not place sample points away from excluded loci");
  return out;
}

}  // namespace bitension
