#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "wpnav/geom.hpp"

namespace wpnav::test {

/// A planted registration problem: target[i] = transform_point(truth, source[i]).
struct SynthCase {
  std::vector<Point2> target;
  std::vector<Point2> source;
  Pose2D truth;
};

/// Scattered cloud in a 4 m square; truth within (0.3 m, 0.2 rad) of the identity.
inline SynthCase synth_case(std::uint64_t seed, int n = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SynthCase c;
  for (int i = 0; i < n; ++i) c.target.push_back({pos(rng), pos(rng)});
  const double r = 0.3 * std::sqrt(std::abs(unit(rng)));
  const double a = kPi * unit(rng);
  c.truth = {r * std::cos(a), r * std::sin(a), 0.2 * unit(rng)};
  const Pose2D inv = inverse(c.truth);
  for (const Point2 p : c.target) c.source.push_back(transform_point(inv, p));
  return c;
}

/// Radius beyond which clutter can never pair with the target: the target sits within
/// 2*sqrt(2) of the origin, a basin transform moves it by at most 0.3 m, the gate is
/// 0.5 m, plus a metre of margin.
inline constexpr double kClutterInner = 2.8285 + 0.3 + 0.5 + 1.0;

inline Point2 clutter_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> rad(0.0, 3.0);
  const double a = ang(rng);
  const double r = kClutterInner + rad(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

/// Source cloud in which clutter makes up `fraction` of the points; every inlier is kept.
inline std::vector<Point2> add_clutter(const SynthCase& c, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point2> src = c.source;
  const auto k = static_cast<std::size_t>(fraction / (1.0 - fraction) * static_cast<double>(c.source.size()) + 0.5);
  for (std::size_t i = 0; i < k; ++i) src.push_back(clutter_point(rng));
  return src;
}

/// Source cloud with `fraction` of the points replaced by clutter. Returns the
/// replaced indices through `replaced` when given.
inline std::vector<Point2> replace_with_clutter(const std::vector<Point2>& source, double fraction,
                                                std::uint64_t seed, std::vector<std::size_t>* replaced = nullptr) {
  std::mt19937_64 rng(seed);
  std::vector<Point2> src = source;
  const auto k = static_cast<std::size_t>(fraction * static_cast<double>(src.size()) + 0.5);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i * src.size()) / k;
    src[j] = clutter_point(rng);
    if (replaced) replaced->push_back(j);
  }
  return src;
}

}  // namespace wpnav::test
