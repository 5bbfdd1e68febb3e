#pragma once

#include <cstdint>
#include <random>

#include "otsurf/geometry.hpp"

namespace otsurf {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed ^ 0x9e3779b97f4a7c15ULL) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }
  // Uniform direction on S^n embedded in R^3.
  Vec direction(int n) {
    for (;;) {
      Vec v(normal(), normal(), n == 1 ? 0.0 : normal());
      double len = v.norm();
      if (len > 1e-12) return v / len;
    }
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace otsurf
