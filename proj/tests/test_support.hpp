#pragma once

// Test-only helpers: independent oracles (plain-loop recomputations that do
// not share code with the library paths they check) and random instance
// generators with deterministic seeding.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "gpcap/prob.hpp"

namespace testsupport {

inline double entropy_oracle(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 1e-15) h -= v * std::log2(v);
  }
  return h;
}

/// Mutual information I(A;B|C) recomputed from a raw dense tensor by direct
/// marginal accumulation into maps keyed by index tuples.
class JointOracle {
 public:
  JointOracle(std::vector<double> data, std::vector<std::size_t> sizes)
      : data_(std::move(data)), sizes_(std::move(sizes)) {}

  double entropy_of(const std::vector<std::size_t>& axes) const {
    std::map<std::vector<std::size_t>, double> marg;
    std::vector<std::size_t> idx(sizes_.size(), 0);
    for (std::size_t f = 0; f < data_.size(); ++f) {
      unflatten(f, idx);
      std::vector<std::size_t> key;
      key.reserve(axes.size());
      for (std::size_t a : axes) key.push_back(idx[a]);
      marg[key] += data_[f];
    }
    double h = 0.0;
    for (const auto& [k, v] : marg) {
      (void)k;
      if (v > 1e-15) h -= v * std::log2(v);
    }
    return h;
  }

  double mi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    return entropy_of(a) + entropy_of(b) - entropy_of(join(a, b));
  }
  double cmi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
             const std::vector<std::size_t>& c) const {
    return entropy_of(join(a, c)) + entropy_of(join(b, c)) - entropy_of(join(join(a, b), c)) -
           entropy_of(c);
  }

 private:
  static std::vector<std::size_t> join(std::vector<std::size_t> x,
                                       const std::vector<std::size_t>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  }
  void unflatten(std::size_t f, std::vector<std::size_t>& idx) const {
    for (std::size_t i = sizes_.size(); i-- > 0;) {
      idx[i] = f % sizes_[i];
      f /= sizes_[i];
    }
  }

  std::vector<double> data_;
  std::vector<std::size_t> sizes_;
};

inline std::vector<double> random_simplex_row(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) {
    v = exp1(rng) + 1e-9;
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline gpcap::Channel random_channel(std::mt19937_64& rng, std::vector<std::size_t> shape,
                                     std::size_t out) {
  std::size_t rows = 1;
  for (auto s : shape) rows *= s;
  std::vector<double> p;
  p.reserve(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = random_simplex_row(rng, out);
    p.insert(p.end(), row.begin(), row.end());
  }
  return gpcap::Channel(std::move(shape), out, std::move(p));
}

}  // namespace testsupport
