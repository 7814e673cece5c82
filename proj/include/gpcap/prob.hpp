#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpcap {

// Finite-alphabet probability objects and information measures. Everything
// here is a pure function over immutable values; concurrent use needs no
// synchronization.
//
// Tolerances shared by the finite-probability types: mass drift below
// kMassRepair is silently renormalized, anything larger is rejected; values
// below kZeroProb count as exact zeros inside log terms.
inline constexpr double kMassTol = 1e-12;
inline constexpr double kMassRepair = 1e-9;
inline constexpr double kZeroProb = 1e-15;
inline constexpr std::size_t kMaxTableSize = 10'000'000;  // dense tensors only

namespace detail {

inline void repair_mass(std::vector<double>& p, const char* what) {
  double mass = 0.0;
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -kMassRepair) {
        throw std::invalid_argument(std::string(what) + ": negative entry " + std::to_string(v));
      }
      v = 0.0;
    }
    mass += v;
  }
  if (std::abs(mass - 1.0) > kMassRepair) {
    throw std::invalid_argument(std::string(what) + ": mass " + std::to_string(mass) +
                                " deviates from 1 by more than " + std::to_string(kMassRepair));
  }
  if (mass != 1.0 && mass > 0.0) {
    for (double& v : p) v /= mass;
  }
}

inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > kZeroProb) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace detail

/// Probability distribution over a finite alphabet. Entries are nonnegative
/// and sum to one (drift below 1e-9 is renormalized on construction).
class Dist {
 public:
  explicit Dist(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("Dist: empty alphabet");
    detail::repair_mass(p_, "Dist");
  }

  static Dist uniform(std::size_t n) {
    return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }
  static Dist point_mass(std::size_t n, std::size_t at) {
    if (at >= n) throw std::invalid_argument("Dist::point_mass: index out of range");
    std::vector<double> p(n, 0.0);
    p[at] = 1.0;
    return Dist(std::move(p));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Shannon entropy in bits, with 0*log 0 := 0.
inline double entropy(const Dist& d) { return detail::entropy_bits(d.probs()); }

/// Conditional distribution table: a stochastic map from a tuple of finite
/// inputs to a distribution over one finite output. Rows are indexed
/// row-major over the input tuple; within a row the output index varies
/// fastest (output-last storage).
class Channel {
 public:
  Channel() : Channel({1}, 1, {1.0}) {}  // trivial placeholder table

  Channel(std::vector<std::size_t> input_shape, std::size_t output_size, std::vector<double> probs)
      : shape_(std::move(input_shape)), out_(output_size), p_(std::move(probs)) {
    if (out_ == 0) throw std::invalid_argument("Channel: empty output alphabet");
    std::size_t rows = 1;
    for (std::size_t s : shape_) {
      if (s == 0) throw std::invalid_argument("Channel: empty input alphabet");
      rows *= s;
    }
    if (p_.size() != rows * out_) {
      throw std::invalid_argument("Channel: table size " + std::to_string(p_.size()) +
                                  " does not match shape (" + std::to_string(rows) + " rows x " +
                                  std::to_string(out_) + ")");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      std::span<double> row(p_.data() + r * out_, out_);
      std::vector<double> tmp(row.begin(), row.end());
      detail::repair_mass(tmp, "Channel row");
      std::copy(tmp.begin(), tmp.end(), row.begin());
    }
  }

  const std::vector<std::size_t>& input_shape() const { return shape_; }
  std::size_t output_size() const { return out_; }
  std::size_t num_rows() const { return p_.size() / out_; }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(p_.data() + r * out_, out_);
  }
  std::size_t row_index(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("Channel: bad input arity");
    std::size_t r = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= shape_[i]) throw std::invalid_argument("Channel: input index out of range");
      r = r * shape_[i] + idx[i];
    }
    return r;
  }
  double prob(std::span<const std::size_t> idx, std::size_t y) const { return row(row_index(idx))[y]; }

  Dist output_dist(std::size_t r) const {
    auto rw = row(r);
    return Dist(std::vector<double>(rw.begin(), rw.end()));
  }

  static Channel identity(std::size_t n) {
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1.0;
    return Channel({n}, n, std::move(p));
  }

  static Channel bsc(double crossover) {
    if (crossover < 0.0 || crossover > 1.0) throw std::invalid_argument("bsc: crossover in [0,1]");
    return Channel({2}, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
  }

  /// Binary channel Y = X xor S xor Z with Z ~ Bernoulli(z): inputs (x, s).
  static Channel binary_mod(double z) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("binary_mod: z in [0,1]");
    std::vector<double> p(2 * 2 * 2, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t y = 0; y < 2; ++y) p[(x * 2 + s) * 2 + y] = (y == (x ^ s)) ? 1.0 - z : z;
    return Channel({2, 2}, 2, std::move(p));
  }

 private:
  std::vector<std::size_t> shape_;
  std::size_t out_;
  std::vector<double> p_;  // [row][y]
};

/// Cascade of w1 with a post-processing map w_tilde on w1's output:
/// (w1 * w_tilde)(y2 | inputs) = sum_y1 w1(y1|inputs) w_tilde(y2|y1).
inline Channel compose(const Channel& w1, const Channel& w_tilde) {
  if (w_tilde.input_shape().size() != 1 || w_tilde.input_shape()[0] != w1.output_size()) {
    throw std::invalid_argument("compose: w_tilde input alphabet must equal w1 output alphabet");
  }
  const std::size_t rows = w1.num_rows();
  const std::size_t n1 = w1.output_size();
  const std::size_t n2 = w_tilde.output_size();
  std::vector<double> p(rows * n2, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    auto a = w1.row(r);
    for (std::size_t y1 = 0; y1 < n1; ++y1) {
      auto b = w_tilde.row(y1);
      for (std::size_t y2 = 0; y2 < n2; ++y2) p[r * n2 + y2] += a[y1] * b[y2];
    }
  }
  return Channel(w1.input_shape(), n2, std::move(p));
}

/// Family of channels over identical (X, S) -> Y alphabets plus the state
/// law; the component index plays the role of the unknown channel draw.
class CompoundDmc {
 public:
  CompoundDmc(std::vector<Channel> channels, Dist state_law)
      : channels_(std::move(channels)), state_law_(std::move(state_law)) {
    if (channels_.empty()) throw std::invalid_argument("CompoundDmc: at least one component");
    const auto& c0 = channels_.front();
    if (c0.input_shape().size() != 2) {
      throw std::invalid_argument("CompoundDmc: components must have (x, s) inputs");
    }
    for (const auto& c : channels_) {
      if (c.input_shape() != c0.input_shape() || c.output_size() != c0.output_size()) {
        throw std::invalid_argument("CompoundDmc: components must share alphabets");
      }
    }
    if (state_law_.size() != c0.input_shape()[1]) {
      throw std::invalid_argument("CompoundDmc: state law size does not match S alphabet");
    }
  }

  std::size_t k() const { return channels_.size(); }
  std::size_t x_size() const { return channels_.front().input_shape()[0]; }
  std::size_t s_size() const { return channels_.front().input_shape()[1]; }
  std::size_t y_size() const { return channels_.front().output_size(); }
  const Channel& channel(std::size_t i) const { return channels_.at(i); }
  const std::vector<Channel>& channels() const { return channels_; }
  const Dist& state_law() const { return state_law_; }

 private:
  std::vector<Channel> channels_;
  Dist state_law_;
};

/// Dense joint probability tensor over named finite variables.
class JointTable {
 public:
  JointTable(std::vector<std::string> axes, std::vector<std::size_t> sizes)
      : axes_(std::move(axes)), sizes_(std::move(sizes)) {
    init_strides();
    data_.assign(total_, 0.0);
  }
  JointTable(std::vector<std::string> axes, std::vector<std::size_t> sizes,
             std::vector<double> data)
      : axes_(std::move(axes)), sizes_(std::move(sizes)), data_(std::move(data)) {
    init_strides();
    if (data_.size() != total_) throw std::invalid_argument("JointTable: data size mismatch");
    detail::repair_mass(data_, "JointTable");
  }

  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t total_size() const { return total_; }

  std::size_t axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
      if (axes_[i] == name) return i;
    throw std::invalid_argument("JointTable: unknown axis '" + name + "'");
  }

  double& at(std::span<const std::size_t> idx) { return data_[flat(idx)]; }
  double at(std::span<const std::size_t> idx) const { return data_[flat(idx)]; }
  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

  /// Call after filling a default-constructed table: validates and repairs mass.
  void finalize() { detail::repair_mass(data_, "JointTable"); }

  /// Entropy (bits) of the marginal over the named axes.
  double entropy_of(const std::vector<std::string>& group) const {
    if (group.empty()) return 0.0;
    std::vector<double> marg = marginal_values(group);
    return detail::entropy_bits(marg);
  }

  /// Marginal values over the named axes, row-major in the given axis order.
  std::vector<double> marginal_values(const std::vector<std::string>& group) const {
    std::vector<std::size_t> gi(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) gi[i] = axis_index(group[i]);
    for (std::size_t i = 0; i < gi.size(); ++i)
      for (std::size_t j = i + 1; j < gi.size(); ++j)
        if (gi[i] == gi[j]) throw std::invalid_argument("JointTable: repeated axis in group");
    std::size_t out_total = 1;
    for (std::size_t a : gi) out_total *= sizes_[a];
    std::vector<double> out(out_total, 0.0);
    std::vector<std::size_t> idx(axes_.size(), 0);
    for (std::size_t f = 0; f < total_; ++f) {
      std::size_t rem = f;
      for (std::size_t a = 0; a < axes_.size(); ++a) {
        idx[a] = rem / strides_[a];
        rem %= strides_[a];
      }
      std::size_t o = 0;
      for (std::size_t a : gi) o = o * sizes_[a] + idx[a];
      out[o] += data_[f];
    }
    return out;
  }

 private:
  void init_strides() {
    if (axes_.size() != sizes_.size()) throw std::invalid_argument("JointTable: axes/sizes mismatch");
    if (axes_.empty()) throw std::invalid_argument("JointTable: no axes");
    for (std::size_t i = 0; i < axes_.size(); ++i)
      for (std::size_t j = i + 1; j < axes_.size(); ++j)
        if (axes_[i] == axes_[j]) throw std::invalid_argument("JointTable: duplicate axis name");
    total_ = 1;
    for (std::size_t s : sizes_) {
      if (s == 0) throw std::invalid_argument("JointTable: empty axis");
      total_ *= s;
      if (total_ > kMaxTableSize) throw std::invalid_argument("JointTable: tensor exceeds size cap");
    }
    strides_.assign(sizes_.size(), 1);
    for (std::size_t i = sizes_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * sizes_[i];
  }

  std::size_t flat(std::span<const std::size_t> idx) const {
    if (idx.size() != axes_.size()) throw std::invalid_argument("JointTable: bad index arity");
    std::size_t f = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= sizes_[i]) throw std::invalid_argument("JointTable: index out of range");
      f += idx[i] * strides_[i];
    }
    return f;
  }

  std::vector<std::string> axes_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
  std::vector<double> data_;
};

namespace detail {

inline void check_disjoint(const JointTable& j, const std::vector<std::string>& a,
                           const std::vector<std::string>& b, const char* what) {
  for (const auto& x : a) {
    j.axis_index(x);
    for (const auto& y : b) {
      if (x == y) throw std::invalid_argument(std::string(what) + ": overlapping axis '" + x + "'");
    }
  }
  for (const auto& y : b) j.axis_index(y);
}

inline std::vector<std::string> join_groups(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  std::vector<std::string> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace detail

/// I(A;B) in bits, computed as H(A)+H(B)-H(A,B).
inline double mutual_information(const JointTable& j, const std::vector<std::string>& group_a,
                                 const std::vector<std::string>& group_b) {
  detail::check_disjoint(j, group_a, group_b, "mutual_information");
  return j.entropy_of(group_a) + j.entropy_of(group_b) -
         j.entropy_of(detail::join_groups(group_a, group_b));
}

/// I(A;B|C) in bits; equals mutual_information when C is empty.
inline double conditional_mutual_information(const JointTable& j,
                                             const std::vector<std::string>& group_a,
                                             const std::vector<std::string>& group_b,
                                             const std::vector<std::string>& cond) {
  detail::check_disjoint(j, group_a, group_b, "conditional_mutual_information");
  detail::check_disjoint(j, group_a, cond, "conditional_mutual_information");
  detail::check_disjoint(j, group_b, cond, "conditional_mutual_information");
  const auto ac = detail::join_groups(group_a, cond);
  const auto bc = detail::join_groups(group_b, cond);
  const auto abc = detail::join_groups(detail::join_groups(group_a, group_b), cond);
  return j.entropy_of(ac) + j.entropy_of(bc) - j.entropy_of(abc) - j.entropy_of(cond);
}

}  // namespace gpcap
