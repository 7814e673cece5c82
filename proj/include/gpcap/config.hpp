#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpcap/gdp.hpp"
#include "gpcap/gp.hpp"
#include "gpcap/optimize.hpp"
#include "gpcap/prob.hpp"

// Structured-config ingestion and emission. One JSON schema serves every
// command: channels and laws are nested arrays of decimals, row-major, with
// the output axis last (documented in the README). Parse errors carry
// line/column; semantic errors carry the path of the offending field.

namespace gpcap::cfg {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

using json = nlohmann::json;

inline json load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config: " + path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": " + e.what());
  }
}

/// Path-tracking view over a json value; every accessor names the offending
/// field on failure.
class Cursor {
 public:
  Cursor(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Cursor at(const std::string& key) const {
    if (!j_->is_object() || !j_->contains(key)) {
      throw ConfigError("config: missing field " + path_ + "/" + key);
    }
    return Cursor((*j_)[key], path_ + "/" + key);
  }

  std::size_t array_size() const {
    require(j_->is_array(), "must be an array");
    return j_->size();
  }

  Cursor item(std::size_t i) const {
    require(j_->is_array(), "must be an array");
    if (i >= j_->size()) throw ConfigError("config: index out of range at " + path_);
    return Cursor((*j_)[i], path_ + "/" + std::to_string(i));
  }

  double as_double() const {
    require(j_->is_number(), "must be a number");
    return j_->get<double>();
  }
  std::int64_t as_int() const {
    require(j_->is_number_integer(), "must be an integer");
    return j_->get<std::int64_t>();
  }
  std::size_t as_size() const {
    const auto v = as_int();
    if (v < 0) throw ConfigError("config: " + path_ + " must be nonnegative");
    return static_cast<std::size_t>(v);
  }
  bool as_bool() const {
    require(j_->is_boolean(), "must be a boolean");
    return j_->get<bool>();
  }
  std::string as_string() const {
    require(j_->is_string(), "must be a string");
    return j_->get<std::string>();
  }
  std::vector<double> as_double_array() const {
    require(j_->is_array(), "must be an array");
    std::vector<double> out;
    out.reserve(j_->size());
    for (std::size_t i = 0; i < j_->size(); ++i) out.push_back(item(i).as_double());
    return out;
  }

 private:
  void require(bool ok, const char* what) const {
    if (!ok) throw ConfigError("config: " + path_ + " " + what);
  }
  const json* j_;
  std::string path_;
};

namespace detail {

/// Infers the sizes of a nested rectangular array of the given depth.
inline std::vector<std::size_t> nested_dims(const Cursor& cur, std::size_t depth) {
  std::vector<std::size_t> dims;
  Cursor c = cur;
  std::vector<Cursor> walk{c};
  for (std::size_t d = 0; d < depth; ++d) {
    dims.push_back(walk.back().array_size());
    if (dims.back() == 0) throw ConfigError("config: empty array at " + walk.back().path());
    if (d + 1 < depth) walk.push_back(walk.back().item(0));
  }
  return dims;
}

inline void flatten_nested(const Cursor& cur, std::span<const std::size_t> dims,
                           std::vector<double>& out) {
  if (dims.empty()) {
    out.push_back(cur.as_double());
    return;
  }
  if (cur.array_size() != dims[0]) {
    throw ConfigError("config: " + cur.path() + " must have " + std::to_string(dims[0]) +
                      " entries, found " + std::to_string(cur.array_size()));
  }
  for (std::size_t i = 0; i < dims[0]; ++i) {
    flatten_nested(cur.item(i), dims.subspan(1), out);
  }
}

/// Reads a conditional table stored as nested arrays: input axes first (in
/// order), output axis last.
inline Channel parse_table(const Cursor& cur, std::size_t input_arity) {
  const auto dims = nested_dims(cur, input_arity + 1);
  std::vector<double> flat;
  flatten_nested(cur, dims, flat);
  std::vector<std::size_t> shape(dims.begin(), dims.end() - 1);
  try {
    return Channel(shape, dims.back(), std::move(flat));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + cur.path() + ": " + e.what());
  }
}

}  // namespace detail

/// {"state_law": [..], "channels": [ [[[..y..]..s..]..x..], ... ]}
inline CompoundDmc parse_dmc(const Cursor& cur) {
  const Cursor chans = cur.at("channels");
  if (chans.array_size() == 0) throw ConfigError("config: " + chans.path() + " must be nonempty");
  std::vector<Channel> channels;
  for (std::size_t i = 0; i < chans.array_size(); ++i) {
    channels.push_back(detail::parse_table(chans.item(i), 2));
  }
  std::vector<double> sl = cur.at("state_law").as_double_array();
  try {
    return CompoundDmc(std::move(channels), Dist(std::move(sl)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + cur.path() + ": " + e.what());
  }
}

/// {"u_given_s": [s][u], "v_given_us": [k][u][s][v], "x_given_uvs": [u](v..)[s][x]}
inline CodingLaw parse_coding_law(const Cursor& cur, const CompoundDmc& dmc) {
  CodingLaw law;
  law.u_given_s = detail::parse_table(cur.at("u_given_s"), 1);
  if (cur.has("v_given_us")) {
    const Cursor vs = cur.at("v_given_us");
    for (std::size_t k = 0; k < vs.array_size(); ++k) {
      law.v_given_us.push_back(detail::parse_table(vs.item(k), 2));
    }
  }
  law.x_given_uvs = detail::parse_table(cur.at("x_given_uvs"), 2 + law.v_given_us.size());
  try {
    law.validate(dmc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + cur.path() + ": " + e.what());
  }
  return law;
}

/// {"vk_given_s": [s][vK], "v_given_s_vnext": [step][s][vnext][v], "x_given_s_v1": [s][v1][x]}
inline DegradedChainLaw parse_chain_law(const Cursor& cur) {
  DegradedChainLaw law;
  law.vk_given_s = detail::parse_table(cur.at("vk_given_s"), 1);
  if (cur.has("v_given_s_vnext")) {
    const Cursor vs = cur.at("v_given_s_vnext");
    for (std::size_t i = 0; i < vs.array_size(); ++i) {
      law.v_given_s_vnext.push_back(detail::parse_table(vs.item(i), 2));
    }
  }
  law.x_given_s_v1 = detail::parse_table(cur.at("x_given_s_v1"), 2);
  return law;
}

/// {"p": .., "n": .., "q": .., "thetas": [..]}
inline gdp::GdpParams parse_gdp(const Cursor& cur) {
  try {
    return gdp::GdpParams(cur.at("p").as_double(), cur.at("n").as_double(),
                          cur.has("q") ? cur.at("q").as_double() : 0.0,
                          cur.at("thetas").as_double_array());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + cur.path() + ": " + e.what());
  }
}

inline SearchConfig parse_search(const Cursor& cur) {
  SearchConfig s;
  if (cur.has("restarts")) s.restarts = static_cast<int>(cur.at("restarts").as_int());
  if (cur.has("max_iters")) s.max_iters = static_cast<int>(cur.at("max_iters").as_int());
  if (cur.has("step_init")) s.step_init = cur.at("step_init").as_double();
  if (cur.has("step_decay")) s.step_decay = cur.at("step_decay").as_double();
  if (cur.has("seed")) s.seed = static_cast<std::uint64_t>(cur.at("seed").as_int());
  if (cur.has("grid_fallback")) s.grid_fallback = cur.at("grid_fallback").as_double();
  if (cur.has("tol")) s.tol = cur.at("tol").as_double();
  if (cur.has("tol_window")) s.tol_window = static_cast<int>(cur.at("tol_window").as_int());
  if (cur.has("polish")) s.polish = cur.at("polish").as_bool();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + cur.path() + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Emission (laws in the same schema the parser reads)
// ---------------------------------------------------------------------------

namespace detail {

inline json table_to_json(const Channel& ch) {
  // reconstruct the nested [inputs..][output] array
  std::function<json(std::size_t, std::size_t, std::size_t)> build =
      [&](std::size_t axis, std::size_t row_base, std::size_t rows_left) -> json {
    const auto& shape = ch.input_shape();
    json arr = json::array();
    if (axis == shape.size()) {
      for (double v : ch.row(row_base)) arr.push_back(v);
      return arr;
    }
    const std::size_t stride = rows_left / shape[axis];
    for (std::size_t i = 0; i < shape[axis]; ++i) {
      arr.push_back(build(axis + 1, row_base + i * stride, stride));
    }
    return arr;
  };
  std::size_t rows = 1;
  for (auto s : ch.input_shape()) rows *= s;
  return build(0, 0, rows);
}

}  // namespace detail

inline json law_to_json(const CodingLaw& law) {
  json j;
  j["u_given_s"] = detail::table_to_json(law.u_given_s);
  if (!law.v_given_us.empty()) {
    json vs = json::array();
    for (const auto& v : law.v_given_us) vs.push_back(detail::table_to_json(v));
    j["v_given_us"] = vs;
  }
  j["x_given_uvs"] = detail::table_to_json(law.x_given_uvs);
  return j;
}

inline json dmc_to_json(const CompoundDmc& dmc) {
  json j;
  j["state_law"] = dmc.state_law().probs();
  json chans = json::array();
  for (const auto& c : dmc.channels()) chans.push_back(detail::table_to_json(c));
  j["channels"] = chans;
  return j;
}

}  // namespace gpcap::cfg
