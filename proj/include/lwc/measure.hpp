#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lwc/canonical.hpp"
#include "lwc/error.hpp"

namespace lwc {

/// Finite nonnegative measure over keys: canonical codes, integers, or the
/// bin index of a real value.
template <class Key>
class EmpiricalMeasure {
 public:
  using key_type = Key;

  void add(const Key& key, double w = 1.0) {
    require(w >= 0.0 && std::isfinite(w), "measure weights must be finite and nonnegative");
    atoms_[key] += w;
  }

  void merge(const EmpiricalMeasure& other) {
    for (const auto& [k, w] : other.atoms_) add(k, w);
  }

  const std::map<Key, double>& atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// Sum of atom weights, recomputed in key order.
  double total() const {
    return std::accumulate(atoms_.begin(), atoms_.end(), 0.0,
                           [](double s, const auto& kv) { return s + kv.second; });
  }

  double weight(const Key& key) const {
    auto it = atoms_.find(key);
    return it == atoms_.end() ? 0.0 : it->second;
  }

  double probability(const Key& key) const {
    double t = total();
    require(t > 0.0, "zero-total measure cannot be normalized");
    return weight(key) / t;
  }

  EmpiricalMeasure normalized() const {
    double t = total();
    require(t > 0.0, "zero-total measure cannot be normalized");
    EmpiricalMeasure out;
    for (const auto& [k, w] : atoms_) out.atoms_.emplace(k, w / t);
    return out;
  }

  template <class F>
  auto map_keys(F&& f) const {
    EmpiricalMeasure<decltype(f(std::declval<const Key&>()))> out;
    for (const auto& [k, w] : atoms_) out.add(f(k), w);
    return out;
  }

 private:
  std::map<Key, double> atoms_;
};

using CodeMeasure = EmpiricalMeasure<std::string>;
using IntMeasure = EmpiricalMeasure<std::int64_t>;

/// Half-open bins [i*width, (i+1)*width) for real-valued keys.
struct RealBinning {
  double width = 0.05;
  std::int64_t bin(double x) const { return static_cast<std::int64_t>(std::floor(x / width)); }
  double lower(std::int64_t b) const { return static_cast<double>(b) * width; }
  double center(std::int64_t b) const { return (static_cast<double>(b) + 0.5) * width; }
};

/// Total-variation distance between the normalized measures.
template <class Key>
double tv_distance(const EmpiricalMeasure<Key>& a, const EmpiricalMeasure<Key>& b) {
  const double ta = a.total(), tb = b.total();
  require(ta > 0.0 && tb > 0.0, "tv_distance: zero-total measure");
  double sum = 0.0;
  auto ia = a.atoms().begin(), ib = b.atoms().begin();
  const auto ea = a.atoms().end(), eb = b.atoms().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      sum += ia->second / ta;
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      sum += ib->second / tb;
      ++ib;
    } else {
      sum += std::abs(ia->second / ta - ib->second / tb);
      ++ia;
      ++ib;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

namespace detail {
inline std::string key_string(const std::string& k) { return k; }
inline std::string key_string(const CanonicalCode& k) { return k.bytes; }
inline std::string key_string(std::int64_t k) { return std::to_string(k); }
}  // namespace detail

/// {"atoms": [{"key": ..., "w": ...}], "total": t}
template <class Key, class Format>
nlohmann::json to_json(const EmpiricalMeasure<Key>& m, Format&& format) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [k, w] : m.atoms()) atoms.push_back({{"key", format(k)}, {"w", w}});
  return {{"atoms", std::move(atoms)}, {"total", m.total()}};
}

template <class Key>
nlohmann::json to_json(const EmpiricalMeasure<Key>& m) {
  return to_json(m, [](const Key& k) { return detail::key_string(k); });
}

/// Binned real measure; keys are written as the bin's lower edge.
inline nlohmann::json to_json(const IntMeasure& m, const RealBinning& bins) {
  return to_json(m, [&](std::int64_t b) {
    std::ostringstream os;
    os.precision(10);
    os << bins.lower(b);
    return os.str();
  });
}

inline CodeMeasure code_measure_from_json(const nlohmann::json& j) {
  CodeMeasure m;
  for (const auto& a : j.at("atoms")) m.add(a.at("key").get<std::string>(), a.at("w").get<double>());
  return m;
}

}  // namespace lwc
