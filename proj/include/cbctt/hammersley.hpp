#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbctt/annealer.hpp"

namespace cbctt {

/// Digit reversal of i in the given base, mapped into [0, 1).
inline double radical_inverse(int base, long long i) {
  const double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  while (i > 0) {
    value += factor * static_cast<double>(i % base);
    i /= base;
    factor *= inv_base;
  }
  return value;
}

inline std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int candidate = 2; static_cast<int>(primes.size()) < count; ++candidate) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
  }
  return primes;
}

/// The n-point Hammersley set in d dimensions: point i is
/// (i/n, phi_2(i), phi_3(i), phi_5(i), ...). Deterministic and low
/// discrepancy.
inline std::vector<std::vector<double>> hammersley_points(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("hammersley: n and d must be >= 1");
  const std::vector<int> primes = first_primes(d - 1);
  std::vector<std::vector<double>> points(n, std::vector<double>(d, 0.0));
  for (int i = 0; i < n; ++i) {
    points[i][0] = static_cast<double>(i) / n;
    for (int j = 1; j < d; ++j) {
      points[i][j] = radical_inverse(primes[j - 1], i);
    }
  }
  return points;
}

struct ParamRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// One sampled parameter configuration; `names` is shared row layout.
struct ConfigPoint {
  std::vector<std::string> names;
  std::vector<double> values;

  bool has(const std::string& name) const {
    for (const std::string& n : names) {
      if (n == name) return true;
    }
    return false;
  }
  double value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    throw std::invalid_argument("config has no parameter " + name);
  }
};

/// Affine map of unit-cube points onto the per-parameter intervals.
inline std::vector<ConfigPoint> scale_to_ranges(const std::vector<std::vector<double>>& points,
                                                const std::vector<ParamRange>& ranges) {
  std::vector<std::string> names;
  for (const ParamRange& r : ranges) {
    if (r.lo > r.hi) throw std::invalid_argument("inverted range for " + r.name);
    names.push_back(r.name);
  }
  std::vector<ConfigPoint> configs;
  configs.reserve(points.size());
  for (const auto& point : points) {
    if (point.size() != ranges.size()) {
      throw std::invalid_argument("point dimension does not match range count");
    }
    ConfigPoint cfg;
    cfg.names = names;
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      cfg.values.push_back(ranges[j].lo + point[j] * (ranges[j].hi - ranges[j].lo));
    }
    configs.push_back(std::move(cfg));
  }
  return configs;
}

/// Wide search space over all six parameters.
inline std::vector<ParamRange> wide_ranges() {
  return {{"T0", 1.0, 100.0},     {"T_min", 0.01, 1.0}, {"rho", 0.01, 1.0},
          {"cr", 0.99, 0.999},    {"w_hard", 10, 1000}, {"sr", 0.1, 0.9}};
}

/// Refined space: the three parameters that matter, the rest pinned to the
/// values the exploratory phase fixed.
inline std::vector<ParamRange> refined_ranges() {
  return {{"T0", 1.0, 40.0}, {"T_min", 0.015, 0.21}, {"rho", 0.034, 0.05}};
}

/// Applies a configuration on top of base parameters; unknown names are an
/// error so typos in CSV headers fail loudly.
inline SAParams to_sa_params(const ConfigPoint& cfg, SAParams base = SAParams{}) {
  for (std::size_t i = 0; i < cfg.names.size(); ++i) {
    const std::string& name = cfg.names[i];
    const double v = cfg.values[i];
    if (name == "T0") {
      base.t0 = v;
    } else if (name == "T_min") {
      base.t_min = v;
    } else if (name == "rho") {
      base.accepted_ratio = v;
    } else if (name == "cr") {
      base.cooling_rate = v;
    } else if (name == "sr") {
      base.swap_rate = v;
    } else if (name == "w_hard") {
      base.w_hard = std::llround(v);
    } else {
      throw std::invalid_argument("unknown parameter " + name);
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// CSV round trip: one row per configuration, named columns, `id` first.
// ---------------------------------------------------------------------------

inline void write_configs_csv(std::ostream& out, const std::vector<ConfigPoint>& configs) {
  if (configs.empty()) throw std::invalid_argument("no configurations to write");
  out << "id";
  for (const std::string& n : configs.front().names) out << "," << n;
  out << "\n";
  out.precision(12);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out << i;
    for (double v : configs[i].values) out << "," << v;
    out << "\n";
  }
}

inline std::vector<ConfigPoint> read_configs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty configuration CSV");
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
  };
  const std::vector<std::string> header = split(line);
  if (header.empty() || header.front() != "id") {
    throw std::invalid_argument("configuration CSV must start with an id column");
  }
  const std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<ConfigPoint> configs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("configuration CSV row has wrong field count");
    }
    ConfigPoint cfg;
    cfg.names = names;
    for (std::size_t i = 1; i < fields.size(); ++i) cfg.values.push_back(std::stod(fields[i]));
    configs.push_back(std::move(cfg));
  }
  if (configs.empty()) throw std::invalid_argument("configuration CSV has no rows");
  return configs;
}

}  // namespace cbctt
