#include "comindex/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "comindex/error.hpp"

namespace comindex {

double NormalStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

SyntheticData make_planted_dataset(const PlantedModel& m) {
  const std::size_t p = m.n_factors * m.vars_per_factor + m.noise_variables;
  if (p < 2 || m.n_cases < 3) {
    throw ValidationError("planted dataset needs at least 3 cases and 2 indicators");
  }
  NormalStream rng(m.seed);

  const std::size_t k = std::max<std::size_t>(m.n_factors, 1);
  Matrix loadings(p, k);
  for (std::size_t f = 0; f < m.n_factors; ++f) {
    for (std::size_t v = 0; v < m.vars_per_factor; ++v) {
      loadings(f * m.vars_per_factor + v, f) =
          m.loading_low + (m.loading_high - m.loading_low) * rng.uniform();
    }
  }

  // Assorted units: each indicator gets its own scale and offset.
  std::vector<double> scale(p), offset(p);
  for (std::size_t j = 0; j < p; ++j) {
    scale[j] = std::pow(10.0, std::floor(4.0 * rng.uniform()));
    offset[j] = scale[j] * std::floor(10.0 * rng.uniform());
  }

  std::vector<double> values(m.n_cases * p);
  std::vector<double> latent(k);
  for (std::size_t i = 0; i < m.n_cases; ++i) {
    for (double& f : latent) f = rng.next();
    for (std::size_t j = 0; j < p; ++j) {
      double x = m.noise_sd * rng.next();
      if (j >= m.n_factors * m.vars_per_factor) x = rng.next();
      for (std::size_t f = 0; f < m.n_factors; ++f) x += loadings(j, f) * latent[f];
      values[i * p + j] = offset[j] + scale[j] * x;
    }
  }

  std::vector<std::string> ids, names;
  for (std::size_t i = 0; i < m.n_cases; ++i) {
    std::string id = std::to_string(i + 1);
    ids.push_back("C" + std::string(3 - std::min<std::size_t>(3, id.size()), '0') + id);
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (j < m.n_factors * m.vars_per_factor) {
      names.push_back("F" + std::to_string(j / m.vars_per_factor + 1) + "_V" +
                      std::to_string(j % m.vars_per_factor + 1));
    } else {
      names.push_back("Noise" + std::to_string(j - m.n_factors * m.vars_per_factor + 1));
    }
  }
  return {IndicatorDataset(std::move(ids), std::move(names), Matrix(m.n_cases, p, std::move(values))),
          std::move(loadings)};
}

}  // namespace comindex
