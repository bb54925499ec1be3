#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "comindex/dataset.hpp"
#include "comindex/matrix.hpp"

namespace comindex {

// Standard normal draws from a fixed engine via Box-Muller, so the same
// seed gives the same stream on every standard library.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Cases generated from a simple-structure factor model: each factor owns
// `vars_per_factor` consecutive indicators with loadings drawn uniformly
// from [loading_low, loading_high], plus independent noise.
struct PlantedModel {
  std::size_t n_cases = 88;
  std::size_t n_factors = 3;
  std::size_t vars_per_factor = 4;
  std::size_t noise_variables = 0;  // indicators with no factor
  double noise_sd = 0.3;
  double loading_low = 0.7;
  double loading_high = 0.9;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  IndicatorDataset dataset;  // indicators rescaled to assorted units
  Matrix loadings;           // generating loadings, p x n_factors
};

SyntheticData make_planted_dataset(const PlantedModel& model);

}  // namespace comindex
