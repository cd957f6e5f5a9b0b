#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "meshres/properties.hpp"

namespace meshres {

// log_ratio divides log1p-normalized properties (the pipeline default);
// raw_ratio divides raw properties and exists for ablations.
enum class RatioMode { log_ratio, raw_ratio };

std::string_view to_string(RatioMode mode);
RatioMode parse_ratio_mode(std::string_view text);

enum class PairLabel : std::uint8_t { non_match = 0, match = 1 };

struct PairFeatureVector {
  std::string candidate_id;
  std::string index_id;
  std::vector<double> values;  // candidate over index, schema order
  std::optional<PairLabel> label;

  bool is_match() const { return label == PairLabel::match; }
};

// Element-wise candidate/index ratio. Numerator and denominator are both
// floored at 1e-12, so every entry is finite and strictly positive, and
// equal inputs give exactly 1.
// Throws SchemaError on a length mismatch or when the inputs' normalization
// does not match `mode`.
PairFeatureVector pair_features(const PropertyVector& candidate, const PropertyVector& index,
                                RatioMode mode = RatioMode::log_ratio);

struct IdPair {
  std::string candidate_id;
  std::string index_id;
  std::optional<PairLabel> label;
};

// Featurizes id pairs against two tables; throws SchemaError if the
// tables' schemas differ.
std::vector<PairFeatureVector> pair_features(const PropertyTable& candidates, const PropertyTable& index,
                                             std::span<const IdPair> pairs,
                                             RatioMode mode = RatioMode::log_ratio);

// Whether epsilon is an absolute ratio tolerance or a fraction of r_g.
enum class EpsilonMode { absolute, relative };

struct DiscrepancyProfile {
  std::string property_name;
  double r_g = 1.0;    // median ratio over matches
  double sigma = 0.0;  // sample standard deviation of the ratios
  std::vector<std::pair<double, double>> curve;  // (epsilon, delta)
};

// Fraction of ratios falling outside [r_g - eps, r_g + eps].
double violation_fraction(std::span<const double> ratios, double r_g, double epsilon);

// Evenly spaced epsilons from 0 up to the largest |ratio - r_g|.
std::vector<double> epsilon_grid(std::span<const double> ratios, double r_g, std::size_t steps = 50);

// Estimates r_g and sigma for one property from matching pairs (pairs with
// another label are ignored) and traces delta over `epsilons` (the default
// grid when empty). Throws Error when fewer than two matches are given.
DiscrepancyProfile estimate_discrepancy(std::span<const PairFeatureVector> pairs,
                                        const PropertySchema& schema, std::string_view property,
                                        std::span<const double> epsilons = {},
                                        EpsilonMode mode = EpsilonMode::absolute);

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  std::size_t count = 0;
};

struct RatioDistribution {
  std::string property_name;
  double bin_width = 0.0;
  std::vector<HistogramBin> match;      // non-empty bins only, ascending
  std::vector<HistogramBin> non_match;
};

// Bins are aligned to multiples of `bin_width`: [k*w, (k+1)*w).
RatioDistribution ratio_distribution(std::span<const PairFeatureVector> pairs,
                                     const PropertySchema& schema, std::string_view property,
                                     double bin_width);

void write_ratio_distribution_csv(std::ostream& out, std::span<const RatioDistribution> dists);
void write_eps_delta_csv(std::ostream& out, std::span<const DiscrepancyProfile> profiles);

// Pair matrix CSV: candidate_id,index_id,label,<schema names>. The label
// column is 1, 0 or empty.
void write_pair_csv(std::ostream& out, const PropertySchema& schema,
                    std::span<const PairFeatureVector> pairs);
std::vector<PairFeatureVector> read_pair_csv(std::istream& in, PropertySchema* schema);

}  // namespace meshres
