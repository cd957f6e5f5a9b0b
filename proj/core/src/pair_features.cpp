#include "meshres/pair_features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "meshres/csv.hpp"
#include "meshres/error.hpp"
#include "meshres/geometry.hpp"

namespace meshres {

std::string_view to_string(RatioMode mode) {
  return mode == RatioMode::log_ratio ? "log_ratio" : "raw_ratio";
}

RatioMode parse_ratio_mode(std::string_view text) {
  if (text == "log_ratio" || text == "log") return RatioMode::log_ratio;
  if (text == "raw_ratio" || text == "raw") return RatioMode::raw_ratio;
  throw SchemaError("unknown ratio mode '" + std::string(text) + "'");
}

PairFeatureVector pair_features(const PropertyVector& candidate, const PropertyVector& index,
                                RatioMode mode) {
  if (candidate.values.size() != index.values.size()) {
    throw SchemaError("schema mismatch between '" + candidate.mesh_id + "' and '" + index.mesh_id + "'");
  }
  const bool want_normalized = mode == RatioMode::log_ratio;
  if (candidate.normalized != want_normalized || index.normalized != want_normalized) {
    throw SchemaError(std::string(to_string(mode)) + " features need " +
                      (want_normalized ? "log1p-normalized" : "raw") + " property vectors");
  }
  PairFeatureVector out;
  out.candidate_id = candidate.mesh_id;
  out.index_id = index.mesh_id;
  out.values.resize(candidate.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = guarded(candidate.values[i]) / guarded(index.values[i]);
  }
  return out;
}

std::vector<PairFeatureVector> pair_features(const PropertyTable& candidates, const PropertyTable& index,
                                             std::span<const IdPair> pairs, RatioMode mode) {
  if (!(candidates.schema() == index.schema())) {
    throw SchemaError("candidate and index property tables use different schemas");
  }
  std::vector<PairFeatureVector> out;
  out.reserve(pairs.size());
  for (const IdPair& p : pairs) {
    out.push_back(pair_features(candidates.at(p.candidate_id), index.at(p.index_id), mode));
    out.back().label = p.label;
  }
  return out;
}

double violation_fraction(std::span<const double> ratios, double r_g, double epsilon) {
  if (ratios.empty()) return 0.0;
  std::size_t outside = 0;
  for (double r : ratios) {
    if (std::abs(r - r_g) > epsilon) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(ratios.size());
}

std::vector<double> epsilon_grid(std::span<const double> ratios, double r_g, std::size_t steps) {
  double spread = 0.0;
  for (double r : ratios) spread = std::max(spread, std::abs(r - r_g));
  std::vector<double> grid;
  steps = std::max<std::size_t>(steps, 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    // the last point is the spread itself so the curve always reaches zero
    grid.push_back(i == steps ? spread : spread * static_cast<double>(i) / static_cast<double>(steps));
  }
  return grid;
}

namespace {

std::vector<double> match_ratios(std::span<const PairFeatureVector> pairs, std::size_t column) {
  std::vector<double> ratios;
  for (const PairFeatureVector& p : pairs) {
    if (p.is_match()) ratios.push_back(p.values.at(column));
  }
  return ratios;
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

DiscrepancyProfile estimate_discrepancy(std::span<const PairFeatureVector> pairs,
                                        const PropertySchema& schema, std::string_view property,
                                        std::span<const double> epsilons, EpsilonMode mode) {
  const std::size_t column = schema.require_index(property);
  const std::vector<double> ratios = match_ratios(pairs, column);
  if (ratios.size() < 2) {
    throw Error("discrepancy estimation needs at least two matching pairs, got " +
                std::to_string(ratios.size()));
  }

  DiscrepancyProfile profile;
  profile.property_name = std::string(property);
  profile.r_g = median(ratios);
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  profile.sigma = std::sqrt(ss / static_cast<double>(ratios.size() - 1));

  std::vector<double> grid(epsilons.begin(), epsilons.end());
  if (grid.empty()) {
    grid = epsilon_grid(ratios, profile.r_g);
    if (mode == EpsilonMode::relative) {
      for (double& e : grid) e /= profile.r_g;
    }
  }
  std::sort(grid.begin(), grid.end());
  for (double eps : grid) {
    const double absolute = mode == EpsilonMode::relative ? eps * profile.r_g : eps;
    profile.curve.emplace_back(eps, violation_fraction(ratios, profile.r_g, absolute));
  }
  return profile;
}

namespace {

std::vector<HistogramBin> bin(const std::vector<double>& values, double width) {
  std::map<long long, std::size_t> counts;
  for (double v : values) ++counts[static_cast<long long>(std::floor(v / width))];
  std::vector<HistogramBin> bins;
  for (const auto& [k, count] : counts) {
    bins.push_back({static_cast<double>(k) * width, static_cast<double>(k + 1) * width, count});
  }
  return bins;
}

}  // namespace

RatioDistribution ratio_distribution(std::span<const PairFeatureVector> pairs,
                                     const PropertySchema& schema, std::string_view property,
                                     double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("histogram bin width must be positive");
  const std::size_t column = schema.require_index(property);
  std::vector<double> match, non_match;
  for (const PairFeatureVector& p : pairs) {
    if (!p.label) continue;
    (p.is_match() ? match : non_match).push_back(p.values.at(column));
  }
  RatioDistribution dist;
  dist.property_name = std::string(property);
  dist.bin_width = bin_width;
  dist.match = bin(match, bin_width);
  dist.non_match = bin(non_match, bin_width);
  return dist;
}

void write_ratio_distribution_csv(std::ostream& out, std::span<const RatioDistribution> dists) {
  out << "property,class,bin_start,bin_end,count\n";
  for (const RatioDistribution& d : dists) {
    for (const auto& [label, bins] : {std::pair{"match", &d.match}, std::pair{"non_match", &d.non_match}}) {
      for (const HistogramBin& b : *bins) {
        out << d.property_name << ',' << label << ',' << csv::format_double(b.start) << ','
            << csv::format_double(b.end) << ',' << b.count << '\n';
      }
    }
  }
}

void write_eps_delta_csv(std::ostream& out, std::span<const DiscrepancyProfile> profiles) {
  out << "property,r_g,sigma,epsilon,delta\n";
  for (const DiscrepancyProfile& p : profiles) {
    for (const auto& [eps, delta] : p.curve) {
      out << p.property_name << ',' << csv::format_double(p.r_g) << ',' << csv::format_double(p.sigma)
          << ',' << csv::format_double(eps) << ',' << csv::format_double(delta) << '\n';
    }
  }
}

void write_pair_csv(std::ostream& out, const PropertySchema& schema,
                    std::span<const PairFeatureVector> pairs) {
  std::vector<std::string> header{"candidate_id", "index_id", "label"};
  for (const std::string& name : schema.names()) header.push_back(name);
  out << csv::join(header) << '\n';
  for (const PairFeatureVector& p : pairs) {
    std::vector<std::string> fields{p.candidate_id, p.index_id,
                                    p.label ? (p.is_match() ? "1" : "0") : ""};
    for (double v : p.values) fields.push_back(csv::format_double(v));
    out << csv::join(fields) << '\n';
  }
}

std::vector<PairFeatureVector> read_pair_csv(std::istream& in, PropertySchema* schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("pair CSV is empty");
  std::vector<std::string> header = csv::split(line);
  if (header.size() < 4 || header[0] != "candidate_id" || header[1] != "index_id" || header[2] != "label") {
    throw SchemaError("pair CSV must start with candidate_id,index_id,label");
  }
  const std::vector<std::string> names(header.begin() + 3, header.end());
  const PropertySchema parsed = PropertySchema::from_names(names);
  if (schema != nullptr) *schema = parsed;

  std::vector<PairFeatureVector> pairs;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) throw SchemaError("pair CSV row has wrong width");
    PairFeatureVector p;
    p.candidate_id = fields[0];
    p.index_id = fields[1];
    if (fields[2] == "1") {
      p.label = PairLabel::match;
    } else if (fields[2] == "0") {
      p.label = PairLabel::non_match;
    } else if (!fields[2].empty()) {
      throw SchemaError("pair label must be 1, 0 or empty");
    }
    for (std::size_t i = 3; i < fields.size(); ++i) p.values.push_back(csv::parse_double(fields[i]));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace meshres
