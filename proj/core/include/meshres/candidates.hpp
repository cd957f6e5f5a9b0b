#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace meshres {

struct CandidatePair {
  std::string candidate_id;
  std::string index_id;
  double distance = 0.0;
  std::size_t rank = 1;  // 1-based position in the candidate's neighbour list
};

// Blocking output: per candidate, at most k index ids by increasing
// distance. Pairs of one candidate are contiguous.
struct CandidateSet {
  std::vector<CandidatePair> pairs;
  std::size_t k = 0;
  bool pruned = false;
  double query_seconds = 0.0;

  std::size_t size() const noexcept { return pairs.size(); }
  // Keeps ranks <= k.
  CandidateSet truncated(std::size_t k) const;
  // Throws InvariantError when a candidate has more than k entries,
  // decreasing distances or non-consecutive ranks.
  void check() const;
};

// CSV with header candidate_id,index_id,distance,rank.
void write_candidates_csv(std::ostream& out, const CandidateSet& set);
CandidateSet read_candidates_csv(std::istream& in);

}  // namespace meshres
