#include "meshres/candidates.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "meshres/csv.hpp"
#include "meshres/error.hpp"

namespace meshres {

CandidateSet CandidateSet::truncated(std::size_t new_k) const {
  CandidateSet out;
  out.k = std::min(k, new_k);
  out.pruned = pruned;
  out.query_seconds = query_seconds;
  for (const CandidatePair& p : pairs) {
    if (p.rank <= new_k) out.pairs.push_back(p);
  }
  return out;
}

void CandidateSet::check() const {
  std::unordered_set<std::string> finished;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CandidatePair& p = pairs[i];
    const bool continues = i > 0 && pairs[i - 1].candidate_id == p.candidate_id;
    if (!continues) {
      if (!finished.insert(p.candidate_id).second) {
        throw InvariantError("pairs of candidate '" + p.candidate_id + "' are not contiguous");
      }
      if (p.rank != 1) throw InvariantError("neighbour list of '" + p.candidate_id + "' does not start at rank 1");
    } else {
      if (p.rank != pairs[i - 1].rank + 1) throw InvariantError("ranks of '" + p.candidate_id + "' skip a value");
      if (p.distance < pairs[i - 1].distance) {
        throw InvariantError("distances of '" + p.candidate_id + "' decrease");
      }
    }
    if (p.rank > k) throw InvariantError("candidate '" + p.candidate_id + "' has more than k neighbours");
  }
}

void write_candidates_csv(std::ostream& out, const CandidateSet& set) {
  out << "candidate_id,index_id,distance,rank\n";
  for (const CandidatePair& p : set.pairs) {
    out << csv::join({p.candidate_id, p.index_id, csv::format_double(p.distance), std::to_string(p.rank)}) << '\n';
  }
}

CandidateSet read_candidates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::split(line) != std::vector<std::string>{"candidate_id", "index_id", "distance", "rank"}) {
    throw SchemaError("candidate CSV must start with candidate_id,index_id,distance,rank");
  }
  CandidateSet set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw SchemaError("candidate CSV row has wrong width");
    const long long rank = csv::parse_int(f[3]);
    if (rank < 1) throw SchemaError("candidate rank must be >= 1");
    set.pairs.push_back({f[0], f[1], csv::parse_double(f[2]), static_cast<std::size_t>(rank)});
    set.k = std::max(set.k, static_cast<std::size_t>(rank));
  }
  return set;
}

}  // namespace meshres
