#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace meshres {

struct Neighbor {
  std::size_t point = 0;  // index into the points given at construction
  double distance = 0.0;  // Euclidean
};

// Exact k-nearest-neighbour search. The tree is implicit over a permuted
// copy of the points: every node is one point, split on the median along
// the axes in turn. Equal distances are ordered by lexicographic id.
class KdTree {
 public:
  KdTree() = default;
  // `coords` is row-major with `dim` columns; `ids` gives one label per
  // point. Throws DomainError on an empty set or a shape mismatch.
  KdTree(std::size_t dim, std::vector<double> coords, std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& id(std::size_t point) const { return ids_[point]; }

  // The min(k, size()) nearest points by (distance, id), dropping those
  // farther than `max_distance`.
  std::vector<Neighbor> knn(std::span<const double> query, std::size_t k,
                            double max_distance = std::numeric_limits<double>::infinity()) const;

 private:
  struct Heap;
  void build(std::size_t lo, std::size_t hi, std::size_t depth);
  void search(std::size_t lo, std::size_t hi, std::size_t depth, std::span<const double> q, Heap& heap) const;
  double dist2(std::size_t slot, std::span<const double> q) const;

  std::size_t dim_ = 0;
  std::vector<double> coords_;           // original row order
  std::vector<std::string> ids_;
  std::vector<std::size_t> rank_;        // lexicographic rank of each id
  std::vector<std::size_t> order_;       // implicit tree: slot -> point
};

}  // namespace meshres
