#include "meshres/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>

#include "meshres/error.hpp"

namespace meshres {

struct KdTree::Heap {
  struct Entry {
    double d2;
    std::size_t rank;
    std::size_t point;
    bool operator<(const Entry& o) const { return d2 < o.d2 || (d2 == o.d2 && rank < o.rank); }
  };
  std::size_t k;
  std::priority_queue<Entry> q;  // worst on top

  bool full() const { return q.size() >= k; }
  void offer(const Entry& e) {
    if (!full()) {
      q.push(e);
    } else if (e < q.top()) {
      q.pop();
      q.push(e);
    }
  }
};

KdTree::KdTree(std::size_t dim, std::vector<double> coords, std::vector<std::string> ids)
    : dim_(dim), coords_(std::move(coords)), ids_(std::move(ids)) {
  if (dim_ == 0 || ids_.empty()) throw DomainError("k-d tree needs at least one point of positive dimension");
  if (coords_.size() != dim_ * ids_.size()) throw DomainError("k-d tree coordinates do not match the id count");
  std::vector<std::size_t> by_id(ids_.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b] || (ids_[a] == ids_[b] && a < b); });
  rank_.resize(ids_.size());
  for (std::size_t r = 0; r < by_id.size(); ++r) rank_[by_id[r]] = r;
  order_.resize(ids_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  build(0, order_.size(), 0);
}

void KdTree::build(std::size_t lo, std::size_t hi, std::size_t depth) {
  if (hi - lo <= 1) return;
  const std::size_t axis = depth % dim_;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                     const double va = coords_[a * dim_ + axis];
                     const double vb = coords_[b * dim_ + axis];
                     return va < vb || (va == vb && rank_[a] < rank_[b]);
                   });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

double KdTree::dist2(std::size_t point, std::span<const double> q) const {
  double s = 0.0;
  const double* p = coords_.data() + point * dim_;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double d = q[j] - p[j];
    s += d * d;
  }
  return s;
}

void KdTree::search(std::size_t lo, std::size_t hi, std::size_t depth, std::span<const double> q,
                    Heap& heap) const {
  if (lo >= hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::size_t point = order_[mid];
  heap.offer({dist2(point, q), rank_[point], point});
  if (hi - lo == 1) return;

  const std::size_t axis = depth % dim_;
  const double diff = q[axis] - coords_[point * dim_ + axis];
  const bool go_left = diff <= 0.0;
  if (go_left) {
    search(lo, mid, depth + 1, q, heap);
  } else {
    search(mid + 1, hi, depth + 1, q, heap);
  }
  // Points across the plane are at least |diff| away; equality still has
  // to be explored because a smaller id may win the tie.
  if (!heap.full() || diff * diff <= heap.q.top().d2) {
    if (go_left) {
      search(mid + 1, hi, depth + 1, q, heap);
    } else {
      search(lo, mid, depth + 1, q, heap);
    }
  }
}

std::vector<Neighbor> KdTree::knn(std::span<const double> query, std::size_t k, double max_distance) const {
  if (query.size() != dim_) throw DomainError("query dimension does not match the k-d tree");
  k = std::min(k, size());
  if (k == 0) return {};
  Heap heap{k, {}};
  search(0, order_.size(), 0, query, heap);
  std::vector<Neighbor> out(heap.q.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.q.top().point, std::sqrt(heap.q.top().d2)};
    heap.q.pop();
  }
  while (!out.empty() && out.back().distance > max_distance) out.pop_back();
  return out;
}

}  // namespace meshres
