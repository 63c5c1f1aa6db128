#include <algorithm>
#include <cmath>
#include <thread>

#include "v2r/kernels.hpp"
#include "v2r/matching.hpp"

namespace v2r {

const char* metric_name(Metric m) { return m == Metric::cosine ? "cosine" : "l2"; }

Metric metric_from_name(const std::string& s) {
  if (s == "cosine") return Metric::cosine;
  if (s == "l2") return Metric::l2;
  raise(Errc::invalid_argument, "metric must be cosine or l2");
}

FlatIndex::FlatIndex(uint32_t dim, Metric metric)
    : dim_(dim), metric_(metric), store_(std::make_shared<Store>()) {
  if (dim < 1) raise(Errc::bad_dimensions, "index dim must be >= 1");
}

FlatIndex::FlatIndex(const FlatIndex& other)
    : dim_(other.dim_), metric_(other.metric_), store_(other.snapshot()) {}

std::shared_ptr<const FlatIndex::Store> FlatIndex::snapshot() const {
  std::lock_guard lock(mu_);
  return store_;
}

size_t FlatIndex::size() const { return snapshot()->ids.size(); }

std::vector<uint64_t> FlatIndex::ids() const { return snapshot()->ids; }

std::vector<float> FlatIndex::vector_at(size_t pos) const {
  auto s = snapshot();
  if (pos >= s->ids.size()) raise(Errc::invalid_argument, "position out of range");
  auto begin = s->values.begin() + static_cast<ptrdiff_t>(pos * dim_);
  return std::vector<float>(begin, begin + dim_);
}

size_t FlatIndex::add(std::span<const FeatureVector> vectors) {
  std::lock_guard lock(mu_);

  std::unordered_set<uint64_t> incoming;
  for (const FeatureVector& v : vectors) {
    if (v.dim() != dim_)
      raise(Errc::dim_mismatch, "vector dim " + std::to_string(v.dim()) + " vs index dim " +
                                    std::to_string(dim_));
    for (float x : v.values)
      if (!std::isfinite(x)) raise(Errc::invalid_argument, "non-finite vector value");
    if (store_->id_set.contains(v.id) || !incoming.insert(v.id).second)
      raise(Errc::duplicate_id, "id " + std::to_string(v.id) + " already present");
    if (metric_ == Metric::cosine) {
      float norm2 = kernels::dot_f32(v.values.data(), v.values.data(), dim_);
      if (norm2 == 0.0f) raise(Errc::zero_vector, "cosine index rejects the zero vector");
    }
  }

  auto next = std::make_shared<Store>(*store_);
  next->ids.reserve(next->ids.size() + vectors.size());
  next->values.reserve(next->values.size() + vectors.size() * dim_);
  for (const FeatureVector& v : vectors) {
    next->ids.push_back(v.id);
    next->id_set.insert(v.id);
    size_t at = next->values.size();
    next->values.insert(next->values.end(), v.values.begin(), v.values.end());
    if (metric_ == Metric::cosine) {
      float* stored = next->values.data() + at;
      float norm = std::sqrt(kernels::dot_f32(stored, stored, dim_));
      kernels::scale_f32(stored, dim_, 1.0f / norm);
    }
  }
  store_ = std::move(next);
  return vectors.size();
}

namespace {

// Better-first comparator with the global tie rule (smaller id wins).
inline bool better(Metric m, const Neighbor& a, const Neighbor& b) {
  if (m == Metric::cosine) {
    if (a.score != b.score) return a.score > b.score;
  } else {
    if (a.score != b.score) return a.score < b.score;
  }
  return a.id < b.id;
}

// Bounded best-k over a contiguous item range; results returned unsorted.
void scan_range(Metric metric, const float* values, const uint64_t* ids, size_t begin, size_t end,
                const float* query, uint32_t dim, uint32_t k, std::vector<Neighbor>& out) {
  auto worse_cmp = [metric](const Neighbor& a, const Neighbor& b) { return better(metric, a, b); };
  // out is maintained as a max-heap on "worse" so the worst kept item leads
  for (size_t i = begin; i < end; ++i) {
    float s = metric == Metric::cosine
                  ? kernels::dot_f32(query, values + i * dim, dim)
                  : kernels::l2sqr_f32(query, values + i * dim, dim);
    Neighbor cand{ids[i], s};
    if (out.size() < k) {
      out.push_back(cand);
      std::push_heap(out.begin(), out.end(), worse_cmp);
    } else if (better(metric, cand, out.front())) {
      std::pop_heap(out.begin(), out.end(), worse_cmp);
      out.back() = cand;
      std::push_heap(out.begin(), out.end(), worse_cmp);
    }
  }
}

}  // namespace

MatchResult FlatIndex::search(const FeatureVector& query, uint32_t k, uint32_t threads) const {
  if (query.dim() != dim_) raise(Errc::dim_mismatch, "query dim does not match index");
  if (k < 1) raise(Errc::invalid_argument, "k must be >= 1");
  auto s = snapshot();
  const size_t n = s->ids.size();
  if (n == 0) raise(Errc::empty_index, "search on empty index");

  std::vector<float> q = query.values;
  if (metric_ == Metric::cosine) {
    float norm = std::sqrt(kernels::dot_f32(q.data(), q.data(), dim_));
    if (norm == 0.0f) raise(Errc::zero_vector, "cosine query must be nonzero");
    kernels::scale_f32(q.data(), dim_, 1.0f / norm);
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  size_t shards = std::min<size_t>(threads, n);

  std::vector<std::vector<Neighbor>> local(shards);
  if (shards <= 1) {
    scan_range(metric_, s->values.data(), s->ids.data(), 0, n, q.data(), dim_, k, local[0]);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (n + shards - 1) / shards;
    for (size_t t = 0; t < shards; ++t) {
      size_t begin = t * chunk;
      size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        scan_range(metric_, s->values.data(), s->ids.data(), begin, end, q.data(), dim_, k,
                   local[t]);
      });
    }
    for (auto& th : pool) th.join();
  }

  // merge shard candidates under the global comparator
  std::vector<Neighbor> all;
  for (auto& l : local) all.insert(all.end(), l.begin(), l.end());
  std::sort(all.begin(), all.end(),
            [this](const Neighbor& a, const Neighbor& b) { return better(metric_, a, b); });
  if (all.size() > k) all.resize(k);

  MatchResult result;
  result.query_id = query.id;
  result.metric = metric_;
  result.neighbors = std::move(all);
  return result;
}

}  // namespace v2r
