#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfh/io.hpp"
#include "cfh/retrieval/embed.hpp"

namespace cfh::retrieval {

struct SearchHit {
  std::string id;
  double score = 0.0;

  bool operator==(const SearchHit&) const = default;
};

/// Exact cosine index: a linear scan over unit vectors stored row-major.
/// Ties in score are broken by insertion order. Many concurrent readers or one
/// writer.
class FlatIndex {
 public:
  using Filter = std::function<bool(const std::string& id)>;

  explicit FlatIndex(std::size_t dims) : dims_(dims) {
    if (dims_ == 0) throw Error(ErrorKind::InvalidArgument, "index dims must be positive");
  }

  FlatIndex(const FlatIndex& other) : dims_(other.dims_) {
    std::shared_lock lock(other.mu_);
    ids_ = other.ids_;
    positions_ = other.positions_;
    data_ = other.data_;
  }

  std::size_t dims() const { return dims_; }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return ids_.size();
  }

  bool contains(const std::string& id) const {
    std::shared_lock lock(mu_);
    return positions_.contains(id);
  }

  const std::vector<std::string>& ids() const { return ids_; }

  /// Stores a unit-normalized copy of `vector` under `id`.
  void add(const std::string& id, EmbeddingVector vector) {
    if (vector.size() != dims_)
      throw Error(ErrorKind::DimsMismatch,
                  "vector has " + std::to_string(vector.size()) + " dims, index has " + std::to_string(dims_));
    normalize(vector);
    std::unique_lock lock(mu_);
    if (positions_.contains(id)) throw Error(ErrorKind::DuplicateId, "chunk id already indexed: " + id);
    positions_.emplace(id, ids_.size());
    ids_.push_back(id);
    data_.insert(data_.end(), vector.begin(), vector.end());
  }

  /// Exact top-k by cosine similarity, optionally restricted to ids accepted by `filter`.
  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k, const Filter& filter = {}) const {
    if (query.size() != dims_)
      throw Error(ErrorKind::DimsMismatch,
                  "query has " + std::to_string(query.size()) + " dims, index has " + std::to_string(dims_));
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    EmbeddingVector q = query;
    normalize(q);

    std::shared_lock lock(mu_);
    struct Scored {
      std::size_t pos;
      double score;
    };
    std::vector<Scored> scored;
    scored.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (filter && !filter(ids_[i])) continue;
      const double* row = data_.data() + i * dims_;
      double dot = 0.0;
      for (std::size_t d = 0; d < dims_; ++d) dot += row[d] * q[d];
      scored.push_back({i, std::clamp(dot, -1.0, 1.0)});
    }
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      [](const Scored& a, const Scored& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return a.pos < b.pos;
                      });
    std::vector<SearchHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) hits.push_back({ids_[scored[i].pos], scored[i].score});
    return hits;
  }

  /// Line-delimited: a `{"dims","count"}` header, then one `{"id","v"}` per entry.
  void save(const std::filesystem::path& path) const {
    std::shared_lock lock(mu_);
    std::string out = nlohmann::json{{"dims", dims_}, {"count", ids_.size()}}.dump() + "\n";
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      std::vector<double> row(data_.begin() + static_cast<std::ptrdiff_t>(i * dims_),
                              data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dims_));
      out += nlohmann::json{{"id", ids_[i]}, {"v", row}}.dump() + "\n";
    }
    io::write_file_atomic(path, out);
  }

  static FlatIndex load(const std::filesystem::path& path) {
    auto rows = io::read_jsonl(path);
    if (rows.empty()) throw Error(ErrorKind::Io, "index file has no header: " + path.string());
    FlatIndex index(rows[0].at("dims").get<std::size_t>());
    const auto count = rows[0].at("count").get<std::size_t>();
    if (rows.size() != count + 1) throw Error(ErrorKind::Io, "index entry count mismatch in " + path.string());
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto v = rows[i].at("v").get<EmbeddingVector>();
      if (v.size() != index.dims_) throw Error(ErrorKind::DimsMismatch, "index row with wrong dims");
      // Rows were normalized on insert; store verbatim so reloads are bit-identical.
      const auto id = rows[i].at("id").get<std::string>();
      if (index.positions_.contains(id)) throw Error(ErrorKind::DuplicateId, "duplicate id in index file: " + id);
      index.positions_.emplace(id, index.ids_.size());
      index.ids_.push_back(id);
      index.data_.insert(index.data_.end(), v.begin(), v.end());
    }
    return index;
  }

 private:
  std::size_t dims_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<double> data_;
  mutable std::shared_mutex mu_;
};

inline std::vector<SearchHit> search(const FlatIndex& index, const EmbeddingVector& query, std::size_t k) {
  return index.search(query, k);
}

}  // namespace cfh::retrieval
