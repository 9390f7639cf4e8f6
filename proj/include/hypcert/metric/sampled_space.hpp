#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypcert/error.hpp"

namespace hypcert {

/**
 * @brief Finite point list with a symmetric distance matrix.
 *
 * Construction validates symmetry, zero diagonal, finiteness and the triangle
 * inequality. The cubic triangle scan can be skipped for matrices produced by
 * an exact model distance, which are metric by construction.
 */
class sampled_space {
public:
  enum class check { full, basic };

  sampled_space() = default;

  sampled_space(std::vector<std::string> ids, std::vector<double> dist,
                std::optional<std::string> provenance = std::nullopt,
                check level = check::full, double tol = default_tolerance)
      : ids_(std::move(ids)), dist_(std::move(dist)), provenance_(std::move(provenance)) {
    const std::size_t n = ids_.size();
    if (dist_.size() != n * n) throw input_error("distance matrix is not square in the point count");
    for (std::size_t i = 0; i < n; ++i) {
      if (!index_.emplace(ids_[i], i).second) throw input_error("duplicate point id '" + ids_[i] + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (at(i, i) != 0.0 && std::fabs(at(i, i)) > tol)
        throw input_error("nonzero diagonal at '" + ids_[i] + "'");
      at(i, i) = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double d = at(i, j);
        if (!std::isfinite(d)) throw input_error("non-finite distance");
        if (d < -tol) throw input_error("negative distance");
        if (std::fabs(d - at(j, i)) > tol * std::fmax(1.0, std::fabs(d)))
          throw input_error("asymmetric distance between '" + ids_[i] + "' and '" + ids_[j] + "'");
      }
    }
    if (level == check::full) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            double slack = tol * std::fmax(1.0, at(i, j));
            if (at(i, j) > at(i, k) + at(k, j) + slack)
              throw input_error("triangle inequality fails for ('" + ids_[i] + "','" + ids_[j] +
                                "') via '" + ids_[k] + "'");
          }
    }
  }

  /// Build from any distance oracle over points labelled by the given ids.
  template <class Points, class Dist>
  static sampled_space from_points(const Points& pts, const std::vector<std::string>& ids, Dist dist,
                                   std::optional<std::string> provenance = std::nullopt) {
    const std::size_t n = pts.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = static_cast<double>(dist(pts[i], pts[j]));
    return sampled_space(ids, std::move(m), std::move(provenance), check::basic);
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::optional<std::string>& provenance() const { return provenance_; }

  double d(std::size_t i, std::size_t j) const { return dist_[i * ids_.size() + j]; }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw input_error("unknown point id '" + id + "'");
    return it->second;
  }

  double d(const std::string& p, const std::string& q) const { return d(index_of(p), index_of(q)); }

  /// Restriction to a subset of indices, keeping ids and provenance.
  sampled_space subspace(const std::vector<std::size_t>& keep) const {
    std::vector<std::string> ids;
    std::vector<double> m(keep.size() * keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      ids.push_back(ids_.at(keep[a]));
      for (std::size_t b = 0; b < keep.size(); ++b) m[a * keep.size() + b] = d(keep[a], keep[b]);
    }
    return sampled_space(std::move(ids), std::move(m), provenance_, check::basic);
  }

private:
  double& at(std::size_t i, std::size_t j) { return dist_[i * ids_.size() + j]; }
  double at(std::size_t i, std::size_t j) const { return dist_[i * ids_.size() + j]; }

  std::vector<std::string> ids_;
  std::vector<double> dist_;
  std::optional<std::string> provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace hypcert
