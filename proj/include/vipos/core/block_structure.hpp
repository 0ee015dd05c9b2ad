#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vipos {

using Vector = Eigen::VectorXd;

/// Partition of R^n into N consecutive coordinate blocks of sizes n_1..n_N.
class BlockStructure {
 public:
  BlockStructure() = default;

  explicit BlockStructure(std::vector<std::size_t> block_dims)
      : dims_(std::move(block_dims)) {
    if (dims_.empty()) {
      throw std::invalid_argument("BlockStructure: at least one block required");
    }
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] == 0) {
        throw std::invalid_argument("BlockStructure: block " + std::to_string(i) +
                                    " has zero dimension");
      }
      offsets_.push_back(offsets_.back() + dims_[i]);
    }
  }

  /// N equal blocks of size `dim`.
  static BlockStructure uniform(std::size_t count, std::size_t dim) {
    return BlockStructure(std::vector<std::size_t>(count, dim));
  }

  std::size_t block_count() const noexcept { return dims_.size(); }
  std::size_t total_dim() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t block_dim(std::size_t i) const { return dims_.at(i); }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  const std::vector<std::size_t>& block_dims() const noexcept { return dims_; }

  auto block(Vector& x, std::size_t i) const {
    check_index(i);
    return x.segment(static_cast<Eigen::Index>(offsets_[i]),
                     static_cast<Eigen::Index>(dims_[i]));
  }
  auto block(const Vector& x, std::size_t i) const {
    check_index(i);
    return x.segment(static_cast<Eigen::Index>(offsets_[i]),
                     static_cast<Eigen::Index>(dims_[i]));
  }

  void check_index(std::size_t i) const {
    if (i >= dims_.size()) {
      throw std::invalid_argument("block index " + std::to_string(i) + " out of range [0, " +
                                  std::to_string(dims_.size()) + ")");
    }
  }

  void check_point(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != total_dim()) {
      throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(total_dim()));
    }
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
};

/// N * U_i g_i: g scaled by N in block i's coordinates, zero elsewhere. Averaging the
/// lift over all blocks reproduces the full vector.
inline Vector lift_block(const BlockStructure& blocks, std::size_t i,
                         const Eigen::Ref<const Vector>& g_i) {
  blocks.check_index(i);
  if (static_cast<std::size_t>(g_i.size()) != blocks.block_dim(i)) {
    throw std::invalid_argument("lift_block: block vector has length " +
                                std::to_string(g_i.size()) + ", expected " +
                                std::to_string(blocks.block_dim(i)));
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(blocks.total_dim()));
  blocks.block(out, i) = static_cast<double>(blocks.block_count()) * g_i;
  return out;
}

}  // namespace vipos
