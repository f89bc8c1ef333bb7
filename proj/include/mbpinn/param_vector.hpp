#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbpinn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Describes one named block (a weight matrix or bias vector) inside a flat
// parameter vector. Matrices are stored column-major, matching Eigen's
// default, so Map round-trips without copies.
struct ParamBlock {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;

  Eigen::Index size() const { return rows * cols; }
};

class ParamLayout {
 public:
  Eigen::Index add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    ParamBlock b;
    b.name = std::move(name);
    b.rows = rows;
    b.cols = cols;
    b.offset = total_;
    total_ += b.size();
    blocks_.push_back(std::move(b));
    return static_cast<Eigen::Index>(blocks_.size()) - 1;
  }

  // Appends every block of another layout, prefixing block names.
  void append(const ParamLayout& other, const std::string& prefix) {
    for (const ParamBlock& b : other.blocks_) {
      add(prefix + b.name, b.rows, b.cols);
    }
  }

  Eigen::Index total_size() const { return total_; }
  std::size_t block_count() const { return blocks_.size(); }
  const ParamBlock& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }

  const ParamBlock& block_named(const std::string& name) const {
    for (const ParamBlock& b : blocks_) {
      if (b.name == name) return b;
    }
    throw std::invalid_argument("no parameter block named '" + name + "'");
  }

  Eigen::Map<const Matrix> view(const Vector& theta, std::size_t i) const {
    const ParamBlock& b = blocks_.at(i);
    check(theta);
    return Eigen::Map<const Matrix>(theta.data() + b.offset, b.rows, b.cols);
  }

  Eigen::Map<Matrix> view(Vector& theta, std::size_t i) const {
    const ParamBlock& b = blocks_.at(i);
    check(theta);
    return Eigen::Map<Matrix>(theta.data() + b.offset, b.rows, b.cols);
  }

 private:
  void check(const Vector& theta) const {
    if (theta.size() != total_) {
      throw std::invalid_argument("parameter vector size mismatch: got " +
                                  std::to_string(theta.size()) + ", layout has " +
                                  std::to_string(total_));
    }
  }

  std::vector<ParamBlock> blocks_;
  Eigen::Index total_ = 0;
};

}  // namespace mbpinn
