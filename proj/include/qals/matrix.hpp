#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qals/errors.hpp"

namespace qals {

// Dense n x n matrix in row-major order.
template <class T>
class SquareMatrix {
public:
  using value_type = T;

  SquareMatrix() = default;

  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) {
        throw contract_error("SquareMatrix: row of length " + std::to_string(row.size()) +
                             " in a matrix of order " + std::to_string(n_));
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  std::span<const T> row(std::size_t i) const noexcept {
    return std::span<const T>(data_).subspan(i * n_, n_);
  }
  std::span<const T> values() const noexcept { return data_; }

  bool is_symmetric() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

  SquareMatrix& operator+=(const SquareMatrix& other) {
    require_same_order(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
  }

  SquareMatrix& operator*=(T scale) noexcept {
    for (auto& v : data_) v *= scale;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator*(SquareMatrix a, T scale) { return a *= scale; }
  friend SquareMatrix operator*(T scale, SquareMatrix a) { return a *= scale; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

  template <class U>
  SquareMatrix<U> cast() const {
    SquareMatrix<U> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(i, j) = static_cast<U>((*this)(i, j));
    return out;
  }

private:
  void require_same_order(const SquareMatrix& other) const {
    if (other.n_ != n_) {
      throw contract_error("SquareMatrix: order " + std::to_string(other.n_) +
                           " does not match " + std::to_string(n_));
    }
  }

  std::size_t n_ = 0;
  std::vector<T> data_;
};

}  // namespace qals
