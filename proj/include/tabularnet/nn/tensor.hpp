#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tabularnet/common.hpp"

namespace tabularnet::nn {

/// Dense 64-bit real tensor. The engine only ever needs rank 1 and 2;
/// rank-2 data is row-major.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    std::int64_t n = 1;
    for (int d : shape_) {
      if (d <= 0) throw ModelError("tensor dims must be positive");
      n *= d;
    }
    data_.assign(static_cast<size_t>(n), 0.0);
  }

  static Tensor zeros(int rows, int cols) { return Tensor({rows, cols}); }
  static Tensor zeros_vec(int n) { return Tensor({n}); }

  static Tensor scalar(double v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
  }

  static Tensor from_rows(int rows, int cols, std::vector<double> values) {
    Tensor t;
    t.shape_ = {rows, cols};
    if (values.size() != static_cast<size_t>(rows) * cols)
      throw ModelError("from_rows: value count does not match shape");
    t.data_ = std::move(values);
    return t;
  }

  static Tensor from_vec(std::vector<double> values) {
    Tensor t;
    t.shape_ = {static_cast<int>(values.size())};
    t.data_ = std::move(values);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool is_scalar() const { return data_.size() == 1; }

  int rows() const { return shape_.size() == 2 ? shape_[0] : (shape_.empty() ? 0 : 1); }
  int cols() const {
    if (shape_.size() == 2) return shape_[1];
    if (shape_.size() == 1) return shape_[0];
    return 0;
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols() + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols() + c]; }
  double& operator[](std::int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "(";
    for (size_t i = 0; i < shape_.size(); ++i) s += (i ? "," : "") + std::to_string(shape_[i]);
    return s + ")";
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

namespace kernels {

/// C(MxN) += A(MxK) * B(KxN)
inline void mm_acc(double* c, const double* a, const double* b, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * k;
    double* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

/// C(MxK) += A(MxN) * B(KxN)^T
inline void mm_abt_acc(double* c, const double* a, const double* b, int m, int n, int k) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * n;
    double* crow = c + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double* brow = b + static_cast<size_t>(p) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += arow[j] * brow[j];
      crow[p] += acc;
    }
  }
}

/// C(KxN) += A(MxK)^T * B(MxN)
inline void mm_atb_acc(double* c, const double* a, const double* b, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * k;
    const double* brow = b + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* crow = c + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace kernels

}  // namespace tabularnet::nn
