// Copyright 2026 The perqwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace perqwalk {

/// Real symmetric matrix that is affine in a set of noise-source values:
///
///   H(x) = H_static + sum_s x_s * P_s
///
/// Stored as a list of entries (row, col, base) where each entry carries the
/// sources that modulate it. Entries come in symmetric pairs; the builder
/// mirrors off-diagonal entries automatically.
class ParametricOperator {
 public:
  struct Term {
    std::size_t source = 0;
    double coefficient = 0.0;
  };

  struct Entry {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    double base = 0.0;
    std::size_t first_term = 0;  // into terms()
    std::size_t term_count = 0;
  };

  ParametricOperator(std::size_t dim, std::size_t source_count);

  /// Adds `base` at (row, col) and (col, row); accumulates onto an existing
  /// entry. Must be followed by finalize() before use.
  void add(Eigen::Index row, Eigen::Index col, double base);
  void add_term(Eigen::Index row, Eigen::Index col, std::size_t source, double coefficient);
  void finalize();

  std::size_t dim() const { return dim_; }
  std::size_t source_count() const { return sources_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Term>& terms() const { return terms_; }
  /// Entry indices touched by each source.
  const std::vector<std::size_t>& entries_of(std::size_t source) const {
    return by_source_.at(source);
  }

  double value(const Entry& e, std::span<const double> x) const;

  Eigen::MatrixXd dense(std::span<const double> x) const;

  /// Interval [lo, hi] that contains the spectrum of H(x) for every x with
  /// |x_s| <= 1 (Gershgorin discs with worst-case entries).
  std::pair<double, double> spectral_bounds() const;

  /// Fraction of the dim*dim matrix that is structurally nonzero.
  double density() const;

 private:
  struct Pending {
    Eigen::Index row;
    Eigen::Index col;
    double base;
    std::vector<Term> terms;
  };

  Pending& slot(Eigen::Index row, Eigen::Index col);

  std::size_t dim_;
  std::size_t sources_;
  bool finalized_ = false;
  std::vector<Pending> pending_;
  std::vector<std::vector<std::size_t>> pending_index_;  // per row: pending ids
  std::vector<Entry> entries_;
  std::vector<Term> terms_;
  std::vector<std::vector<std::size_t>> by_source_;
};

/// Concrete matrix H(x) for the current source values, updated in place when
/// a single source changes. Dense storage for dense operators, CSR otherwise.
class OperatorInstance {
 public:
  explicit OperatorInstance(const ParametricOperator& op);

  void set_all(std::span<const double> x);
  /// Refreshes the entries that depend on `source` after x[source] changed.
  void update_source(std::span<const double> x, std::size_t source);

  /// y = H x
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  Eigen::MatrixXd to_dense() const;
  bool is_dense() const { return dense_storage_; }

 private:
  void write(std::size_t entry, double v);

  const ParametricOperator* op_;
  bool dense_storage_;
  Eigen::MatrixXd dense_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_;
  // Storage offsets of (row, col) and, for off-diagonals, (col, row).
  std::vector<std::ptrdiff_t> slot_a_;
  std::vector<std::ptrdiff_t> slot_b_;
};

}  // namespace perqwalk
