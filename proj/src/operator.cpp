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

#include "perqwalk/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace perqwalk {

ParametricOperator::ParametricOperator(std::size_t dim, std::size_t source_count)
    : dim_(dim), sources_(source_count), pending_index_(dim), by_source_(source_count) {
  if (dim == 0) throw std::invalid_argument("operator dimension must be positive");
}

ParametricOperator::Pending& ParametricOperator::slot(Eigen::Index row, Eigen::Index col) {
  if (finalized_) throw std::logic_error("operator already finalized");
  if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= dim_ ||
      static_cast<std::size_t>(col) >= dim_) {
    throw std::out_of_range("operator entry outside matrix");
  }
  const auto r = std::min(row, col);
  const auto c = std::max(row, col);
  for (std::size_t id : pending_index_[static_cast<std::size_t>(r)]) {
    if (pending_[id].col == c) return pending_[id];
  }
  pending_index_[static_cast<std::size_t>(r)].push_back(pending_.size());
  pending_.push_back(Pending{r, c, 0.0, {}});
  return pending_.back();
}

void ParametricOperator::add(Eigen::Index row, Eigen::Index col, double base) {
  slot(row, col).base += base;
}

void ParametricOperator::add_term(Eigen::Index row, Eigen::Index col, std::size_t source,
                                  double coefficient) {
  if (source >= sources_) throw std::out_of_range("noise source index out of range");
  auto& p = slot(row, col);
  for (auto& t : p.terms) {
    if (t.source == source) {
      t.coefficient += coefficient;
      return;
    }
  }
  p.terms.push_back(Term{source, coefficient});
}

void ParametricOperator::finalize() {
  if (finalized_) return;
  std::sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  entries_.reserve(pending_.size());
  for (auto& p : pending_) {
    Entry e{p.row, p.col, p.base, terms_.size(), p.terms.size()};
    for (const auto& t : p.terms) {
      by_source_[t.source].push_back(entries_.size());
      terms_.push_back(t);
    }
    entries_.push_back(e);
  }
  pending_.clear();
  pending_.shrink_to_fit();
  pending_index_.clear();
  finalized_ = true;
}

double ParametricOperator::value(const Entry& e, std::span<const double> x) const {
  double v = e.base;
  for (std::size_t i = 0; i < e.term_count; ++i) {
    const auto& t = terms_[e.first_term + i];
    v += t.coefficient * x[t.source];
  }
  return v;
}

Eigen::MatrixXd ParametricOperator::dense(std::span<const double> x) const {
  if (!finalized_) throw std::logic_error("operator not finalized");
  if (x.size() != sources_) {
    throw std::invalid_argument("expected " + std::to_string(sources_) +
                                " source values, got " + std::to_string(x.size()));
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : entries_) {
    const double v = value(e, x);
    h(e.row, e.col) = v;
    h(e.col, e.row) = v;
  }
  return h;
}

std::pair<double, double> ParametricOperator::spectral_bounds() const {
  std::vector<double> center(dim_, 0.0);
  std::vector<double> radius(dim_, 0.0);
  for (const auto& e : entries_) {
    double spread = 0.0;
    for (std::size_t i = 0; i < e.term_count; ++i) {
      spread += std::abs(terms_[e.first_term + i].coefficient);
    }
    const auto r = static_cast<std::size_t>(e.row);
    const auto c = static_cast<std::size_t>(e.col);
    if (r == c) {
      center[r] = e.base;
      radius[r] += spread;
    } else {
      const double mag = std::abs(e.base) + spread;
      radius[r] += mag;
      radius[c] += mag;
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim_; ++i) {
    lo = std::min(lo, center[i] - radius[i]);
    hi = std::max(hi, center[i] + radius[i]);
  }
  return {lo, hi};
}

double ParametricOperator::density() const {
  std::size_t nnz = 0;
  for (const auto& e : entries_) nnz += (e.row == e.col) ? 1 : 2;
  return static_cast<double>(nnz) / (static_cast<double>(dim_) * static_cast<double>(dim_));
}

OperatorInstance::OperatorInstance(const ParametricOperator& op)
    : op_(&op), dense_storage_(op.density() > 0.25 || op.dim() <= 32) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  const auto& entries = op.entries();
  slot_a_.resize(entries.size());
  slot_b_.resize(entries.size());
  if (dense_storage_) {
    dense_ = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      slot_a_[i] = entries[i].col * n + entries[i].row;
      slot_b_[i] = entries[i].row * n + entries[i].col;
    }
    return;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * entries.size());
  for (const auto& e : entries) {
    // Structural placeholders; values are written by set_all().
    triplets.emplace_back(e.row, e.col, 1.0);
    if (e.row != e.col) triplets.emplace_back(e.col, e.row, 1.0);
  }
  sparse_.resize(n, n);
  sparse_.setFromTriplets(triplets.begin(), triplets.end());
  sparse_.makeCompressed();
  const auto* outer = sparse_.outerIndexPtr();
  const auto* inner = sparse_.innerIndexPtr();
  auto locate = [&](Eigen::Index r, Eigen::Index c) -> std::ptrdiff_t {
    const auto* first = inner + outer[r];
    const auto* last = inner + outer[r + 1];
    const auto* it = std::lower_bound(first, last, static_cast<int>(c));
    return it - inner;
  };
  for (std::size_t i = 0; i < entries.size(); ++i) {
    slot_a_[i] = locate(entries[i].row, entries[i].col);
    slot_b_[i] = locate(entries[i].col, entries[i].row);
  }
}

void OperatorInstance::write(std::size_t entry, double v) {
  double* data = dense_storage_ ? dense_.data() : sparse_.valuePtr();
  data[slot_a_[entry]] = v;
  data[slot_b_[entry]] = v;
}

void OperatorInstance::set_all(std::span<const double> x) {
  if (x.size() != op_->source_count()) {
    throw std::invalid_argument("source value count does not match operator");
  }
  const auto& entries = op_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) write(i, op_->value(entries[i], x));
}

void OperatorInstance::update_source(std::span<const double> x, std::size_t source) {
  const auto& entries = op_->entries();
  for (std::size_t i : op_->entries_of(source)) write(i, op_->value(entries[i], x));
}

void OperatorInstance::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  if (dense_storage_) {
    y.noalias() = dense_ * x;
  } else {
    y.noalias() = sparse_ * x;
  }
}

Eigen::MatrixXd OperatorInstance::to_dense() const {
  if (dense_storage_) return dense_;
  return Eigen::MatrixXd(sparse_);
}

}  // namespace perqwalk
