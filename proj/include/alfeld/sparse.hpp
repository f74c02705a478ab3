#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "alfeld/matrix.hpp"
#include "alfeld/rational.hpp"

namespace alfeld {

/// Sparse rational vector, terms sorted by index, no explicit zeros.
struct SparseVec {
  std::vector<std::pair<int32_t, Rational>> terms;

  bool empty() const { return terms.empty(); }
  int32_t leading_index() const { return terms.front().first; }

  void add_term(int32_t idx, Rational v) {
    if (!is_zero(v)) terms.emplace_back(idx, std::move(v));
  }

  /// Sorts terms and merges duplicates. Call once after unordered assembly.
  void compress() {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int32_t, Rational>> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
      if (!out.empty() && out.back().first == t.first)
        out.back().second += t.second;
      else
        out.push_back(std::move(t));
    }
    std::erase_if(out, [](const auto& t) { return is_zero(t.second); });
    terms = std::move(out);
  }

  Rational at(int32_t idx) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), idx,
                               [](const auto& t, int32_t i) { return t.first < i; });
    if (it != terms.end() && it->first == idx) return it->second;
    return Rational(0);
  }

  void scale(const Rational& c) {
    for (auto& t : terms) t.second *= c;
  }

  /// this += c * other (sorted merge).
  void axpy(const Rational& c, const SparseVec& other) {
    if (is_zero(c) || other.terms.empty()) return;
    std::vector<std::pair<int32_t, Rational>> out;
    out.reserve(terms.size() + other.terms.size());
    std::size_t i = 0, j = 0;
    while (i < terms.size() && j < other.terms.size()) {
      if (terms[i].first < other.terms[j].first) {
        out.push_back(std::move(terms[i++]));
      } else if (terms[i].first > other.terms[j].first) {
        out.emplace_back(other.terms[j].first, c * other.terms[j].second);
        ++j;
      } else {
        Rational v = terms[i].second + c * other.terms[j].second;
        if (!is_zero(v)) out.emplace_back(terms[i].first, std::move(v));
        ++i;
        ++j;
      }
    }
    while (i < terms.size()) out.push_back(std::move(terms[i++]));
    for (; j < other.terms.size(); ++j)
      out.emplace_back(other.terms[j].first, c * other.terms[j].second);
    terms = std::move(out);
  }

  std::vector<Rational> to_dense(std::size_t n) const {
    std::vector<Rational> v(n, Rational(0));
    for (const auto& t : terms) v[static_cast<std::size_t>(t.first)] = t.second;
    return v;
  }

  static SparseVec from_dense(const std::vector<Rational>& v) {
    SparseVec s;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!is_zero(v[i])) s.terms.emplace_back(static_cast<int32_t>(i), v[i]);
    return s;
  }

  Rational dot(const SparseVec& other) const {
    Rational acc(0);
    std::size_t i = 0, j = 0;
    while (i < terms.size() && j < other.terms.size()) {
      if (terms[i].first < other.terms[j].first)
        ++i;
      else if (terms[i].first > other.terms[j].first)
        ++j;
      else {
        acc += terms[i].second * other.terms[j].second;
        ++i;
        ++j;
      }
    }
    return acc;
  }
};

/// Incremental exact row reduction to the (unique) reduced row echelon form.
///
/// Rows are fed one at a time; each is reduced against the current pivot rows
/// and, if it survives, normalized and installed as a new pivot. finalize()
/// back-substitutes so every pivot column appears in exactly one row, which
/// makes the resulting RREF canonical: bases read off from it do not depend
/// on the order rows were added.
class RowReducer {
 public:
  explicit RowReducer(int32_t ncols) : ncols_(ncols), pivot_row_of_col_(ncols, -1) {}

  int32_t cols() const { return ncols_; }
  int32_t rank() const { return static_cast<int32_t>(rows_.size()); }

  /// Reduces r in place against the pivot rows; r becomes the residual.
  void reduce(SparseVec& r) const {
    std::size_t scan = 0;
    while (scan < r.terms.size()) {
      int32_t c = r.terms[scan].first;
      int32_t pr = pivot_row_of_col_[c];
      if (pr < 0) {
        ++scan;
        continue;
      }
      Rational coef = -r.terms[scan].second;
      r.axpy(coef, rows_[pr]);
      // axpy removed column c; rescan from the same position.
    }
  }

  /// Adds one row; returns true if it increased the rank.
  bool add_row(SparseVec r) {
    r.compress();
    reduce(r);
    if (r.empty()) return false;
    Rational inv = 1 / r.terms.front().second;
    r.scale(inv);
    pivot_row_of_col_[r.leading_index()] = static_cast<int32_t>(rows_.size());
    pivot_cols_.push_back(r.leading_index());
    rows_.push_back(std::move(r));
    finalized_ = false;
    return true;
  }

  /// Back-substitution pass; afterwards rows_ is the canonical RREF.
  void finalize() {
    if (finalized_) return;
    std::vector<std::size_t> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rows_[a].leading_index() > rows_[b].leading_index();
    });
    for (std::size_t oi : order) {
      const int32_t col = rows_[oi].leading_index();
      for (std::size_t j = 0; j < rows_.size(); ++j) {
        if (j == oi) continue;
        Rational v = rows_[j].at(col);
        if (!is_zero(v)) rows_[j].axpy(-v, rows_[oi]);
      }
    }
    std::sort(rows_.begin(), rows_.end(),
              [](const SparseVec& a, const SparseVec& b) {
                return a.leading_index() < b.leading_index();
              });
    std::fill(pivot_row_of_col_.begin(), pivot_row_of_col_.end(), -1);
    pivot_cols_.clear();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      pivot_row_of_col_[rows_[i].leading_index()] = static_cast<int32_t>(i);
      pivot_cols_.push_back(rows_[i].leading_index());
    }
    finalized_ = true;
  }

  const std::vector<SparseVec>& rref_rows() {
    finalize();
    return rows_;
  }

  const std::vector<int32_t>& pivot_cols() {
    finalize();
    return pivot_cols_;
  }

  std::vector<int32_t> free_cols() {
    finalize();
    std::vector<int32_t> f;
    for (int32_t c = 0; c < ncols_; ++c)
      if (pivot_row_of_col_[c] < 0) f.push_back(c);
    return f;
  }

  /// Kernel basis in canonical form: column k has a 1 at the k-th free
  /// column and zeros at every other free column.
  std::vector<SparseVec> nullspace() {
    finalize();
    std::vector<SparseVec> basis;
    for (int32_t f : free_cols()) {
      SparseVec v;
      for (const SparseVec& row : rows_) {
        Rational c = row.at(f);
        if (!is_zero(c)) v.add_term(row.leading_index(), -c);
      }
      v.add_term(f, Rational(1));
      v.compress();
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  int32_t ncols_;
  std::vector<SparseVec> rows_;
  std::vector<int32_t> pivot_row_of_col_;
  std::vector<int32_t> pivot_cols_;
  bool finalized_ = true;
};

}  // namespace alfeld
