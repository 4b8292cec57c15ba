#include "mcc/common.hpp"

#include <algorithm>
#include <cmath>

namespace mcc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::DetailedBalanceViolated: return "DetailedBalanceViolated";
    case ErrorKind::NonPositiveStationary: return "NonPositiveStationary";
    case ErrorKind::AsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorKind::AsymmetryResidual: return "AsymmetryResidual";
    case ErrorKind::NullSpaceRank: return "NullSpaceRank";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularPrincipalBlock: return "SingularPrincipalBlock";
    case ErrorKind::SingularComplementBlock: return "SingularComplementBlock";
    case ErrorKind::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorKind::NullSpaceNotSpanned: return "NullSpaceNotSpanned";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::TooLargeForBruteForce: return "TooLargeForBruteForce";
    case ErrorKind::InvalidRSK: return "InvalidRSK";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

IndexSet::IndexSet(std::vector<int> indices, int n) : idx_(std::move(indices)), n_(n) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
    throw Error(ErrorKind::InvalidArgument, "index set contains duplicates");
  if (!idx_.empty() && (idx_.front() < 0 || idx_.back() >= n))
    throw Error(ErrorKind::InvalidArgument, "index out of range");
}

IndexSet IndexSet::all(int n) {
  std::vector<int> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
  return IndexSet(std::move(v), n);
}

bool IndexSet::contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

int IndexSet::position(int i) const {
  auto it = std::lower_bound(idx_.begin(), idx_.end(), i);
  if (it == idx_.end() || *it != i) return -1;
  return static_cast<int>(it - idx_.begin());
}

std::vector<int> IndexSet::complement() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n_ - size()));
  size_t k = 0;
  for (int i = 0; i < n_; ++i) {
    if (k < idx_.size() && idx_[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

void CheckReport::add(std::string name, double residual, double tolerance, std::string note) {
  const bool ok = std::isfinite(residual) && residual <= tolerance;
  items.push_back({std::move(name), residual, tolerance, ok, std::move(note)});
}

void CheckReport::require(std::string name, bool ok, std::string note) {
  items.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(note)});
}

void CheckReport::append(const CheckReport& other, const std::string& prefix) {
  for (auto item : other.items) {
    item.name = prefix + item.name;
    items.push_back(std::move(item));
  }
}

bool CheckReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

double CheckReport::max_residual() const {
  double m = 0.0;
  for (const auto& c : items) m = std::max(m, c.residual);
  return m;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(rows[i], cols[j]);
  return out;
}

Matrix columns(const Matrix& a, const std::vector<int>& cols) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
  return out;
}

Vector subvector(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace mcc
