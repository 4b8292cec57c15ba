#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  DisconnectedGraph,
  DetailedBalanceViolated,
  NonPositiveStationary,
  AsymmetricAdjacency,
  AsymmetryResidual,
  NullSpaceRank,
  NegativeTime,
  NonFinite,
  SingularPrincipalBlock,
  SingularComplementBlock,
  NonPositiveGamma,
  NullSpaceNotSpanned,
  KTooLarge,
  TooLargeForBruteForce,
  InvalidRSK,
  ParseError,
  AsymmetricInput,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every module; `kind()` is the machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Sorted, duplicate-free subset of states [0, n).
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::vector<int> indices, int n);

  static IndexSet all(int n);

  int size() const { return static_cast<int>(idx_.size()); }
  int universe() const { return n_; }
  bool empty() const { return idx_.empty(); }
  bool is_full() const { return size() == n_; }
  bool contains(int i) const;
  int operator[](int k) const { return idx_[static_cast<size_t>(k)]; }
  const std::vector<int>& indices() const { return idx_; }
  /// Complement in [0, n), ascending.
  std::vector<int> complement() const;
  /// Position of state `i` inside the set, or -1.
  int position(int i) const;

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

 private:
  std::vector<int> idx_;
  int n_ = 0;
};

/// One named residual check; collected into reports by the verification suites.
struct CheckItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct CheckReport {
  std::vector<CheckItem> items;

  void add(std::string name, double residual, double tolerance, std::string note = {});
  /// Records a boolean condition; residual is 0 on success and 1 on failure.
  void require(std::string name, bool ok, std::string note = {});
  void append(const CheckReport& other, const std::string& prefix = {});
  bool all_passed() const;
  double max_residual() const;
};

// Dense helpers over index lists.
Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols);
Matrix columns(const Matrix& a, const std::vector<int>& cols);
Vector subvector(const Vector& v, const std::vector<int>& idx);

double max_abs(const Matrix& a);

}  // namespace mcc
