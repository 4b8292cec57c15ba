#pragma once

#include "mcc/chain.hpp"
#include "mcc/committor.hpp"
#include "mcc/compress.hpp"
#include "mcc/select.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace mcc {

using Json = nlohmann::json;

/// Reads a Matrix Market v2 coordinate file (real, integer or pattern;
/// general or symmetric). Duplicate entries are summed. With
/// `require_symmetric`, a general file must list every (i,j) with a matching
/// (j,i) or AsymmetricInput is thrown.
SparseMatrix read_matrix_market(const std::filesystem::path& path, bool require_symmetric);
/// Symmetric adjacency; same as read_matrix_market(path, true).
SparseMatrix load_matrix_market(const std::filesystem::path& path);
SparseMatrix parse_matrix_market(const std::string& text, bool require_symmetric);

/// Writes the lower triangle (symmetric) or all entries (general), %.17g.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a, bool symmetric);

/// Undirected edge list: `source,target[,weight]`, 0-based, optional header,
/// `#` comments. Repeated pairs keep the last weight.
SparseMatrix load_edge_list(const std::filesystem::path& path);

/// Off-diagonal rates of R as a general Matrix Market file, and back.
void save_chain(const std::filesystem::path& path, const ReversibleChain& chain);
ReversibleChain load_rates_chain(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// RFC-4180 CSV text builder.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }
  static std::string quote(const std::string& cell);
  static std::string num(double v);

 private:
  size_t width_;
  std::string out_;
};

/// Parsed CSV rows (header included), with RFC-4180 quoting rules.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

struct RunConfig {
  std::string input;            // path; empty for generated inputs
  std::string format = "synthetic-webgraph";  // mm-adjacency | mm-rates | edges-csv | synthetic-webgraph | random-chain | fixture-k3 | fixture-p2
  std::string mode = "webgraph";              // webgraph | rates
  int synthetic_n = 100;
  int synthetic_m = 3;
  int k = 5;
  int subset_size = 5;
  double t_min = 0.0;  // 0 selects the default grid over [1e-2, 1e3]·Tr K/n
  double t_max = 0.0;
  int t_points = 64;
  int curve_points = 16;  // grid points used for the reduced-subspace curves
  bool t_log = true;
  double gamma = 0.0;  // 0 selects 1/(10 Tr K)
  std::uint64_t seed = 1;
  long n_traj = 10000;
  std::vector<int> states;  // explicit subset for compress/verify/simulate; empty selects greedily
  std::string output_dir = "mcc_out";
  bool verify_chain = true;
  bool verify_committor = true;
  bool verify_induced = true;
  bool verify_marked = true;
  bool verify_bounds = true;
  bool verify_selection = true;
  bool curves = true;

  Json to_json() const;
  /// Merges `j` into `*this`; unknown keys and out-of-range values throw InvalidConfig.
  void merge(const Json& j);
  void validate() const;
  /// FNV-1a over the canonical JSON dump.
  std::string hash() const;
};

RunConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a(const std::string& s);

ReversibleChain load_input(const RunConfig& cfg);
std::vector<double> time_grid(const RunConfig& cfg, const SpectralLaplacian& lap);

/// Report serializers. Every CSV carries `config_hash` and `version` columns.
std::string bound_report_csv(const BoundReport& r, const std::string& config_hash);
Json bound_report_json(const BoundReport& r);
std::string selection_trace_csv(const SelectionTrace& tr, const std::string& config_hash);
Json selection_trace_json(const SelectionTrace& tr);
std::string committor_csv(const CommittorBundle& b, const std::string& config_hash);
Json check_report_json(const CheckReport& r);

/// One row of a compressed-vs-reference curve file.
struct CurvePoint {
  double t = 0.0;
  int row = 0;
  int col = 0;
  double compressed = 0.0;
  double reference = 0.0;
  double reference_stderr = 0.0;  // 0 for exact references
};
std::string curves_csv(const std::string& family, const std::vector<CurvePoint>& pts,
                       const std::string& config_hash);

/// Header fields shared by every JSON document.
Json provenance(const std::string& config_hash);

}  // namespace mcc
