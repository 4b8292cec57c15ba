#include "mcc/io.hpp"

#include "mcc/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace mcc {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

double parse_double(const std::string& s, const std::string& ctx) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(ctx + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) parse_fail(ctx + ": trailing characters in '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& ctx) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    parse_fail(ctx + ": not an integer: '" + s + "'");
  }
  if (pos != s.size()) parse_fail(ctx + ": trailing characters in '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::IoError, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

SparseMatrix parse_matrix_market(const std::string& text, bool require_symmetric) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_fail("empty Matrix Market input");
  std::istringstream banner(line);
  std::string tag, object, fmt, field, symmetry;
  banner >> tag >> object >> fmt >> field >> symmetry;
  if (tag != "%%MatrixMarket") parse_fail("missing %%MatrixMarket banner");
  object = lower(object);
  fmt = lower(fmt);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || fmt != "coordinate") parse_fail("only 'matrix coordinate' files are supported");
  if (field != "real" && field != "integer" && field != "pattern") parse_fail("unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric") parse_fail("unsupported symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";
  const bool sym = symmetry == "symmetric";

  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream sz(t);
    std::string a, b, c, extra;
    sz >> a >> b >> c;
    if (c.empty() || (sz >> extra)) parse_fail("malformed size line '" + t + "'");
    rows = parse_long(a, "size");
    cols = parse_long(b, "size");
    nnz = parse_long(c, "size");
    break;
  }
  if (rows < 1 || cols < 1 || nnz < 0) parse_fail("missing or invalid size line");
  if (rows != cols) parse_fail("matrix must be square");

  std::vector<Triplet> trip;
  std::map<std::pair<long, long>, double> general_entries;
  long seen = 0;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream es(t);
    std::vector<std::string> tok;
    for (std::string s; es >> s;) tok.push_back(s);
    if (tok.size() != (pattern ? 2u : 3u)) parse_fail("malformed entry '" + t + "'");
    const long i = parse_long(tok[0], "row") - 1;
    const long j = parse_long(tok[1], "col") - 1;
    if (i < 0 || j < 0 || i >= rows || j >= cols) parse_fail("entry index out of range in '" + t + "'");
    const double v = pattern ? 1.0 : parse_double(tok[2], "value");
    if (!std::isfinite(v)) parse_fail("non-finite value in '" + t + "'");
    if (sym && j > i) parse_fail("symmetric file lists an upper-triangle entry '" + t + "'");
    ++seen;
    trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    if (sym && i != j) trip.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
    if (!sym) general_entries[{i, j}] += v;
  }
  if (seen != nnz) parse_fail("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));

  if (require_symmetric && !sym) {
    double scale = 0.0;
    for (const auto& [key, v] : general_entries) scale = std::max(scale, std::abs(v));
    for (const auto& [key, v] : general_entries) {
      auto it = general_entries.find({key.second, key.first});
      const double w = it == general_entries.end() ? 0.0 : it->second;
      if (it == general_entries.end() || std::abs(v - w) > 1e-12 * scale)
        throw Error(ErrorKind::AsymmetricInput, "entry (" + std::to_string(key.first + 1) + "," +
                                                    std::to_string(key.second + 1) + ") has no matching transpose");
    }
  }
  SparseMatrix a(static_cast<int>(rows), static_cast<int>(cols));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

SparseMatrix read_matrix_market(const fs::path& path, bool require_symmetric) {
  return parse_matrix_market(read_file(path), require_symmetric);
}

SparseMatrix load_matrix_market(const fs::path& path) { return read_matrix_market(path, true); }

void write_matrix_market(const fs::path& path, const SparseMatrix& a, bool symmetric) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
  std::vector<std::tuple<long, long, double>> entries;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (!symmetric || it.col() <= it.row()) entries.emplace_back(it.row(), it.col(), it.value());
  out << a.rows() << " " << a.cols() << " " << entries.size() << "\n";
  char buf[64];
  for (const auto& [i, j, v] : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
  }
  write_file_atomic(path, out.str());
}

SparseMatrix load_edge_list(const fs::path& path) {
  const auto rows = parse_csv(read_file(path));
  std::map<std::pair<int, int>, double> edges;
  int n = 0;
  bool first = true;
  for (const auto& r : rows) {
    if (r.empty() || (r.size() == 1 && trim(r[0]).empty())) continue;
    if (!trim(r[0]).empty() && trim(r[0])[0] == '#') continue;
    if (first) {
      first = false;
      const std::string c = trim(r[0]);
      if (!c.empty() && !std::isdigit(static_cast<unsigned char>(c[0]))) continue;  // header
    }
    if (r.size() < 2 || r.size() > 3) parse_fail("edge rows need 2 or 3 fields");
    const long a = parse_long(trim(r[0]), "source");
    const long b = parse_long(trim(r[1]), "target");
    const double w = r.size() == 3 ? parse_double(trim(r[2]), "weight") : 1.0;
    if (a < 0 || b < 0) parse_fail("negative vertex index");
    if (a == b) parse_fail("self-loop in edge list");
    if (!(w > 0.0) || !std::isfinite(w)) parse_fail("edge weights must be positive and finite");
    edges[{static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b))}] = w;
    n = std::max<int>(n, static_cast<int>(std::max(a, b)) + 1);
  }
  if (n < 2) parse_fail("edge list defines fewer than two vertices");
  std::vector<Triplet> trip;
  for (const auto& [e, w] : edges) {
    trip.emplace_back(e.first, e.second, w);
    trip.emplace_back(e.second, e.first, w);
  }
  SparseMatrix adj(n, n);
  adj.setFromTriplets(trip.begin(), trip.end());
  return adj;
}

void save_chain(const fs::path& path, const ReversibleChain& chain) {
  SparseMatrix off = chain.R;
  off.prune([](int i, int j, double) { return i != j; });
  write_matrix_market(path, off, false);
}

ReversibleChain load_rates_chain(const fs::path& path) {
  const SparseMatrix r = read_matrix_market(path, false);
  std::vector<RateEntry> rates;
  for (int i = 0; i < r.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(r, i); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0)
        rates.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
  return build_chain(static_cast<int>(r.rows()), rates);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

std::string CsvWriter::quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string q = "\"";
  for (char c : cell) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string CsvWriter::num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorKind::ShapeMismatch, "CSV row width differs from header");
  for (size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ += ',';
    out_ += quote(cells[k]);
  }
  out_ += "\r\n";
  return *this;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> cur;
  std::string cell;
  bool quoted = false, any = false;
  for (size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < text.size() && text[k + 1] == '"') {
          cell += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      cur.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
      if (any || !cell.empty()) {
        cur.push_back(cell);
        rows.push_back(cur);
      }
      cur.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
    }
  }
  if (quoted) parse_fail("unterminated quoted CSV field");
  if (any || !cell.empty()) {
    cur.push_back(cell);
    rows.push_back(cur);
  }
  return rows;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Json RunConfig::to_json() const {
  return Json{{"input", input},
              {"format", format},
              {"mode", mode},
              {"synthetic_n", synthetic_n},
              {"synthetic_m", synthetic_m},
              {"k", k},
              {"subset_size", subset_size},
              {"t_min", t_min},
              {"t_max", t_max},
              {"t_points", t_points},
              {"curve_points", curve_points},
              {"t_log", t_log},
              {"gamma", gamma},
              {"seed", seed},
              {"n_traj", n_traj},
              {"states", states},
              {"output_dir", output_dir},
              {"verify_chain", verify_chain},
              {"verify_committor", verify_committor},
              {"verify_induced", verify_induced},
              {"verify_marked", verify_marked},
              {"verify_bounds", verify_bounds},
              {"verify_selection", verify_selection},
              {"curves", curves}};
}

void RunConfig::merge(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  const Json known = to_json();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw Error(ErrorKind::InvalidConfig, "unknown config key '" + it.key() + "'");
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
    }
  };
  get("input", input);
  get("format", format);
  get("mode", mode);
  get("synthetic_n", synthetic_n);
  get("synthetic_m", synthetic_m);
  get("k", k);
  get("subset_size", subset_size);
  get("t_min", t_min);
  get("t_max", t_max);
  get("t_points", t_points);
  get("curve_points", curve_points);
  get("t_log", t_log);
  get("gamma", gamma);
  get("seed", seed);
  get("n_traj", n_traj);
  get("states", states);
  get("output_dir", output_dir);
  get("verify_chain", verify_chain);
  get("verify_committor", verify_committor);
  get("verify_induced", verify_induced);
  get("verify_marked", verify_marked);
  get("verify_bounds", verify_bounds);
  get("verify_selection", verify_selection);
  get("curves", curves);
  validate();
}

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
  static const std::vector<std::string> formats = {"mm-adjacency", "mm-rates", "edges-csv", "synthetic-webgraph",
                                                   "random-chain", "fixture-k3", "fixture-p2"};
  if (std::find(formats.begin(), formats.end(), format) == formats.end()) bad("unknown format '" + format + "'");
  if (mode != "webgraph" && mode != "rates") bad("mode must be 'webgraph' or 'rates'");
  if (format == "mm-rates" && mode != "rates") bad("mm-rates input requires mode 'rates'");
  if ((format == "mm-adjacency" || format == "edges-csv") && mode != "webgraph")
    bad("adjacency inputs require mode 'webgraph'");
  if ((format == "mm-adjacency" || format == "edges-csv" || format == "mm-rates") && input.empty())
    bad("format '" + format + "' needs an input path");
  if (synthetic_n < 2) bad("synthetic_n must be >= 2");
  if (synthetic_m < 1 || synthetic_m >= synthetic_n) bad("synthetic_m must lie in [1, synthetic_n)");
  if (k < 1) bad("k must be >= 1");
  if (subset_size < 1) bad("subset_size must be >= 1");
  if (t_min < 0.0 || t_max < 0.0 || (t_max > 0.0 && t_min > t_max)) bad("need 0 <= t_min <= t_max");
  if ((t_min > 0.0) != (t_max > 0.0)) bad("t_min and t_max must both be set or both be 0");
  if (t_points < 1) bad("t_points must be >= 1");
  if (curve_points < 1) bad("curve_points must be >= 1");
  for (int s : states)
    if (s < 0) bad("states must be nonnegative");
  if (t_log && t_min == 0.0 && t_max > 0.0) bad("log grid needs t_min > 0");
  if (gamma < 0.0 || !std::isfinite(gamma)) bad("gamma must be >= 0");
  if (n_traj < 100) bad("n_traj must be >= 100");
  if (output_dir.empty()) bad("output_dir must be non-empty");
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

RunConfig load_config(const fs::path& path) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  cfg.merge(j);
  return cfg;
}

ReversibleChain load_input(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.format == "mm-adjacency") return webgraph_chain(load_matrix_market(cfg.input));
  if (cfg.format == "edges-csv") return webgraph_chain(load_edge_list(cfg.input));
  if (cfg.format == "mm-rates") return load_rates_chain(cfg.input);
  if (cfg.format == "random-chain") return random_chain(cfg.synthetic_n, cfg.seed);
  if (cfg.format == "fixture-k3") return fixture_k3();
  if (cfg.format == "fixture-p2") return fixture_p2();
  return webgraph_chain(synthetic_webgraph(cfg.synthetic_n, cfg.synthetic_m, cfg.seed));
}

std::vector<double> time_grid(const RunConfig& cfg, const SpectralLaplacian& lap) {
  if (cfg.t_max == 0.0) {
    const double scale = lap.trace_K() / lap.n();
    return log_grid(1e-2 * scale, 1e3 * scale, cfg.t_points);
  }
  if (cfg.t_log) return log_grid(cfg.t_min, cfg.t_max, cfg.t_points);
  std::vector<double> g;
  for (int p = 0; p < cfg.t_points; ++p)
    g.push_back(cfg.t_points == 1 ? cfg.t_min
                                  : cfg.t_min + (cfg.t_max - cfg.t_min) * p / (cfg.t_points - 1.0));
  return g;
}

Json provenance(const std::string& config_hash) {
  return Json{{"config_hash", config_hash}, {"version", std::string(kLibraryVersion)}};
}

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string b(bool v) { return v ? "1" : "0"; }

}  // namespace

std::string bound_report_csv(const BoundReport& r, const std::string& config_hash) {
  CsvWriter w({"config_hash", "version", "t",
               "err2_proj", "errnuc_proj", "err2_sp", "errnuc_sp", "err2_sp_proj", "errnuc_sp_proj",
               "bound2_proj", "boundnuc_proj", "bound2_sp_proj", "boundnuc_sp_proj",
               "bound2_sp", "boundnuc_sp", "boundnuc_sp_alt",
               "vacuous2_proj", "vacuousnuc_proj", "vacuous2_sp_proj", "vacuousnuc_sp_proj",
               "vacuous2_sp", "vacuousnuc_sp", "vacuousnuc_sp_alt", "all_hold"});
  const std::string v(kLibraryVersion);
  for (const BoundRow& x : r.rows)
    w.row({config_hash, v, CsvWriter::num(x.t),
           CsvWriter::num(x.err2_proj), CsvWriter::num(x.errnuc_proj), CsvWriter::num(x.err2_sp),
           CsvWriter::num(x.errnuc_sp), CsvWriter::num(x.err2_sp_proj), CsvWriter::num(x.errnuc_sp_proj),
           CsvWriter::num(x.bound2_proj), CsvWriter::num(x.boundnuc_proj), CsvWriter::num(x.bound2_sp_proj),
           CsvWriter::num(x.boundnuc_sp_proj), CsvWriter::num(x.bound2_sp), CsvWriter::num(x.boundnuc_sp),
           CsvWriter::num(x.boundnuc_sp_alt), b(x.vacuous2_proj), b(x.vacuousnuc_proj), b(x.vacuous2_sp_proj),
           b(x.vacuousnuc_sp_proj), b(x.vacuous2_sp), b(x.vacuousnuc_sp), b(x.vacuousnuc_sp_alt),
           b(x.all_hold)});
  return w.str();
}

Json bound_report_json(const BoundReport& r) {
  Json rows = Json::array();
  for (const BoundRow& x : r.rows)
    rows.push_back({{"t", x.t},
                    {"err2_proj", x.err2_proj},
                    {"errnuc_proj", x.errnuc_proj},
                    {"err2_sp", x.err2_sp},
                    {"errnuc_sp", x.errnuc_sp},
                    {"err2_sp_proj", x.err2_sp_proj},
                    {"errnuc_sp_proj", x.errnuc_sp_proj},
                    {"all_hold", x.all_hold}});
  return Json{{"I", r.I.indices()},
              {"eps2", r.eps.eps2},
              {"eps_nuc", r.eps.eps_nuc},
              {"psi2", r.psi.psi2},
              {"psi_nuc", r.psi.psi_nuc},
              {"structured_norms", r.structured_norms},
              {"violations", r.violations},
              {"all_hold", r.all_hold()},
              {"max_ratio",
               {{"proj_2", r.max_ratio_proj_2},
                {"proj_nuc", r.max_ratio_proj_nuc},
                {"sp_proj_2", r.max_ratio_sp_proj_2},
                {"sp_proj_nuc", r.max_ratio_sp_proj_nuc},
                {"sp_2", r.max_ratio_sp_2},
                {"sp_nuc", r.max_ratio_sp_nuc},
                {"sp_nuc_alt", r.max_ratio_sp_alt}}},
              {"rows", rows}};
}

std::string selection_trace_csv(const SelectionTrace& tr, const std::string& config_hash) {
  CsvWriter w({"config_hash", "version", "k", "chosen", "eps_nuc", "score", "spectral_lower_bound", "eps2"});
  for (size_t k = 0; k < tr.ordered.size(); ++k)
    w.row({config_hash, std::string(kLibraryVersion), std::to_string(k + 1), std::to_string(tr.ordered[k]),
           CsvWriter::num(tr.eps_nuc[k]), CsvWriter::num(tr.scores[k]),
           CsvWriter::num(tr.spectral_lower_bound[k]),
           k < tr.eps2.size() ? CsvWriter::num(tr.eps2[k]) : std::string("nan")});
  return w.str();
}

Json selection_trace_json(const SelectionTrace& tr) {
  Json eps2 = Json::array(), fresh = Json::array();
  for (double v : tr.eps2) eps2.push_back(finite_or_null(v));
  for (double v : tr.eps_nuc_fresh) fresh.push_back(finite_or_null(v));
  return Json{{"ordered", tr.ordered},
              {"eps_nuc", tr.eps_nuc},
              {"scores", tr.scores},
              {"spectral_lower_bound", tr.spectral_lower_bound},
              {"eps2", eps2},
              {"eps_nuc_refactored", fresh}};
}

std::string committor_csv(const CommittorBundle& bnd, const std::string& config_hash) {
  CsvWriter w({"config_hash", "version", "state", "target", "committor"});
  for (int i = 0; i < bnd.Ct.rows(); ++i)
    for (int p = 0; p < bnd.I.size(); ++p)
      w.row({config_hash, std::string(kLibraryVersion), std::to_string(i), std::to_string(bnd.I[p]),
             CsvWriter::num(bnd.Ct(i, p))});
  return w.str();
}

Json check_report_json(const CheckReport& r) {
  Json items = Json::array();
  for (const CheckItem& c : r.items)
    items.push_back({{"name", c.name},
                     {"residual", finite_or_null(c.residual)},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed},
                     {"note", c.note}});
  return Json{{"all_passed", r.all_passed()}, {"items", items}};
}

std::string curves_csv(const std::string& family, const std::vector<CurvePoint>& pts,
                       const std::string& config_hash) {
  CsvWriter w({"config_hash", "version", "family", "t", "row", "col", "compressed", "reference",
               "reference_stderr"});
  for (const CurvePoint& p : pts)
    w.row({config_hash, std::string(kLibraryVersion), family, CsvWriter::num(p.t), std::to_string(p.row),
           std::to_string(p.col), CsvWriter::num(p.compressed), CsvWriter::num(p.reference),
           CsvWriter::num(p.reference_stderr)});
  return w.str();
}

}  // namespace mcc
