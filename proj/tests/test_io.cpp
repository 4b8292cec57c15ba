#include "mcc/io.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>

using namespace mcc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mcc_io_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an mcc::Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(MatrixMarket, K3Symmetric) {
  const auto p = scratch("k3.mtx");
  write(p, "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n2 1 1\n3 1 1\n3 2 1\n");
  const SparseMatrix a = load_matrix_market(p);
  EXPECT_EQ(a.rows(), 3);
  const Matrix d(a);
  EXPECT_EQ(d, d.transpose());
  EXPECT_EQ(d.sum(), 6.0);
  const auto chain = webgraph_chain(a);
  EXPECT_NEAR(chain.pi(0), 1.0 / 3.0, 1e-15);
}

TEST(MatrixMarket, Errors) {
  const auto p = scratch("bad.mtx");
  write(p, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::ParseError);
  write(p, "not a banner\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::ParseError);
  write(p, "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::ParseError);
  write(p, "%%MatrixMarket matrix coordinate real general\n3 3 1\n1 4 1\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::ParseError);
  write(p, "%%MatrixMarket matrix coordinate real general\n3 3 1\n1 2 x\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::ParseError);
  write(p, "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1\n2 3 1\n");
  EXPECT_EQ(kind_of([&] { load_matrix_market(p); }), ErrorKind::AsymmetricInput);
  EXPECT_EQ(kind_of([&] { load_matrix_market(scratch("missing.mtx")); }), ErrorKind::IoError);
}

TEST(MatrixMarket, GeneralDuplicatesSummed) {
  const auto a = parse_matrix_market(
      "%%MatrixMarket matrix coordinate integer general\n2 2 4\n1 2 1\n1 2 2\n2 1 3\n2 2 0\n", true);
  EXPECT_EQ(Matrix(a)(0, 1), 3.0);
  const auto pat = parse_matrix_market("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n", true);
  EXPECT_EQ(Matrix(pat)(0, 1), 1.0);
}

TEST(MatrixMarket, ChainRoundTrip) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto chain = random_chain(25, seed);
    const auto p = scratch("chain.mtx");
    save_chain(p, chain);
    const auto back = load_rates_chain(p);
    EXPECT_LE(mcc::testing::max_abs_diff(back.dense_rates(), chain.dense_rates()),
              1e-14 * max_abs(chain.dense_rates()));
    EXPECT_LE((back.pi - chain.pi).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto adj = synthetic_webgraph(50, 2, 4);
  const auto p = scratch("adj.mtx");
  write_matrix_market(p, adj, true);
  EXPECT_EQ(Matrix(load_matrix_market(p)), Matrix(adj));
}

TEST(EdgeList, ParsesWithHeader) {
  const auto p = scratch("edges.csv");
  write(p, "source,target\n0,1\n1,2\n# comment\n2,0\n1,0\n");
  const auto a = load_edge_list(p);
  EXPECT_EQ(a.rows(), 3);
  EXPECT_EQ(Matrix(a).sum(), 6.0);
  write(p, "0,0\n");
  EXPECT_EQ(kind_of([&] { load_edge_list(p); }), ErrorKind::ParseError);
}

TEST(Csv, QuotingRoundTrip) {
  CsvWriter w({"a", "b,c", "d"});
  w.row({"x\"y", "1", "line\nbreak"});
  const auto rows = parse_csv(w.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][1], "b,c");
  EXPECT_EQ(rows[1][0], "x\"y");
  EXPECT_EQ(rows[1][2], "line\nbreak");
  EXPECT_THROW(w.row({"too", "short"}), Error);
  EXPECT_EQ(CsvWriter::num(0.1), "0.10000000000000001");
}

TEST(Config, UnknownKeysRejected) {
  RunConfig cfg;
  EXPECT_EQ(kind_of([&] { cfg.merge(Json{{"bogus", 1}}); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { cfg.merge(Json{{"k", "five"}}); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { cfg.merge(Json{{"k", 0}}); }), ErrorKind::InvalidConfig);
  RunConfig ok;
  ok.merge(Json{{"k", 7}, {"seed", 3}});
  EXPECT_EQ(ok.k, 7);
  RunConfig other;
  EXPECT_NE(ok.hash(), other.hash());
  RunConfig same;
  same.merge(Json{{"seed", 3}, {"k", 7}});
  EXPECT_EQ(ok.hash(), same.hash());
  const auto p = scratch("cfg.json");
  write(p, "{\"k\": 4, \"format\": \"random-chain\", \"mode\": \"rates\"}");
  EXPECT_EQ(load_config(p).k, 4);
  write(p, "{not json");
  EXPECT_EQ(kind_of([&] { load_config(p); }), ErrorKind::InvalidConfig);
}

TEST(Io, AtomicWriteAndFnv) {
  const auto p = scratch("atomic.txt");
  write_file_atomic(p, "hello");
  EXPECT_EQ(read_file(p), "hello");
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Io, ReportSerializers) {
  const auto chain = fixture_k3();
  const auto lap = symmetrize(chain);
  const auto b = committor_closed_form(lap, IndexSet({0, 1}, 3));
  const auto ic = induced_chain(chain, b);
  const auto rep = error_curves(lap, b, ic, {0.5, 5.0});
  const auto rows = parse_csv(bound_report_csv(rep, "abc"));
  ASSERT_EQ(rows.size(), 3u);
  for (const char* col : {"t", "err2_proj", "errnuc_proj", "err2_sp", "errnuc_sp", "bound2_proj", "boundnuc_proj",
                          "bound2_sp_proj", "boundnuc_sp_proj", "boundnuc_sp_alt"})
    EXPECT_NE(std::find(rows[0].begin(), rows[0].end(), col), rows[0].end()) << col;
  const Json j = bound_report_json(rep);
  EXPECT_TRUE(j.at("all_hold").get<bool>());
  const auto tr = greedy_select(lap, 2);
  EXPECT_EQ(parse_csv(selection_trace_csv(tr, "abc")).size(), 3u);
  EXPECT_EQ(selection_trace_json(tr).at("ordered").size(), 2u);
  EXPECT_EQ(parse_csv(committor_csv(b, "abc")).size(), 7u);
}
