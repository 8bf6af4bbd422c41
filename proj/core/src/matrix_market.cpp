// SPDX-License-Identifier: Apache-2.0

#include "tmg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tmg {

void write_matrix_market(const DistMatrix& A, std::ostream& out) {
  auto triples = A.gather_triples();
  if (A.comm().rank() != 0) return;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.n_rows() << " " << A.n_cols() << " " << triples.size() << "\n";
  char buf[64];
  for (const auto& [r, c, v] : triples) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 " %" PRId64 " %.17g\n", r + 1, c + 1, v);
    out << buf;
  }
}

void write_matrix_market(const DistMatrix& A, const std::string& path) {
  std::ofstream f;
  if (A.comm().rank() == 0) {
    f.open(path);
    if (!f) throw Error("write_matrix_market: cannot open " + path);
  }
  write_matrix_market(A, f);
  if (A.comm().rank() == 0 && !f) throw Error("write_matrix_market: write to " + path + " failed");
}

DistMatrix read_matrix_market(const Comm& comm, const std::string& path) {
  // Rank 0 parses; the triples travel through the regular gather/broadcast
  // machinery so every rank assembles its own row block.
  std::vector<idx_t> header(2, 0);
  std::vector<idx_t> rows_flat, cols_flat;
  std::vector<double> vals_flat;

  if (comm.rank() == 0) {
    std::ifstream f(path);
    if (!f) throw Error("read_matrix_market: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("%%MatrixMarket", 0) != 0)
      throw Error("read_matrix_market: missing MatrixMarket banner in " + path);
    std::string lowered = line;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lowered.find("coordinate") == std::string::npos ||
        lowered.find("real") == std::string::npos)
      throw Error("read_matrix_market: only coordinate real matrices are supported");
    const bool symmetric = lowered.find("symmetric") != std::string::npos;

    while (std::getline(f, line)) {
      if (!line.empty() && line[0] != '%') break;
    }
    idx_t n_rows = 0, n_cols = 0, n_nz = 0;
    {
      std::istringstream is(line);
      if (!(is >> n_rows >> n_cols >> n_nz))
        throw Error("read_matrix_market: malformed size line");
    }
    header[0] = n_rows;
    header[1] = n_cols;
    for (idx_t t = 0; t < n_nz; ++t) {
      idx_t r = 0, c = 0;
      double v = 0.0;
      if (!(f >> r >> c >> v)) throw Error("read_matrix_market: truncated entry list");
      rows_flat.push_back(r - 1);
      cols_flat.push_back(c - 1);
      vals_flat.push_back(v);
      if (symmetric && r != c) {
        rows_flat.push_back(c - 1);
        cols_flat.push_back(r - 1);
        vals_flat.push_back(v);
      }
    }
  }

  auto bcast_idx = [&comm](std::vector<idx_t>& v) {
    Bytes raw(v.size() * sizeof(idx_t));
    std::memcpy(raw.data(), v.data(), raw.size());
    Bytes got = comm.broadcast(0, raw);
    v.resize(got.size() / sizeof(idx_t));
    std::memcpy(v.data(), got.data(), got.size());
  };
  auto bcast_dbl = [&comm](std::vector<double>& v) {
    Bytes raw(v.size() * sizeof(double));
    std::memcpy(raw.data(), v.data(), raw.size());
    Bytes got = comm.broadcast(0, raw);
    v.resize(got.size() / sizeof(double));
    std::memcpy(v.data(), got.data(), got.size());
  };
  bcast_idx(header);
  bcast_idx(rows_flat);
  bcast_idx(cols_flat);
  bcast_dbl(vals_flat);

  const Layout rows = Layout::block_uniform(header[0], comm.size());
  const Layout cols = Layout::block_uniform(header[1], comm.size());
  MatrixAssembler asmb(comm, rows, cols);
  const idx_t rb = rows.begin(comm.rank());
  const idx_t re = rows.end(comm.rank());
  for (std::size_t t = 0; t < rows_flat.size(); ++t)
    if (rows_flat[t] >= rb && rows_flat[t] < re)
      asmb.add(rows_flat[t], cols_flat[t], vals_flat[t]);
  return asmb.finalize();
}

void write_vector_txt(const DistVector& x, const std::string& path) {
  std::vector<double> full = x.gather_global();
  if (x.comm().rank() != 0) return;
  std::ofstream f(path);
  if (!f) throw Error("write_vector_txt: cannot open " + path);
  char buf[48];
  for (double v : full) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    f << buf;
  }
}

DistVector read_vector_txt(const Comm& comm, const std::string& path) {
  std::vector<double> vals;
  if (comm.rank() == 0) {
    std::ifstream f(path);
    if (!f) throw Error("read_vector_txt: cannot open " + path);
    double v = 0.0;
    while (f >> v) vals.push_back(v);
  }
  Bytes raw(vals.size() * sizeof(double));
  std::memcpy(raw.data(), vals.data(), raw.size());
  Bytes got = comm.broadcast(0, raw);
  vals.resize(got.size() / sizeof(double));
  std::memcpy(vals.data(), got.data(), got.size());

  DistVector x(comm, Layout::block_uniform(static_cast<idx_t>(vals.size()), comm.size()));
  for (idx_t i = 0; i < x.local_size(); ++i)
    x[i] = vals[static_cast<std::size_t>(x.lbegin() + i)];
  return x;
}

} // namespace tmg
