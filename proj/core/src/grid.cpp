// SPDX-License-Identifier: Apache-2.0

#include "tmg/grid.hpp"

#include <algorithm>
#include <cstring>

namespace tmg {

namespace {
enum : int { kTagGhost = 301, kTagCoords = 302 };
} // namespace

// ---------------------------------------------------------------------------
// GridHeader

std::array<int, 3> GridHeader::proc_coords(int rank) const {
  std::array<int, 3> pc{};
  pc[0] = rank % proc_grid[0];
  pc[1] = (rank / proc_grid[0]) % proc_grid[1];
  pc[2] = rank / (proc_grid[0] * proc_grid[1]);
  return pc;
}

int GridHeader::proc_rank(int pi, int pj, int pk) const {
  return pi + proc_grid[0] * (pj + proc_grid[1] * pk);
}

GridBox GridHeader::box(int rank) const {
  const auto pc = proc_coords(rank);
  GridBox b;
  for (int a = 0; a < 3; ++a) {
    const auto& off = axis_offsets[static_cast<std::size_t>(a)];
    b.lo[static_cast<std::size_t>(a)] = off[static_cast<std::size_t>(pc[static_cast<std::size_t>(a)])];
    b.hi[static_cast<std::size_t>(a)] = off[static_cast<std::size_t>(pc[static_cast<std::size_t>(a)]) + 1];
  }
  return b;
}

Layout GridHeader::layout() const {
  std::vector<idx_t> sizes;
  const int nr = n_ranks();
  sizes.reserve(static_cast<std::size_t>(nr));
  for (int r = 0; r < nr; ++r) sizes.push_back(box(r).n_vertices() * dof);
  return Layout::from_sizes(sizes);
}

idx_t GridHeader::natural_index(idx_t i, idx_t j, idx_t k, int c) const {
  return c + dof * (i + npoints[0] * (j + npoints[1] * k));
}

void GridHeader::natural_decompose(idx_t natural, idx_t& i, idx_t& j, idx_t& k, int& c) const {
  c = static_cast<int>(natural % dof);
  idx_t v = natural / dof;
  i = v % npoints[0];
  v /= npoints[0];
  j = v % npoints[1];
  k = v / npoints[1];
}

idx_t GridHeader::global_index(idx_t i, idx_t j, idx_t k, int c) const {
  // Owning processor-grid slot per axis.
  std::array<int, 3> pc{};
  const idx_t ijk[3] = {i, j, k};
  for (int a = 0; a < 3; ++a) {
    const auto& off = axis_offsets[static_cast<std::size_t>(a)];
    auto it = std::upper_bound(off.begin(), off.end(), ijk[a]);
    pc[static_cast<std::size_t>(a)] = static_cast<int>(it - off.begin()) - 1;
  }
  const int rank = proc_rank(pc[0], pc[1], pc[2]);
  const GridBox b = box(rank);
  const idx_t li = i - b.lo[0];
  const idx_t lj = j - b.lo[1];
  const idx_t lk = k - b.lo[2];
  const idx_t vertex = li + b.extent(0) * (lj + b.extent(1) * lk);

  // Offset of this rank's block. Cache-free recomputation keeps the header
  // value-semantic; grids are small enough that this never shows up.
  idx_t offset = 0;
  for (int r = 0; r < rank; ++r) offset += box(r).n_vertices() * dof;
  return offset + vertex * dof + c;
}

void GridHeader::global_decompose(idx_t global, idx_t& i, idx_t& j, idx_t& k, int& c) const {
  idx_t offset = 0;
  int rank = 0;
  const int nr = n_ranks();
  for (; rank < nr; ++rank) {
    const idx_t sz = box(rank).n_vertices() * dof;
    if (global < offset + sz) break;
    offset += sz;
  }
  const GridBox b = box(rank);
  idx_t local = global - offset;
  c = static_cast<int>(local % dof);
  idx_t v = local / dof;
  i = b.lo[0] + v % b.extent(0);
  v /= b.extent(0);
  j = b.lo[1] + v % b.extent(1);
  k = b.lo[2] + v / b.extent(1);
}

idx_t GridHeader::natural_to_global(idx_t natural) const {
  idx_t i, j, k;
  int c;
  natural_decompose(natural, i, j, k, c);
  return global_index(i, j, k, c);
}

idx_t GridHeader::global_to_natural(idx_t global) const {
  idx_t i, j, k;
  int c;
  global_decompose(global, i, j, k, c);
  return natural_index(i, j, k, c);
}

void to_json(nlohmann::json& j, const GridHeader& h) {
  j = nlohmann::json{{"dim", h.dim},
                     {"npoints", h.npoints},
                     {"dof", h.dof},
                     {"stencil_width", h.stencil_width},
                     {"proc_grid", h.proc_grid},
                     {"ownership", h.axis_offsets}};
}

void from_json(const nlohmann::json& j, GridHeader& h) {
  j.at("dim").get_to(h.dim);
  j.at("npoints").get_to(h.npoints);
  j.at("dof").get_to(h.dof);
  j.at("stencil_width").get_to(h.stencil_width);
  j.at("proc_grid").get_to(h.proc_grid);
  j.at("ownership").get_to(h.axis_offsets);
}

// ---------------------------------------------------------------------------
// StructuredGrid

StructuredGrid::StructuredGrid(Comm comm, GridHeader header)
    : comm_(std::move(comm)), header_(std::move(header)) {
  if (header_.n_ranks() != comm_.size())
    throw Error("StructuredGrid: processor grid does not match communicator size");
}

std::array<double, 3> StructuredGrid::spacing() const {
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    const idx_t n = header_.npoints[static_cast<std::size_t>(a)];
    if (n > 1) h[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(n - 1);
  }
  return h;
}

std::array<double, 3> StructuredGrid::vertex_coords(idx_t i, idx_t j, idx_t k) const {
  const GridBox b = local_box();
  if (!b.contains(i, j, k)) throw Error("vertex_coords: vertex not owned by this rank");
  if (custom_coords_) {
    const idx_t li = i - b.lo[0];
    const idx_t lj = j - b.lo[1];
    const idx_t lk = k - b.lo[2];
    const idx_t v = li + b.extent(0) * (lj + b.extent(1) * lk);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int a = 0; a < dim(); ++a)
      out[static_cast<std::size_t>(a)] =
          (*custom_coords_)[static_cast<std::size_t>(v * dim() + a)];
    return out;
  }
  const auto h = spacing();
  return {static_cast<double>(i) * h[0], static_cast<double>(j) * h[1],
          static_cast<double>(k) * h[2]};
}

void StructuredGrid::set_custom_coords(std::vector<double> coords) {
  const idx_t expect = local_box().n_vertices() * dim();
  if (static_cast<idx_t>(coords.size()) != expect)
    throw Error("set_custom_coords: expected " + std::to_string(expect) + " values");
  custom_coords_ = std::move(coords);
}

// ---------------------------------------------------------------------------
// create_grid

namespace {

std::vector<idx_t> split_axis(idx_t n, int parts) {
  // Near-equal split, larger blocks first.
  std::vector<idx_t> off(static_cast<std::size_t>(parts) + 1, 0);
  const idx_t base = n / parts;
  const idx_t rem = n % parts;
  for (int p = 0; p < parts; ++p)
    off[static_cast<std::size_t>(p) + 1] =
        off[static_cast<std::size_t>(p)] + base + (p < rem ? 1 : 0);
  return off;
}

void enumerate_factorizations(int size, int dim, std::array<int, 3> cur, int axis,
                              std::vector<std::array<int, 3>>& out) {
  if (axis == dim - 1) {
    cur[static_cast<std::size_t>(axis)] = size;
    out.push_back(cur);
    return;
  }
  for (int f = 1; f <= size; ++f) {
    if (size % f != 0) continue;
    cur[static_cast<std::size_t>(axis)] = f;
    enumerate_factorizations(size / f, dim, cur, axis + 1, out);
  }
}

std::array<int, 3> choose_proc_grid(int size, int dim, const std::array<idx_t, 3>& npoints) {
  std::vector<std::array<int, 3>> cands;
  enumerate_factorizations(size, dim, {1, 1, 1}, 0, cands);
  std::optional<std::array<int, 3>> best;
  double best_cost = 0.0;
  for (const auto& pg : cands) {
    bool feasible = true;
    double cost = 0.0;
    for (int a = 0; a < dim; ++a) {
      if (pg[static_cast<std::size_t>(a)] > npoints[static_cast<std::size_t>(a)]) feasible = false;
      cost += static_cast<double>(pg[static_cast<std::size_t>(a)]) /
              static_cast<double>(npoints[static_cast<std::size_t>(a)]);
    }
    if (!feasible) continue;
    if (!best || cost < best_cost - 1e-15) {
      best = pg;
      best_cost = cost;
    } else if (cost < best_cost + 1e-15) {
      // Tie: prefer more ranks on the slowest-varying axis.
      for (int a = dim - 1; a >= 0; --a) {
        if (pg[static_cast<std::size_t>(a)] != (*best)[static_cast<std::size_t>(a)]) {
          if (pg[static_cast<std::size_t>(a)] > (*best)[static_cast<std::size_t>(a)]) best = pg;
          break;
        }
      }
    }
  }
  if (!best)
    throw ConfigError("create_grid: over-decomposed (no factorization of " +
                      std::to_string(size) + " ranks fits the grid)");
  return *best;
}

GridHeader make_header(int dim, std::array<idx_t, 3> npoints, int dof, int stencil_width,
                       std::array<int, 3> proc_grid) {
  GridHeader h;
  h.dim = dim;
  h.npoints = npoints;
  h.dof = dof;
  h.stencil_width = stencil_width;
  h.proc_grid = proc_grid;
  for (int a = 0; a < 3; ++a)
    h.axis_offsets[static_cast<std::size_t>(a)] =
        split_axis(npoints[static_cast<std::size_t>(a)], proc_grid[static_cast<std::size_t>(a)]);
  return h;
}

GridHeader build_header_for(int comm_size, int dim, std::array<idx_t, 3> npoints, int dof,
                            int stencil_width, std::optional<std::array<int, 3>> hint) {
  if (dim < 1 || dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (dof < 1) throw ConfigError("dof must be positive");
  if (stencil_width < 0) throw ConfigError("stencil width must be nonnegative");
  for (int a = dim; a < 3; ++a)
    if (npoints[static_cast<std::size_t>(a)] != 1)
      throw ConfigError("trailing axes of a " + std::to_string(dim) + "D grid must hold 1 point");
  for (int a = 0; a < dim; ++a)
    if (npoints[static_cast<std::size_t>(a)] < 1) throw ConfigError("npoints must be positive");

  std::array<int, 3> pg{1, 1, 1};
  if (hint) {
    pg = *hint;
    int prod = 1;
    for (int a = 0; a < 3; ++a) prod *= pg[static_cast<std::size_t>(a)];
    if (prod != comm_size)
      throw ConfigError("create_grid: processor grid hint does not multiply to the communicator size");
    for (int a = 0; a < 3; ++a)
      if (pg[static_cast<std::size_t>(a)] > npoints[static_cast<std::size_t>(a)])
        throw ConfigError("create_grid: over-decomposed (axis " + std::to_string(a) + " has " +
                          std::to_string(npoints[static_cast<std::size_t>(a)]) +
                          " vertices for " + std::to_string(pg[static_cast<std::size_t>(a)]) +
                          " ranks)");
  } else {
    pg = choose_proc_grid(comm_size, dim, npoints);
  }
  return make_header(dim, npoints, dof, stencil_width, pg);
}

} // namespace

StructuredGrid create_grid(const Comm& comm, int dim, std::array<idx_t, 3> npoints, int dof,
                           int stencil_width, std::optional<std::array<int, 3>> proc_grid_hint) {
  GridHeader h = build_header_for(comm.size(), dim, npoints, dof, stencil_width, proc_grid_hint);
  return StructuredGrid(comm, h);
}

// ---------------------------------------------------------------------------
// coarsen

namespace {

std::optional<GridHeader> try_coarsen_header(const GridHeader& fine) {
  GridHeader coarse = fine;
  for (int a = 0; a < fine.dim; ++a) {
    const idx_t n = fine.npoints[static_cast<std::size_t>(a)];
    if (n == 1) continue; // degenerate axis stays put
    if (n < 3 || n % 2 == 0) return std::nullopt;
    coarse.npoints[static_cast<std::size_t>(a)] = (n + 1) / 2;
  }
  // Align ownership: coarse vertex c sits where fine vertex 2c sits.
  for (int a = 0; a < 3; ++a) {
    const auto& fine_off = fine.axis_offsets[static_cast<std::size_t>(a)];
    auto& off = coarse.axis_offsets[static_cast<std::size_t>(a)];
    if (fine.npoints[static_cast<std::size_t>(a)] ==
        coarse.npoints[static_cast<std::size_t>(a)]) {
      off = fine_off;
      continue;
    }
    off.resize(fine_off.size());
    for (std::size_t p = 0; p < fine_off.size(); ++p) off[p] = (fine_off[p] + 1) / 2;
    for (std::size_t p = 0; p + 1 < off.size(); ++p)
      if (off[p + 1] <= off[p]) return std::nullopt; // some rank would own nothing
  }
  return coarse;
}

} // namespace

bool can_coarsen(const StructuredGrid& grid) {
  return try_coarsen_header(grid.header()).has_value();
}

StructuredGrid coarsen(const StructuredGrid& grid) {
  auto coarse = try_coarsen_header(grid.header());
  if (!coarse)
    throw ConfigError("cannot coarsen: grid " + std::to_string(grid.npoints()[0]) + "x" +
                      std::to_string(grid.npoints()[1]) + "x" + std::to_string(grid.npoints()[2]) +
                      " on a " + std::to_string(grid.proc_grid()[0]) + "x" +
                      std::to_string(grid.proc_grid()[1]) + "x" +
                      std::to_string(grid.proc_grid()[2]) +
                      " processor grid (axes need 2M+1 vertices and every rank one vertex)");
  StructuredGrid out(grid.comm(), *coarse);
  if (grid.has_custom_coords()) {
    // Coarse vertices are fine vertices with even indices owned by the same
    // rank; extract locally.
    const GridBox fb = grid.local_box();
    const GridBox cb = out.local_box();
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(cb.n_vertices() * grid.dim()));
    const auto& fine_coords = grid.custom_coords();
    std::array<idx_t, 3> step{};
    for (int a = 0; a < 3; ++a)
      step[static_cast<std::size_t>(a)] =
          grid.npoints()[static_cast<std::size_t>(a)] ==
                  out.npoints()[static_cast<std::size_t>(a)]
              ? 1
              : 2;
    for (idx_t k = cb.lo[2]; k < cb.hi[2]; ++k)
      for (idx_t j = cb.lo[1]; j < cb.hi[1]; ++j)
        for (idx_t i = cb.lo[0]; i < cb.hi[0]; ++i) {
          const idx_t fi = i * step[0] - fb.lo[0];
          const idx_t fj = j * step[1] - fb.lo[1];
          const idx_t fk = k * step[2] - fb.lo[2];
          const idx_t v = fi + fb.extent(0) * (fj + fb.extent(1) * fk);
          for (int a = 0; a < grid.dim(); ++a)
            coords.push_back(fine_coords[static_cast<std::size_t>(v * grid.dim() + a)]);
        }
    out.set_custom_coords(std::move(coords));
  }
  return out;
}

// ---------------------------------------------------------------------------
// interpolation

DistMatrix create_interpolation(const StructuredGrid& coarse, const StructuredGrid& fine) {
  if (coarse.dof() != fine.dof() || coarse.dim() != fine.dim())
    throw Error("create_interpolation: grids do not match");
  for (int a = 0; a < fine.dim(); ++a) {
    const idx_t nf = fine.npoints()[static_cast<std::size_t>(a)];
    const idx_t nc = coarse.npoints()[static_cast<std::size_t>(a)];
    if (!(nf == nc || nf == 2 * nc - 1))
      throw Error("create_interpolation: fine grid is not a refinement of the coarse grid");
  }
  if (!fine.comm().same_as(coarse.comm()))
    throw Error("create_interpolation: grids live on different communicators");

  const GridHeader& ch = coarse.header();
  const GridHeader& fh = fine.header();
  MatrixAssembler asmb(fine.comm(), fh.layout(), ch.layout());

  const GridBox b = fine.local_box();
  const int dof = fine.dof();
  std::array<bool, 3> refined{};
  for (int a = 0; a < 3; ++a)
    refined[static_cast<std::size_t>(a)] =
        fh.npoints[static_cast<std::size_t>(a)] != ch.npoints[static_cast<std::size_t>(a)];

  for (idx_t k = b.lo[2]; k < b.hi[2]; ++k)
    for (idx_t j = b.lo[1]; j < b.hi[1]; ++j)
      for (idx_t i = b.lo[0]; i < b.hi[0]; ++i) {
        // Per-axis stencil: coincident vertex or midpoint between two.
        struct AxisW {
          idx_t at[2];
          double w[2];
          int n;
        };
        std::array<AxisW, 3> aw{};
        const idx_t f[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
          if (!refined[static_cast<std::size_t>(a)]) {
            aw[static_cast<std::size_t>(a)] = {{f[a], 0}, {1.0, 0.0}, 1};
          } else if (f[a] % 2 == 0) {
            aw[static_cast<std::size_t>(a)] = {{f[a] / 2, 0}, {1.0, 0.0}, 1};
          } else {
            aw[static_cast<std::size_t>(a)] = {{(f[a] - 1) / 2, (f[a] + 1) / 2}, {0.5, 0.5}, 2};
          }
        }
        for (int c = 0; c < dof; ++c) {
          const idx_t row = fh.global_index(i, j, k, c);
          for (int tz = 0; tz < aw[2].n; ++tz)
            for (int ty = 0; ty < aw[1].n; ++ty)
              for (int tx = 0; tx < aw[0].n; ++tx) {
                const double w = aw[0].w[tx] * aw[1].w[ty] * aw[2].w[tz];
                const idx_t col = ch.global_index(aw[0].at[tx], aw[1].at[ty], aw[2].at[tz], c);
                asmb.add(row, col, w);
              }
        }
      }
  return asmb.finalize();
}

// ---------------------------------------------------------------------------
// repartition

RepartitionResult repartition_onto(const StructuredGrid& grid, const SplitResult& split,
                                   const std::array<std::optional<int>, 3>& proc_override) {
  const Comm& parent = grid.comm();
  if (split.parent_comm_id != parent.id() || split.parent_size != parent.size())
    throw Error("repartition_onto: split does not derive from the grid communicator");
  const int sub_size = static_cast<int>(split.member_map.size());

  bool any_override = false;
  for (const auto& o : proc_override) any_override |= o.has_value();

  GridHeader new_header;
  if (!any_override && sub_size == parent.size()) {
    // Identity reduction keeps the parent decomposition so the permutation
    // degenerates to the identity.
    new_header = grid.header();
  } else if (any_override) {
    // Partial overrides fix some axes; the rest follows the balanced rule.
    std::array<int, 3> fixed{0, 0, 0};
    int fixed_prod = 1;
    int n_free = 0;
    for (int a = 0; a < 3; ++a) {
      if (proc_override[static_cast<std::size_t>(a)]) {
        fixed[static_cast<std::size_t>(a)] = *proc_override[static_cast<std::size_t>(a)];
        if (fixed[static_cast<std::size_t>(a)] < 1)
          throw ConfigError("repartition_onto: processor override must be positive");
        fixed_prod *= fixed[static_cast<std::size_t>(a)];
      } else if (a < grid.dim()) {
        ++n_free;
      } else {
        fixed[static_cast<std::size_t>(a)] = 1;
      }
    }
    if (fixed_prod > sub_size || sub_size % fixed_prod != 0)
      throw ConfigError("repartition_onto: processor overrides do not divide the " +
                        std::to_string(sub_size) + "-rank sub-communicator");
    std::array<int, 3> pg = fixed;
    if (n_free == 0) {
      if (fixed_prod != sub_size)
        throw ConfigError("repartition_onto: processor override product must equal the sub-communicator size");
    } else {
      // Choose the free axes with the balanced rule on the residual size.
      std::array<idx_t, 3> free_np{1, 1, 1};
      std::vector<int> free_axes;
      for (int a = 0; a < grid.dim(); ++a)
        if (!proc_override[static_cast<std::size_t>(a)]) {
          free_axes.push_back(a);
          free_np[free_axes.size() - 1] = grid.npoints()[static_cast<std::size_t>(a)];
        }
      const auto chosen = choose_proc_grid(sub_size / fixed_prod,
                                           static_cast<int>(free_axes.size()), free_np);
      for (std::size_t t = 0; t < free_axes.size(); ++t)
        pg[static_cast<std::size_t>(free_axes[t])] = chosen[t];
    }
    for (int a = 0; a < 3; ++a)
      if (pg[static_cast<std::size_t>(a)] > grid.npoints()[static_cast<std::size_t>(a)])
        throw ConfigError("repartition_onto: over-decomposed on axis " + std::to_string(a));
    new_header = make_header(grid.dim(), grid.npoints(), grid.dof(), grid.stencil_width(), pg);
  } else {
    new_header = build_header_for(sub_size, grid.dim(), grid.npoints(), grid.dof(),
                                  grid.stencil_width(), std::nullopt);
  }

  RepartitionResult result;
  result.header = new_header;
  if (split.is_member()) result.grid = StructuredGrid(*split.sub, new_header);

  if (grid.has_custom_coords()) {
    // Scatter per-vertex coordinates straight to their new owners: both
    // sides can compute every box intersection from the headers.
    std::vector<std::vector<double>> outbox(static_cast<std::size_t>(sub_size));
    const GridBox ob = grid.local_box();
    for (int m = 0; m < sub_size; ++m) {
      const GridBox nb = new_header.box(m);
      GridBox is;
      bool empty = false;
      for (int a = 0; a < 3; ++a) {
        is.lo[static_cast<std::size_t>(a)] =
            std::max(ob.lo[static_cast<std::size_t>(a)], nb.lo[static_cast<std::size_t>(a)]);
        is.hi[static_cast<std::size_t>(a)] =
            std::min(ob.hi[static_cast<std::size_t>(a)], nb.hi[static_cast<std::size_t>(a)]);
        empty |= is.lo[static_cast<std::size_t>(a)] >= is.hi[static_cast<std::size_t>(a)];
      }
      if (empty) continue;
      auto& buf = outbox[static_cast<std::size_t>(m)];
      for (idx_t k = is.lo[2]; k < is.hi[2]; ++k)
        for (idx_t j = is.lo[1]; j < is.hi[1]; ++j)
          for (idx_t i = is.lo[0]; i < is.hi[0]; ++i) {
            const auto xyz = grid.vertex_coords(i, j, k);
            for (int a = 0; a < grid.dim(); ++a) buf.push_back(xyz[static_cast<std::size_t>(a)]);
          }
      const int dest = split.member_map[static_cast<std::size_t>(m)];
      if (dest != parent.rank()) parent.send_values<double>(dest, kTagCoords, buf);
    }
    if (result.grid) {
      const GridBox nb = result.grid->local_box();
      std::vector<double> coords(
          static_cast<std::size_t>(nb.n_vertices() * grid.dim()), 0.0);
      for (int src = 0; src < parent.size(); ++src) {
        const GridBox sb = grid.header().box(src);
        GridBox is;
        bool empty = false;
        for (int a = 0; a < 3; ++a) {
          is.lo[static_cast<std::size_t>(a)] =
              std::max(sb.lo[static_cast<std::size_t>(a)], nb.lo[static_cast<std::size_t>(a)]);
          is.hi[static_cast<std::size_t>(a)] =
              std::min(sb.hi[static_cast<std::size_t>(a)], nb.hi[static_cast<std::size_t>(a)]);
          empty |= is.lo[static_cast<std::size_t>(a)] >= is.hi[static_cast<std::size_t>(a)];
        }
        if (empty) continue;
        std::vector<double> buf;
        if (src == parent.rank())
          buf = outbox[static_cast<std::size_t>(split.sub->rank())];
        else
          buf = parent.recv_values<double>(src, kTagCoords);
        std::size_t at = 0;
        for (idx_t k = is.lo[2]; k < is.hi[2]; ++k)
          for (idx_t j = is.lo[1]; j < is.hi[1]; ++j)
            for (idx_t i = is.lo[0]; i < is.hi[0]; ++i) {
              const idx_t v = (i - nb.lo[0]) +
                              nb.extent(0) * ((j - nb.lo[1]) + nb.extent(1) * (k - nb.lo[2]));
              for (int a = 0; a < grid.dim(); ++a)
                coords[static_cast<std::size_t>(v * grid.dim() + a)] = buf[at++];
            }
      }
      result.grid->set_custom_coords(std::move(coords));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// permutation

Layout prefusion_layout(const GridHeader& new_header, const SplitResult& split) {
  const Layout dst = new_header.layout();
  std::vector<idx_t> sizes(static_cast<std::size_t>(split.parent_size), 0);
  for (int m = 0; m < static_cast<int>(split.member_map.size()); ++m) {
    const idx_t rows = dst.local_size(m);
    const int gb = split.group_begin(m);
    const int ge = split.group_end(m);
    const int width = ge - gb;
    const idx_t base = rows / width;
    const idx_t rem = rows % width;
    for (int p = gb; p < ge; ++p)
      sizes[static_cast<std::size_t>(p)] = base + ((p - gb) < rem ? 1 : 0);
  }
  return Layout::from_sizes(sizes);
}

DistMatrix build_permutation(const StructuredGrid& old_grid, const GridHeader& new_header,
                             const SplitResult& split) {
  if (!old_grid.header().same_global_grid(new_header))
    throw Error("build_permutation: grids describe different global problems");
  const Comm& comm = old_grid.comm();
  const Layout rows = old_grid.header().layout();
  const Layout cols = prefusion_layout(new_header, split);

  MatrixAssembler asmb(comm, rows, cols);
  const idx_t rb = rows.begin(comm.rank());
  const idx_t re = rows.end(comm.rank());
  for (idx_t p = rb; p < re; ++p) {
    const idx_t natural = old_grid.header().global_to_natural(p);
    const idx_t q = new_header.natural_to_global(natural);
    asmb.add(p, q, 1.0);
  }
  return asmb.finalize();
}

// ---------------------------------------------------------------------------
// ghost exchange

GridBox halo_box(const StructuredGrid& grid, int width) {
  GridBox b = grid.local_box();
  for (int a = 0; a < 3; ++a) {
    if (grid.npoints()[static_cast<std::size_t>(a)] == 1) continue;
    b.lo[static_cast<std::size_t>(a)] =
        std::max<idx_t>(0, b.lo[static_cast<std::size_t>(a)] - width);
    b.hi[static_cast<std::size_t>(a)] = std::min<idx_t>(
        grid.npoints()[static_cast<std::size_t>(a)], b.hi[static_cast<std::size_t>(a)] + width);
  }
  return b;
}

namespace {

GridBox intersect(const GridBox& a, const GridBox& b) {
  GridBox is;
  for (int ax = 0; ax < 3; ++ax) {
    is.lo[static_cast<std::size_t>(ax)] =
        std::max(a.lo[static_cast<std::size_t>(ax)], b.lo[static_cast<std::size_t>(ax)]);
    is.hi[static_cast<std::size_t>(ax)] =
        std::min(a.hi[static_cast<std::size_t>(ax)], b.hi[static_cast<std::size_t>(ax)]);
    if (is.hi[static_cast<std::size_t>(ax)] < is.lo[static_cast<std::size_t>(ax)])
      is.hi[static_cast<std::size_t>(ax)] = is.lo[static_cast<std::size_t>(ax)];
  }
  return is;
}

GridBox halo_box_of(const StructuredGrid& grid, int rank, int width) {
  GridBox b = grid.header().box(rank);
  for (int a = 0; a < 3; ++a) {
    if (grid.npoints()[static_cast<std::size_t>(a)] == 1) continue;
    b.lo[static_cast<std::size_t>(a)] =
        std::max<idx_t>(0, b.lo[static_cast<std::size_t>(a)] - width);
    b.hi[static_cast<std::size_t>(a)] = std::min<idx_t>(
        grid.npoints()[static_cast<std::size_t>(a)], b.hi[static_cast<std::size_t>(a)] + width);
  }
  return b;
}

} // namespace

void ghost_exchange(const StructuredGrid& grid, std::vector<double>& local, int width) {
  const GridBox hb = halo_box(grid, width);
  const int dof = grid.dof();
  if (static_cast<idx_t>(local.size()) != hb.n_vertices() * dof)
    throw Error("ghost_exchange: local array does not match the halo box");
  if (width == 0) return;

  const Comm& comm = grid.comm();
  const GridBox mine = grid.local_box();

  auto pack = [&](const GridBox& region, const GridBox& frame, const std::vector<double>& src,
                  std::vector<double>& dst) {
    for (idx_t k = region.lo[2]; k < region.hi[2]; ++k)
      for (idx_t j = region.lo[1]; j < region.hi[1]; ++j)
        for (idx_t i = region.lo[0]; i < region.hi[0]; ++i) {
          const idx_t v = (i - frame.lo[0]) +
                          frame.extent(0) * ((j - frame.lo[1]) + frame.extent(1) * (k - frame.lo[2]));
          for (int c = 0; c < dof; ++c)
            dst.push_back(src[static_cast<std::size_t>(v * dof + c)]);
        }
  };
  auto unpack = [&](const GridBox& region, const GridBox& frame, const std::vector<double>& src,
                    std::vector<double>& dst) {
    std::size_t at = 0;
    for (idx_t k = region.lo[2]; k < region.hi[2]; ++k)
      for (idx_t j = region.lo[1]; j < region.hi[1]; ++j)
        for (idx_t i = region.lo[0]; i < region.hi[0]; ++i) {
          const idx_t v = (i - frame.lo[0]) +
                          frame.extent(0) * ((j - frame.lo[1]) + frame.extent(1) * (k - frame.lo[2]));
          for (int c = 0; c < dof; ++c)
            dst[static_cast<std::size_t>(v * dof + c)] = src[at++];
        }
  };

  for (int other = 0; other < comm.size(); ++other) {
    if (other == comm.rank()) continue;
    const GridBox they_need = intersect(halo_box_of(grid, other, width), mine);
    if (!they_need.empty()) {
      std::vector<double> buf;
      pack(they_need, hb, local, buf);
      comm.send_values<double>(other, kTagGhost, buf);
    }
  }
  for (int other = 0; other < comm.size(); ++other) {
    if (other == comm.rank()) continue;
    const GridBox i_need = intersect(hb, grid.header().box(other));
    if (!i_need.empty()) {
      std::vector<double> buf = comm.recv_values<double>(other, kTagGhost);
      unpack(i_need, hb, buf, local);
    }
  }
}

void ghost_exchange(const StructuredGrid& grid, std::vector<double>& local) {
  ghost_exchange(grid, local, grid.stencil_width());
}

std::vector<double> local_with_halo(const StructuredGrid& grid, const DistVector& x, int width) {
  if (!(x.layout() == grid.layout()))
    throw Error("local_with_halo: vector does not conform to the grid layout");
  const GridBox hb = halo_box(grid, width);
  const GridBox mine = grid.local_box();
  const int dof = grid.dof();
  std::vector<double> out(static_cast<std::size_t>(hb.n_vertices() * dof), 0.0);
  idx_t at = 0;
  for (idx_t k = mine.lo[2]; k < mine.hi[2]; ++k)
    for (idx_t j = mine.lo[1]; j < mine.hi[1]; ++j)
      for (idx_t i = mine.lo[0]; i < mine.hi[0]; ++i) {
        const idx_t v = (i - hb.lo[0]) +
                        hb.extent(0) * ((j - hb.lo[1]) + hb.extent(1) * (k - hb.lo[2]));
        for (int c = 0; c < dof; ++c) out[static_cast<std::size_t>(v * dof + c)] = x[at++];
      }
  return out;
}

} // namespace tmg
