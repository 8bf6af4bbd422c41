// SPDX-License-Identifier: Apache-2.0
//
// Structured-grid distribution manager: vertex-centered global grids in one
// to three dimensions with dof unknowns per vertex, decomposed over a
// processor grid. Global unknown ordering is rank-block-wise (all of rank
// 0's unknowns, then rank 1's, ...); within a rank vertices run in
// lexicographic i-fastest order with dof contiguous per vertex.

#ifndef TMG_GRID_HPP
#define TMG_GRID_HPP

#include <array>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/comm.hpp"
#include "tmg/dist_matrix.hpp"
#include "tmg/layout.hpp"

namespace tmg {

/// Per-rank vertex box, [lo, hi) per axis.
struct GridBox {
  std::array<idx_t, 3> lo{0, 0, 0};
  std::array<idx_t, 3> hi{0, 0, 0};

  idx_t extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
  idx_t n_vertices() const { return extent(0) * extent(1) * extent(2); }
  bool contains(idx_t i, idx_t j, idx_t k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
  }
  bool empty() const { return extent(0) <= 0 || extent(1) <= 0 || extent(2) <= 0; }
};

/// Rank-independent description of a grid: everything except the owning
/// communicator. Deterministically computable by every rank, which is what
/// makes repartitioning and permutation assembly collective-free on the
/// metadata side.
struct GridHeader {
  int dim = 3;
  std::array<idx_t, 3> npoints{1, 1, 1}; // trailing axes hold one vertex
  int dof = 1;
  int stencil_width = 1;
  std::array<int, 3> proc_grid{1, 1, 1};
  std::array<std::vector<idx_t>, 3> axis_offsets; // per-axis ownership boundaries

  int n_ranks() const { return proc_grid[0] * proc_grid[1] * proc_grid[2]; }
  idx_t n_vertices() const { return npoints[0] * npoints[1] * npoints[2]; }
  idx_t n_unknowns() const { return n_vertices() * dof; }

  std::array<int, 3> proc_coords(int rank) const;
  int proc_rank(int pi, int pj, int pk) const;
  GridBox box(int rank) const;
  /// Unknown layout over the grid ranks (rank-block ordering).
  Layout layout() const;

  /// Natural index of (vertex, component): dof-interleaved, i-fastest over
  /// the whole grid.
  idx_t natural_index(idx_t i, idx_t j, idx_t k, int c) const;
  /// Inverse of natural_index.
  void natural_decompose(idx_t natural, idx_t& i, idx_t& j, idx_t& k, int& c) const;
  /// Global unknown index (rank-block ordering) of (vertex, component).
  idx_t global_index(idx_t i, idx_t j, idx_t k, int c) const;
  /// Inverse of global_index.
  void global_decompose(idx_t global, idx_t& i, idx_t& j, idx_t& k, int& c) const;

  /// natural -> global and global -> natural (the NaturalOrdering bijection).
  idx_t natural_to_global(idx_t natural) const;
  idx_t global_to_natural(idx_t global) const;

  bool same_global_grid(const GridHeader& other) const {
    return dim == other.dim && npoints == other.npoints && dof == other.dof;
  }

  friend void to_json(nlohmann::json& j, const GridHeader& h);
  friend void from_json(const nlohmann::json& j, GridHeader& h);
};

/// A grid bound to a communicator; each rank holds the shared header plus
/// its own coordinates.
class StructuredGrid {
public:
  StructuredGrid() = default;
  StructuredGrid(Comm comm, GridHeader header);

  const Comm& comm() const { return comm_; }
  const GridHeader& header() const { return header_; }
  int dim() const { return header_.dim; }
  const std::array<idx_t, 3>& npoints() const { return header_.npoints; }
  int dof() const { return header_.dof; }
  int stencil_width() const { return header_.stencil_width; }
  const std::array<int, 3>& proc_grid() const { return header_.proc_grid; }

  GridBox local_box() const { return header_.box(comm_.rank()); }
  Layout layout() const { return header_.layout(); }

  /// Physical coordinates of an owned vertex (unit cube unless custom
  /// coordinates are attached).
  std::array<double, 3> vertex_coords(idx_t i, idx_t j, idx_t k) const;
  /// Uniform unit-cube spacing per axis (degenerate axes report 0).
  std::array<double, 3> spacing() const;

  bool has_custom_coords() const { return custom_coords_.has_value(); }
  /// Attach per-owned-vertex coordinates, dim values per vertex, i-fastest.
  void set_custom_coords(std::vector<double> coords);
  const std::vector<double>& custom_coords() const { return *custom_coords_; }

private:
  friend struct RepartitionResult;
  friend RepartitionResult repartition_onto(const StructuredGrid&, const SplitResult&,
                                            const std::array<std::optional<int>, 3>&);
  Comm comm_;
  GridHeader header_;
  std::optional<std::vector<double>> custom_coords_;
};

/// Creates a grid over the communicator. If no processor-grid hint is given
/// the factorization of comm.size() with the smallest surface-to-volume
/// proxy (sum of ranks-per-vertex across axes) wins; ties prefer more ranks
/// on the slowest-varying axis. Ownership is a near-equal per-axis split.
StructuredGrid create_grid(const Comm& comm, int dim, std::array<idx_t, 3> npoints, int dof,
                           int stencil_width = 1,
                           std::optional<std::array<int, 3>> proc_grid_hint = std::nullopt);

/// Factor-2 vertex-centered coarsening: every non-degenerate axis must hold
/// 2M+1 vertices (M >= 1) and every rank must keep at least one vertex per
/// axis; otherwise throws "cannot coarsen". Coarse ownership is aligned with
/// fine ownership (a coarse vertex lives where its fine image lives).
StructuredGrid coarsen(const StructuredGrid& grid);
/// True when coarsen(grid) would succeed.
bool can_coarsen(const StructuredGrid& grid);

/// d-linear interpolation from the coarse grid to its refinement: rows are
/// partitioned by the fine layout, weights are 1 on coincident vertices and
/// 1/2, 1/4, 1/8 on edge/face/cell midpoints; every row sums to 1.
/// Restriction is the transpose.
DistMatrix create_interpolation(const StructuredGrid& coarse, const StructuredGrid& fine);

/// Result of repartitioning: member ranks hold the live grid; everyone
/// learns the new header.
struct RepartitionResult {
  std::optional<StructuredGrid> grid; // member ranks only
  GridHeader header;                  // known to all parent ranks
};

/// Repartitions the same global grid onto the members of the split,
/// scattering coordinates if custom ones are attached. With no override and
/// an unchanged communicator size the parent decomposition is kept.
RepartitionResult repartition_onto(const StructuredGrid& grid, const SplitResult& split,
                                   const std::array<std::optional<int>, 3>& proc_override = {});

/// Explicit permutation matrix between two layouts of the same global grid,
/// defined on the old grid's communicator. For x laid out on the old grid,
/// transpose(P) * x carries the values ordered by the new layout; its row
/// partition pre-splits the new ownership across each fused rank group so
/// that row fusion onto the sub-communicator lands exactly on the new grid's
/// layout. Built by composing the two NaturalOrdering bijections.
DistMatrix build_permutation(const StructuredGrid& old_grid, const GridHeader& new_header,
                             const SplitResult& split);

/// Column layout used by build_permutation: the new grid's per-member sizes
/// split near-equally across the parent ranks of each fused group.
Layout prefusion_layout(const GridHeader& new_header, const SplitResult& split);

/// Fills the halo of width `width` around this rank's box with the owning
/// ranks' values. `local` holds dof values per vertex of the halo box
/// (owned box grown by `width`, clipped to the domain), i-fastest; owned
/// entries are left untouched.
void ghost_exchange(const StructuredGrid& grid, std::vector<double>& local, int width);
/// Spec-level overload: halo width equals the grid stencil width.
void ghost_exchange(const StructuredGrid& grid, std::vector<double>& local);

/// Halo box of this rank (owned box grown by width, clipped to the domain).
GridBox halo_box(const StructuredGrid& grid, int width);

/// Copies owned entries of a conforming DistVector into a halo-box-sized
/// local array (ghost entries zeroed).
std::vector<double> local_with_halo(const StructuredGrid& grid, const DistVector& x, int width);

} // namespace tmg

#endif
