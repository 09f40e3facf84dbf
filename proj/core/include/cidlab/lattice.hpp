#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cidlab {

enum class Boundary { Open, Periodic };

/// 1D chain of L >= 2 sites.
struct ChainGeom {
  int length = 2;
  Boundary boundary = Boundary::Open;

  ChainGeom() = default;
  ChainGeom(int L, Boundary b = Boundary::Open);
};

/// Square lattice of L x L vortex sites (plaquettes) with its dual spin grid
/// of (L+1) x (L+1) sites, open boundaries.
///
/// Indexing is row-major from the top-left.  Edges of the dual lattice are
/// numbered with the horizontal block first: h(r,c) joins spins (r,c)-(r,c+1)
/// for r in [0,L], c in [0,L-1]; v(r,c) joins (r,c)-(r+1,c) for r in [0,L-1],
/// c in [0,L].  Every plaquette has exactly four incident dual edges.
class DualSquareGeom {
 public:
  explicit DualSquareGeom(int L);

  int vortex_side() const { return side_; }
  int spin_side() const { return side_ + 1; }
  int num_vortices() const { return side_ * side_; }
  int num_spins() const { return (side_ + 1) * (side_ + 1); }
  int num_h_edges() const { return (side_ + 1) * side_; }
  int num_edges() const { return 2 * side_ * (side_ + 1); }

  int spin_index(int r, int c) const { return r * (side_ + 1) + c; }
  int vortex_index(int r, int c) const { return r * side_ + c; }
  int vortex_row(int p) const { return p / side_; }
  int vortex_col(int p) const { return p % side_; }

  int h_edge(int r, int c) const { return r * side_ + c; }
  int v_edge(int r, int c) const { return num_h_edges() + r * (side_ + 1) + c; }
  bool is_h_edge(int e) const { return e < num_h_edges(); }

  /// Spin indices of the two endpoints of edge e.
  std::pair<int, int> edge_endpoints(int e) const;

  /// The four edges around plaquette p: top, bottom, left, right.
  std::array<int, 4> plaquette_edges(int p) const;

  /// Nearest-neighbour pairs of vortex sites (bond list used by samplers).
  std::vector<std::pair<int, int>> vortex_bonds() const;

  /// The single dual edge shared by two adjacent plaquettes.
  int shared_edge(int p, int q) const;

 private:
  int side_;
};

/// A +/-1-valued measurement outcome on a chain (rows == 1) or a square grid.
struct Snapshot {
  int rows = 0;
  int cols = 0;
  std::vector<std::int8_t> values;  // row-major, entries in {+1,-1}

  Snapshot() = default;
  Snapshot(int r, int c, std::int8_t fill = 1);

  int size() const { return rows * cols; }
  std::int8_t& at(int r, int c) { return values[r * cols + c]; }
  std::int8_t at(int r, int c) const { return values[r * cols + c]; }
  void flip(int site) { values[site] = static_cast<std::int8_t>(-values[site]); }
  bool operator==(const Snapshot&) const = default;
};

/// +/-1 couplings on the dual edges of a DualSquareGeom.
struct BondField {
  int side = 0;  // vortex grid side L
  std::vector<std::int8_t> values;

  BondField() = default;
  explicit BondField(const DualSquareGeom& g, std::int8_t fill = 1);
  bool operator==(const BondField&) const = default;
};

/// x_j = product of the four bond values around plaquette j.
Snapshot vortex_of_bonds(const DualSquareGeom& geom, const BondField& bonds);

/// Canonical bond field with vortex_of_bonds(result) == x: for each vortex,
/// flip the straight column of edges from that plaquette down to the boundary.
BondField reference_bonds(const DualSquareGeom& geom, const Snapshot& x);

/// J -> J * sigma_i * sigma_j for each edge; leaves all plaquette products
/// unchanged.  sigma holds one +/-1 per dual spin.
BondField gauge_transform(const DualSquareGeom& geom, const BondField& bonds,
                          const std::vector<std::int8_t>& sigma);

/// Straight column of dual edges from plaquette p down to the bottom
/// boundary.  Flipping them in any bond field toggles exactly vortex p.
std::vector<int> vortex_insertion_path(const DualSquareGeom& geom, int p);

/// Flip the listed edges in place.
void flip_edges(BondField& bonds, const std::vector<int>& edges);

// --- Snapshot text format ---------------------------------------------------
// One row per line, '1' for +1 and '0' for -1, one blank line between
// snapshots in a multi-snapshot file.

void write_snapshot(std::ostream& os, const Snapshot& s);
void write_snapshots(std::ostream& os, const std::vector<Snapshot>& snaps);
std::vector<Snapshot> read_snapshots(std::istream& is);
std::vector<Snapshot> read_snapshot_file(const std::string& path);

}  // namespace cidlab
