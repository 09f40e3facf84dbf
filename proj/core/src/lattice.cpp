#include "cidlab/lattice.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cidlab {

ChainGeom::ChainGeom(int L, Boundary b) : length(L), boundary(b) {
  if (L < 2) throw std::invalid_argument("ChainGeom: length must be >= 2");
}

DualSquareGeom::DualSquareGeom(int L) : side_(L) {
  if (L < 1) throw std::invalid_argument("DualSquareGeom: side must be >= 1");
}

std::pair<int, int> DualSquareGeom::edge_endpoints(int e) const {
  if (e < 0 || e >= num_edges()) throw std::out_of_range("edge index");
  if (is_h_edge(e)) {
    int r = e / side_, c = e % side_;
    return {spin_index(r, c), spin_index(r, c + 1)};
  }
  int k = e - num_h_edges();
  int r = k / (side_ + 1), c = k % (side_ + 1);
  return {spin_index(r, c), spin_index(r + 1, c)};
}

std::array<int, 4> DualSquareGeom::plaquette_edges(int p) const {
  if (p < 0 || p >= num_vortices()) throw std::out_of_range("plaquette index");
  int r = vortex_row(p), c = vortex_col(p);
  return {h_edge(r, c), h_edge(r + 1, c), v_edge(r, c), v_edge(r, c + 1)};
}

std::vector<std::pair<int, int>> DualSquareGeom::vortex_bonds() const {
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(2 * side_ * (side_ - 1));
  for (int r = 0; r < side_; ++r)
    for (int c = 0; c < side_; ++c) {
      if (c + 1 < side_) bonds.emplace_back(vortex_index(r, c), vortex_index(r, c + 1));
      if (r + 1 < side_) bonds.emplace_back(vortex_index(r, c), vortex_index(r + 1, c));
    }
  return bonds;
}

int DualSquareGeom::shared_edge(int p, int q) const {
  int pr = vortex_row(p), pc = vortex_col(p);
  int qr = vortex_row(q), qc = vortex_col(q);
  if (pr == qr && std::abs(pc - qc) == 1) return v_edge(pr, std::max(pc, qc));
  if (pc == qc && std::abs(pr - qr) == 1) return h_edge(std::max(pr, qr), pc);
  throw std::invalid_argument("shared_edge: plaquettes are not adjacent");
}

Snapshot::Snapshot(int r, int c, std::int8_t fill)
    : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {
  if (r < 1 || c < 1) throw std::invalid_argument("Snapshot: empty geometry");
}

BondField::BondField(const DualSquareGeom& g, std::int8_t fill)
    : side(g.vortex_side()), values(static_cast<std::size_t>(g.num_edges()), fill) {}

namespace {

void check_grid(const DualSquareGeom& geom, const BondField& bonds) {
  if (bonds.side != geom.vortex_side() ||
      bonds.values.size() != static_cast<std::size_t>(geom.num_edges()))
    throw std::invalid_argument("bond field does not match geometry");
}

void check_grid(const DualSquareGeom& geom, const Snapshot& x) {
  if (x.rows != geom.vortex_side() || x.cols != geom.vortex_side())
    throw std::invalid_argument("snapshot does not match geometry");
}

}  // namespace

Snapshot vortex_of_bonds(const DualSquareGeom& geom, const BondField& bonds) {
  check_grid(geom, bonds);
  int L = geom.vortex_side();
  Snapshot x(L, L);
  for (int p = 0; p < geom.num_vortices(); ++p) {
    int prod = 1;
    for (int e : geom.plaquette_edges(p)) prod *= bonds.values[e];
    x.values[p] = static_cast<std::int8_t>(prod);
  }
  return x;
}

BondField reference_bonds(const DualSquareGeom& geom, const Snapshot& x) {
  check_grid(geom, x);
  BondField bonds(geom);
  for (int p = 0; p < geom.num_vortices(); ++p)
    if (x.values[p] == -1) flip_edges(bonds, vortex_insertion_path(geom, p));
  return bonds;
}

BondField gauge_transform(const DualSquareGeom& geom, const BondField& bonds,
                          const std::vector<std::int8_t>& sigma) {
  check_grid(geom, bonds);
  if (sigma.size() != static_cast<std::size_t>(geom.num_spins()))
    throw std::invalid_argument("sigma does not match dual spin count");
  BondField out = bonds;
  for (int e = 0; e < geom.num_edges(); ++e) {
    auto [i, j] = geom.edge_endpoints(e);
    out.values[e] = static_cast<std::int8_t>(out.values[e] * sigma[i] * sigma[j]);
  }
  return out;
}

std::vector<int> vortex_insertion_path(const DualSquareGeom& geom, int p) {
  if (p < 0 || p >= geom.num_vortices()) throw std::invalid_argument("invalid vortex site");
  int r = geom.vortex_row(p), c = geom.vortex_col(p);
  std::vector<int> path;
  path.reserve(geom.vortex_side() - r);
  for (int rr = r + 1; rr <= geom.vortex_side(); ++rr) path.push_back(geom.h_edge(rr, c));
  return path;
}

void flip_edges(BondField& bonds, const std::vector<int>& edges) {
  for (int e : edges) bonds.values[e] = static_cast<std::int8_t>(-bonds.values[e]);
}

void write_snapshot(std::ostream& os, const Snapshot& s) {
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) os.put(s.at(r, c) > 0 ? '1' : '0');
    os.put('\n');
  }
}

void write_snapshots(std::ostream& os, const std::vector<Snapshot>& snaps) {
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (i > 0) os.put('\n');
    write_snapshot(os, snaps[i]);
  }
}

std::vector<Snapshot> read_snapshots(std::istream& is) {
  std::vector<Snapshot> out;
  std::vector<std::string> block;
  std::string line;
  auto emit = [&] {
    if (block.empty()) return;
    int rows = static_cast<int>(block.size());
    int cols = static_cast<int>(block[0].size());
    Snapshot s(rows, cols);
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(block[r].size()) != cols)
        throw std::runtime_error("snapshot file: ragged rows");
      for (int c = 0; c < cols; ++c) {
        char ch = block[r][c];
        if (ch != '0' && ch != '1') throw std::runtime_error("snapshot file: bad character");
        s.at(r, c) = ch == '1' ? 1 : -1;
      }
    }
    out.push_back(std::move(s));
    block.clear();
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') continue;  // embedded header comments
    if (line.empty())
      emit();
    else
      block.push_back(line);
  }
  emit();
  return out;
}

std::vector<Snapshot> read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
  return read_snapshots(in);
}

}  // namespace cidlab
