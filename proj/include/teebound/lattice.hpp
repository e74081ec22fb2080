// Copyright 2026 The teebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace teebound {

class Circuit;

enum class Topology { torus, open_plane };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Vertex or plaquette coordinate (row, col).
struct Site {
  int r = 0;
  int c = 0;
  bool operator==(const Site&) const = default;
};

/// Square lattice with one qubit per edge.
///
/// Horizontal edge h(r,c) joins vertices (r,c) and (r,c+1) and has index
/// r*cols + c; vertical edge v(r,c) joins (r,c) and (r+1,c) and has index
/// rows*cols + r*cols + c. Plaquette (r,c) has corners (r,c) and (r+1,c+1).
/// On the open plane the same indexing is kept; edges that would wrap are
/// dangling boundary qubits and adjacency never wraps.
class Lattice {
 public:
  Lattice(int rows, int cols, Topology topology = Topology::torus);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Topology topology() const { return topology_; }
  int num_qubits() const { return 2 * rows_ * cols_; }

  int h(int r, int c) const;
  int v(int r, int c) const;
  bool is_horizontal(int q) const { return q < rows_ * cols_; }

  /// Position in doubled coordinates: h(r,c) -> (2r, 2c+1), v(r,c) -> (2r+1, 2c).
  std::array<int, 2> doubled_position(int q) const;

  /// Qubits sharing a vertex or a plaquette with q.
  const std::vector<int>& neighbors(int q) const { return adj_[static_cast<std::size_t>(q)]; }
  bool adjacent(int a, int b) const;

  /// The two vertices joined by edge q.
  std::array<Site, 2> endpoints(int q) const;
  std::vector<int> star(Site vertex) const;
  std::vector<int> plaquette(Site plaq) const;
  /// The edge joining two neighbouring vertices, or -1.
  int edge_between_vertices(Site a, Site b) const;
  /// The edge shared by two neighbouring plaquettes, or -1.
  int edge_between_plaquettes(Site a, Site b) const;
  std::vector<Site> vertex_neighbors(Site s) const;
  std::vector<Site> plaquette_neighbors(Site s) const;
  Site wrap(Site s) const;

  bool operator==(const Lattice& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && topology_ == o.topology_;
  }

 private:
  int rows_;
  int cols_;
  Topology topology_;
  std::vector<std::vector<int>> adj_;
};

/// Sorted, duplicate-free set of qubit indices with a label.
class Region {
 public:
  Region() = default;
  Region(std::string label, std::vector<int> qubits);

  const std::string& label() const { return label_; }
  const std::vector<int>& qubits() const { return qubits_; }
  std::size_t size() const { return qubits_.size(); }
  bool empty() const { return qubits_.empty(); }
  bool contains(int q) const;
  bool intersects(const Region& o) const;
  bool subset_of(const Region& o) const;

  Region with_label(std::string label) const { return Region(std::move(label), qubits_); }
  bool operator==(const Region& o) const { return qubits_ == o.qubits_; }

 private:
  std::string label_;
  std::vector<int> qubits_;
};

Region region_union(const std::vector<Region>& parts, std::string label = {});
Region region_difference(const Region& a, const Region& b, std::string label = {});
Region region_intersection(const Region& a, const Region& b, std::string label = {});
Region complement(const Lattice& lat, const Region& r, std::string label = {});

/// Throws GeometryError when the region has qubits outside the lattice.
void check_region(const Lattice& lat, const Region& r);

/// Hop distance between two qubit sets on the adjacency graph; -1 when either
/// set is empty or no path exists.
int distance(const Lattice& lat, const Region& a, const Region& b);
/// Hop distance from `source` to every qubit (-1 where unreachable).
std::vector<int> distance_field(const Lattice& lat, const Region& source);
/// All qubits within `radius` hops of the region.
Region neighborhood(const Lattice& lat, const Region& r, int radius, std::string label = {});

/// Start angles (degrees, counter-clockwise from +x) of the B1, A, B2 and C
/// sectors. Each sector runs up to the next start.
struct ArcSpec {
  std::array<double, 4> starts{45.0, 135.0, 225.0, 315.0};
  static ArcSpec rotated(double degrees);
};

struct AnnulusPartition {
  Region A, B1, B2, C;
  int inner_radius = 0;
  int outer_radius = 0;
  Site center;
  /// Start of the B1 arc minus its default, in degrees.
  double rotation = 0;

  Region B() const;
  Region ABC() const;
  int width() const { return outer_radius - inner_radius; }
};

/// Square annulus of Chebyshev radii (r_in, r_out] around a plaquette centre.
AnnulusPartition build_annulus_partition(const Lattice& lat, Site center, int r_in, int r_out,
                                         const ArcSpec& arcs = {});

/// Qubits at Chebyshev distance <= radius from the plaquette centre.
Region square_disk(const Lattice& lat, Site center, double radius, std::string label = "disk");

/// Chebyshev distance and angle (degrees in [0,360)) of a qubit from a plaquette centre.
struct PolarPosition {
  double radius;
  double angle;
};
PolarPosition polar_position(const Lattice& lat, Site center, int q);

struct ChainPartition {
  std::vector<Region> subsystems;
  /// True when X1 and Xn are adjacent, which only happens through the wrap of the ring.
  bool wrap_adjacent = false;
};

/// X1 = A, Xn = C; each B arc is cut into n-2 angular pieces and the k-th
/// pieces of both arcs form X(k+1).
ChainPartition chain_partition(const Lattice& lat, const AnnulusPartition& annulus, int n);

/// Consecutive regions adjacent, all others at distance >= 2.
bool is_chain_like(const Lattice& lat, const std::vector<Region>& regions);

/// Qubits whose gates can influence `region` at the output (backward propagation).
Region light_cone(const Circuit& circuit, const Region& region);
/// Qubits reachable from `region` at the input (forward propagation).
Region future_light_cone(const Circuit& circuit, const Region& region);

}  // namespace teebound
