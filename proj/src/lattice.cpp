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

#include "teebound/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>
#include <string>

#include "teebound/circuits.hpp"
#include "teebound/errors.hpp"

namespace teebound {

namespace {

int mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

std::string to_string(Topology t) { return t == Topology::torus ? "torus" : "open-plane"; }

Topology topology_from_string(const std::string& s) {
  if (s == "torus") return Topology::torus;
  if (s == "open-plane" || s == "open_plane") return Topology::open_plane;
  throw ConfigError("unknown topology '" + s + "'");
}

Lattice::Lattice(int rows, int cols, Topology topology)
    : rows_(rows), cols_(cols), topology_(topology) {
  if (rows < 1 || cols < 1) throw GeometryError("lattice dimensions must be positive");
  if (topology == Topology::torus && (rows < 3 || cols < 3)) {
    throw GeometryError("torus needs at least 3 rows and 3 columns");
  }
  adj_.resize(static_cast<std::size_t>(num_qubits()));
  auto link = [&](int a, int b) {
    if (a < 0 || b < 0 || a == b) return;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  };
  // Every vertex and every plaquette is a clique on its edges.
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      for (const auto& group : {star({r, c}), plaquette({r, c})}) {
        for (std::size_t i = 0; i < group.size(); ++i) {
          for (std::size_t j = i + 1; j < group.size(); ++j) link(group[i], group[j]);
        }
      }
    }
  }
  for (auto& n : adj_) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
}

int Lattice::h(int r, int c) const {
  if (topology_ == Topology::torus) {
    r = mod(r, rows_);
    c = mod(c, cols_);
  } else if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    return -1;
  }
  return r * cols_ + c;
}

int Lattice::v(int r, int c) const {
  if (topology_ == Topology::torus) {
    r = mod(r, rows_);
    c = mod(c, cols_);
  } else if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    return -1;
  }
  return rows_ * cols_ + r * cols_ + c;
}

std::array<int, 2> Lattice::doubled_position(int q) const {
  if (is_horizontal(q)) return {2 * (q / cols_), 2 * (q % cols_) + 1};
  const int k = q - rows_ * cols_;
  return {2 * (k / cols_) + 1, 2 * (k % cols_)};
}

bool Lattice::adjacent(int a, int b) const {
  const auto& n = neighbors(a);
  return std::binary_search(n.begin(), n.end(), b);
}

Site Lattice::wrap(Site s) const {
  if (topology_ == Topology::torus) return {mod(s.r, rows_), mod(s.c, cols_)};
  return s;
}

std::array<Site, 2> Lattice::endpoints(int q) const {
  if (is_horizontal(q)) {
    const int r = q / cols_, c = q % cols_;
    return {Site{r, c}, wrap({r, c + 1})};
  }
  const int k = q - rows_ * cols_;
  const int r = k / cols_, c = k % cols_;
  return {Site{r, c}, wrap({r + 1, c})};
}

std::vector<int> Lattice::star(Site s) const {
  std::vector<int> out;
  for (int q : {h(s.r, s.c), h(s.r, s.c - 1), v(s.r, s.c), v(s.r - 1, s.c)}) {
    if (q >= 0) out.push_back(q);
  }
  return out;
}

std::vector<int> Lattice::plaquette(Site s) const {
  std::vector<int> out;
  for (int q : {h(s.r, s.c), h(s.r + 1, s.c), v(s.r, s.c), v(s.r, s.c + 1)}) {
    if (q >= 0) out.push_back(q);
  }
  return out;
}

std::vector<Site> Lattice::vertex_neighbors(Site s) const {
  std::vector<Site> out;
  for (Site d : {Site{0, 1}, Site{0, -1}, Site{1, 0}, Site{-1, 0}}) {
    Site t{s.r + d.r, s.c + d.c};
    if (topology_ == Topology::open_plane && (t.r < 0 || t.r >= rows_ || t.c < 0 || t.c >= cols_)) {
      continue;
    }
    out.push_back(wrap(t));
  }
  return out;
}

std::vector<Site> Lattice::plaquette_neighbors(Site s) const { return vertex_neighbors(s); }

int Lattice::edge_between_vertices(Site a, Site b) const {
  a = wrap(a);
  b = wrap(b);
  for (int q : star(a)) {
    const auto e = endpoints(q);
    if ((e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) return q;
  }
  return -1;
}

int Lattice::edge_between_plaquettes(Site a, Site b) const {
  a = wrap(a);
  b = wrap(b);
  if (a == b) return -1;
  auto pa = plaquette(a), pb = plaquette(b);
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  std::vector<int> shared;
  std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(shared));
  return shared.size() == 1 ? shared[0] : -1;
}

Region::Region(std::string label, std::vector<int> qubits)
    : label_(std::move(label)), qubits_(std::move(qubits)) {
  std::sort(qubits_.begin(), qubits_.end());
  if (std::adjacent_find(qubits_.begin(), qubits_.end()) != qubits_.end()) {
    throw GeometryError("region '" + label_ + "' has duplicate qubits");
  }
}

bool Region::contains(int q) const { return std::binary_search(qubits_.begin(), qubits_.end(), q); }

bool Region::intersects(const Region& o) const {
  auto a = qubits_.begin(), b = o.qubits_.begin();
  while (a != qubits_.end() && b != o.qubits_.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

bool Region::subset_of(const Region& o) const {
  return std::includes(o.qubits_.begin(), o.qubits_.end(), qubits_.begin(), qubits_.end());
}

Region region_union(const std::vector<Region>& parts, std::string label) {
  std::set<int> s;
  for (const auto& p : parts) s.insert(p.qubits().begin(), p.qubits().end());
  return Region(std::move(label), {s.begin(), s.end()});
}

Region region_difference(const Region& a, const Region& b, std::string label) {
  std::vector<int> out;
  std::set_difference(a.qubits().begin(), a.qubits().end(), b.qubits().begin(), b.qubits().end(),
                      std::back_inserter(out));
  return Region(std::move(label), std::move(out));
}

Region region_intersection(const Region& a, const Region& b, std::string label) {
  std::vector<int> out;
  std::set_intersection(a.qubits().begin(), a.qubits().end(), b.qubits().begin(),
                        b.qubits().end(), std::back_inserter(out));
  return Region(std::move(label), std::move(out));
}

Region complement(const Lattice& lat, const Region& r, std::string label) {
  std::vector<int> out;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (!r.contains(q)) out.push_back(q);
  }
  return Region(std::move(label), std::move(out));
}

void check_region(const Lattice& lat, const Region& r) {
  if (!r.empty() && (r.qubits().front() < 0 || r.qubits().back() >= lat.num_qubits())) {
    throw GeometryError("region '" + r.label() + "' has qubits outside the lattice");
  }
}

std::vector<int> distance_field(const Lattice& lat, const Region& source) {
  std::vector<int> dist(static_cast<std::size_t>(lat.num_qubits()), -1);
  std::deque<int> queue;
  for (int q : source.qubits()) {
    dist[q] = 0;
    queue.push_back(q);
  }
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    for (int n : lat.neighbors(q)) {
      if (dist[n] < 0) {
        dist[n] = dist[q] + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

int distance(const Lattice& lat, const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return -1;
  check_region(lat, a);
  check_region(lat, b);
  const auto dist = distance_field(lat, a);
  int best = -1;
  for (int q : b.qubits()) {
    if (dist[q] >= 0 && (best < 0 || dist[q] < best)) best = dist[q];
  }
  return best;
}

Region neighborhood(const Lattice& lat, const Region& r, int radius, std::string label) {
  const auto dist = distance_field(lat, r);
  std::vector<int> out;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (dist[q] >= 0 && dist[q] <= radius) out.push_back(q);
  }
  return Region(std::move(label), std::move(out));
}

ArcSpec ArcSpec::rotated(double degrees) {
  ArcSpec a;
  for (auto& s : a.starts) s = std::fmod(std::fmod(s + degrees, 360.0) + 360.0, 360.0);
  return a;
}

Region AnnulusPartition::B() const { return region_union({B1, B2}, "B"); }

Region AnnulusPartition::ABC() const { return region_union({A, B1, B2, C}, "ABC"); }

PolarPosition polar_position(const Lattice& lat, Site center, int q) {
  const auto p = lat.doubled_position(q);
  int dy = p[0] - (2 * center.r + 1);
  int dx = p[1] - (2 * center.c + 1);
  if (lat.topology() == Topology::torus) {
    const int ry = 2 * lat.rows(), rx = 2 * lat.cols();
    dy = mod(dy + ry / 2, ry) - ry / 2;
    dx = mod(dx + rx / 2, rx) - rx / 2;
  }
  const double radius = std::max(std::abs(dy), std::abs(dx)) / 2.0;
  double angle = std::atan2(-static_cast<double>(dy), static_cast<double>(dx)) * 180.0 /
                 std::numbers::pi;
  if (angle < 0) angle += 360.0;
  return {radius, angle};
}

Region square_disk(const Lattice& lat, Site center, double radius, std::string label) {
  std::vector<int> out;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (polar_position(lat, center, q).radius <= radius) out.push_back(q);
  }
  return Region(std::move(label), std::move(out));
}

namespace {

bool in_arc(double angle, double start, double end) {
  if (start <= end) return angle >= start && angle < end;
  return angle >= start || angle < end;
}

}  // namespace

AnnulusPartition build_annulus_partition(const Lattice& lat, Site center, int r_in, int r_out,
                                         const ArcSpec& arcs) {
  if (r_in < 1) throw GeometryError("inner radius must be at least 1");
  if (r_out == r_in) throw GeometryError("zero-width annulus");
  if (r_out < r_in) throw GeometryError("outer radius below inner radius");
  if (lat.topology() == Topology::torus) {
    if (2 * (r_out + 1) > std::min(lat.rows(), lat.cols())) {
      throw GeometryError("annulus does not fit in a fundamental domain of the torus");
    }
  } else {
    const int dr = std::min(center.r + 1, lat.rows() - 1 - center.r);
    const int dc = std::min(center.c + 1, lat.cols() - 1 - center.c);
    if (r_out + 1 > std::min(dr, dc)) throw GeometryError("annulus does not fit inside the plane");
  }
  center = lat.wrap(center);
  std::array<std::vector<int>, 4> sectors;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    const auto pos = polar_position(lat, center, q);
    if (pos.radius <= r_in || pos.radius > r_out) continue;
    for (int s = 0; s < 4; ++s) {
      if (in_arc(pos.angle, arcs.starts[s], arcs.starts[(s + 1) % 4])) {
        sectors[s].push_back(q);
        break;
      }
    }
  }
  static const char* names[4] = {"B1", "A", "B2", "C"};
  for (int s = 0; s < 4; ++s) {
    if (sectors[s].empty()) throw GeometryError(std::string("empty sector ") + names[s]);
  }
  AnnulusPartition p{Region("A", sectors[1]), Region("B1", sectors[0]), Region("B2", sectors[2]),
                     Region("C", sectors[3]),  r_in,  r_out, center,
                     arcs.starts[0] - ArcSpec{}.starts[0]};
  if (distance(lat, p.A, p.C) < 2) throw GeometryError("A adjacent to C");
  return p;
}

namespace {

// Arc qubits ordered by angle, starting from the end that touches A.
std::vector<int> arc_order_from_A(const Lattice& lat, const AnnulusPartition& ann,
                                  const Region& arc) {
  const auto a_angle = [&] {
    // Mean direction of A, robust to the 0/360 seam.
    double sx = 0, sy = 0;
    for (int q : ann.A.qubits()) {
      const double t = polar_position(lat, ann.center, q).angle * std::numbers::pi / 180.0;
      sx += std::cos(t);
      sy += std::sin(t);
    }
    return std::atan2(sy, sx) * 180.0 / std::numbers::pi;
  }();
  std::vector<std::pair<double, int>> keyed;
  for (int q : arc.qubits()) {
    double d = polar_position(lat, ann.center, q).angle - a_angle;
    d = std::fmod(std::fmod(d, 360.0) + 360.0, 360.0);
    keyed.push_back({std::min(d, 360.0 - d), q});
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> out;
  for (const auto& k : keyed) out.push_back(k.second);
  return out;
}

std::vector<std::vector<int>> split_even(const std::vector<int>& v, int parts) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(parts));
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) out[i * parts / n].push_back(v[i]);
  return out;
}

}  // namespace

ChainPartition chain_partition(const Lattice& lat, const AnnulusPartition& annulus, int n) {
  if (n < 3) throw GeometryError("chain needs at least 3 subsystems");
  const int pieces = n - 2;
  if (static_cast<int>(annulus.B1.size()) < pieces || static_cast<int>(annulus.B2.size()) < pieces) {
    throw GeometryError("annulus circumference too small for " + std::to_string(n) +
                        " subsystems");
  }
  const auto b1 = split_even(arc_order_from_A(lat, annulus, annulus.B1), pieces);
  const auto b2 = split_even(arc_order_from_A(lat, annulus, annulus.B2), pieces);
  ChainPartition chain;
  chain.subsystems.push_back(annulus.A.with_label("X1"));
  for (int k = 0; k < pieces; ++k) {
    std::vector<int> q = b1[k];
    q.insert(q.end(), b2[k].begin(), b2[k].end());
    chain.subsystems.emplace_back("X" + std::to_string(k + 2), q);
  }
  chain.subsystems.push_back(annulus.C.with_label("X" + std::to_string(n)));
  chain.wrap_adjacent = distance(lat, chain.subsystems.front(), chain.subsystems.back()) == 1;
  return chain;
}

bool is_chain_like(const Lattice& lat, const std::vector<Region>& regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].empty()) throw GeometryError("region '" + regions[i].label() + "' is empty");
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (regions[i].intersects(regions[j])) {
        throw GeometryError("regions '" + regions[i].label() + "' and '" + regions[j].label() +
                            "' overlap");
      }
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      const int d = distance(lat, regions[i], regions[j]);
      if (j == i + 1 && d != 1) return false;
      if (j > i + 1 && d < 2) return false;
    }
  }
  return true;
}

Region light_cone(const Circuit& circuit, const Region& region) {
  std::set<int> s(region.qubits().begin(), region.qubits().end());
  for (auto layer = circuit.layers().rbegin(); layer != circuit.layers().rend(); ++layer) {
    for (const auto& g : *layer) {
      if (std::any_of(g.support.begin(), g.support.end(), [&](int q) { return s.count(q); })) {
        s.insert(g.support.begin(), g.support.end());
      }
    }
  }
  return Region(region.label() + "_cone", {s.begin(), s.end()});
}

Region future_light_cone(const Circuit& circuit, const Region& region) {
  std::set<int> s(region.qubits().begin(), region.qubits().end());
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer) {
      if (std::any_of(g.support.begin(), g.support.end(), [&](int q) { return s.count(q); })) {
        s.insert(g.support.begin(), g.support.end());
      }
    }
  }
  return Region(region.label() + "_future", {s.begin(), s.end()});
}

}  // namespace teebound
