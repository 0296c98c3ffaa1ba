#pragma once

#include <span>
#include <vector>

namespace phylomst {

using NodeId = int;

struct GeoEdge {
  NodeId u;
  NodeId v;
  double weight;
};

// Undirected weighted graph over nodes 0..L-1. Self-loops are allowed; parallel
// edges (in either orientation) are merged by summing their weights.
class GeoGraph {
 public:
  struct Arc {
    NodeId to;
    double weight;
  };

  GeoGraph(int node_count, std::vector<GeoEdge> edges);
  // Node count inferred as max id + 1.
  explicit GeoGraph(std::vector<GeoEdge> edges);

  auto node_count() const -> int { return node_count_; }
  auto edges() const -> const std::vector<GeoEdge>& { return edges_; }
  auto arcs(NodeId v) const -> std::span<const Arc> {
    return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
  }
  // Weighted degree: sum of W(v, u) over u, where a self-loop of weight w contributes w.
  auto degree(NodeId v) const -> double { return degree_[v]; }
  auto volume() const -> double { return volume_; }
  auto is_connected() const -> bool;

 private:
  int node_count_ = 0;
  std::vector<GeoEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
  std::vector<double> degree_;
  double volume_ = 0.0;
};

struct SpectralInfo {
  std::vector<double> pi;
  double lambda = 0.0;  // largest |eigenvalue| of D^{-1/2} W D^{-1/2} other than the top one
  double ratio = 1.0;   // sqrt(max pi / min pi)
};

struct GeoBounds {
  double lower;  // A: every supremum is at least this
  double upper;  // B: every supremum is at most this, B < 1
};

// pi(v) = deg(v) / volume. Throws ErrorKind::structural for disconnected graphs.
auto rw_stationary(const GeoGraph& graph) -> std::vector<double>;

// Spectral summary of the walk. Throws ErrorKind::mixing when lambda >= 1 - 1e-12.
auto mixing_lambda(const GeoGraph& graph) -> SpectralInfo;

// Smallest integer t' >= 1 with ratio * lambda^t' <= eps1 * pi(b).
auto cutoff_time(const SpectralInfo& spectral, double eps1, NodeId b) -> int;

// A mixing random walk with its spectral summary computed once.
class RandomWalk {
 public:
  explicit RandomWalk(GeoGraph graph);

  auto graph() const -> const GeoGraph& { return graph_; }
  auto spectral() const -> const SpectralInfo& { return spectral_; }
  auto node_count() const -> int { return graph_.node_count(); }
  auto stationary(NodeId v) const -> double { return spectral_.pi[v]; }
  auto min_stationary() const -> double;

  // One-step transition probability P(x, y) = W(x, y) / deg(x).
  auto step_prob(NodeId x, NodeId y) const -> double;
  // next = current * P.
  void step(std::span<const double> current, std::span<double> next) const;
  // max over 1 <= t <= t_max of P^t(x, y), by repeated vector products from e_x.
  auto scan_max(NodeId x, NodeId y, int t_max) const -> double;
  // P^t(x, y) for t = 1..t_max (index t - 1).
  auto scan(NodeId x, NodeId y, int t_max) const -> std::vector<double>;

  void check_node(NodeId v) const;

 private:
  GeoGraph graph_;
  SpectralInfo spectral_;
};

// Pair-symmetric cutoff max(t'(x), t'(y)); scanning both orientations over the
// same horizon keeps pi(x) E(x, y) = pi(y) E(y, x).
auto pair_cutoff(const RandomWalk& walk, NodeId x, NodeId y, double eps1) -> int;

// E1: max(max_{1<=t<=t'} P^t(x,y), pi(y)); |E1 - zeta| <= eps1 and E1 <= zeta.
auto sup_rw_additive(const RandomWalk& walk, NodeId x, NodeId y, double eps1) -> double;
// E2 = (1 +/- eps2) zeta, via eps1 = A eps2 with A = min pi.
auto sup_rw_multiplicative(const RandomWalk& walk, NodeId x, NodeId y, double eps2) -> double;
// E3 = -log E2 with eps2 = eps3 (-log B) / 2; E3 = (1 +/- eps3)(-log zeta) when zeta <= B.
auto neg_log_sup_rw(const RandomWalk& walk, NodeId x, NodeId y, double eps3, const GeoBounds& bounds) -> double;
// -log zeta with the tail beyond the scan certified to relative precision `rel_tol`.
auto neg_log_sup_rw_scan(const RandomWalk& walk, NodeId x, NodeId y, double rel_tol = 1e-13) -> double;

// A = min pi; B = max over ordered pairs of E1(eps1 = A/10) + A/10, capped at 1 - 1e-6.
auto derive_bounds(const RandomWalk& walk) -> GeoBounds;

}  // namespace phylomst
