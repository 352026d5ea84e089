#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gaugetrace/types.hpp"

namespace gaugetrace {

/// Axis-aligned box; infinite bounds mean "unbounded along that axis".
struct Box {
  Point lo;
  Point hi;

  static Box unbounded(int dim);
  static Box cube(int dim, double half_width);

  int dim() const { return static_cast<int>(lo.size()); }
  bool bounded() const;
  bool contains(const Point& x, double slack = 0.0) const;
  /// Euclidean diameter; +inf for unbounded boxes.
  double diameter() const;
  Point center() const;
};

/// Discretisation of the truncated half-space [-L, L]^n x [0, H].
struct QuadratureSpec {
  double lateral_half_width = 4.0;  // L
  int lateral_cells = 32;           // N_lat, per axis
  double height = 2.0;              // H
  int vertical_cells = 16;          // N_vert
  double grading = 2.0;             // g: z_j = H (j / N_vert)^g
  int exclusion_radius = 1;         // r_excl, in lateral cells

  /// Throws InvalidArgument unless N_lat, N_vert >= 8, r_excl >= 1, g >= 1.
  void validate() const;
  double lateral_cell() const { return 2.0 * lateral_half_width / lateral_cells; }
};

/// Tensor-product grid with arbitrary sorted nodes per axis.
class RectilinearGrid {
 public:
  RectilinearGrid() = default;
  explicit RectilinearGrid(std::vector<std::vector<double>> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<double>& axis(int k) const { return axes_[k]; }
  int nodes_along(int k) const { return static_cast<int>(axes_[k].size()); }
  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const;

  std::size_t flat_index(const std::array<int, kMaxDim>& idx) const;
  std::array<int, kMaxDim> multi_index(std::size_t flat) const;
  Point node(std::size_t flat) const;
  Box box() const;

  /// Flat node indices and weights of the multilinear stencil containing x.
  /// Returns false when x lies outside the grid.
  struct Stencil {
    std::array<std::size_t, 16> nodes{};
    std::array<double, 16> weights{};
    // Weights of the gradient along each axis.
    std::array<std::array<double, 16>, kMaxDim> gradient_weights{};
    int count = 0;
  };
  bool stencil(const Point& x, Stencil& out) const;

 private:
  std::vector<std::vector<double>> axes_;
  std::array<std::size_t, kMaxDim> strides_{};
  std::size_t node_count_ = 0;
};

/// Lateral nodes: N_lat + 1 uniform per axis; vertical: graded N_vert + 1.
RectilinearGrid make_half_space_grid(int n, const QuadratureSpec& q);
/// Boundary nodes: N_lat + 1 uniform nodes per axis on [-L, L]^n.
RectilinearGrid make_boundary_grid(int n, const QuadratureSpec& q);
/// Graded vertical nodes z_j = H (j / N)^g, j = 0..N.
std::vector<double> graded_nodes(double height, int cells, double grading);

}  // namespace gaugetrace
