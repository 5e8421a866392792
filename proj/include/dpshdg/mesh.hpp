#pragma once

#include "dpshdg/types.hpp"

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace dpshdg {

enum class Subdomain : std::uint8_t { Stokes, Dual };

enum class FacetClass : std::uint8_t { InteriorS, InteriorD, BoundaryS, BoundaryD, Interface };

std::string_view to_string(Subdomain s);
std::string_view to_string(FacetClass c);

/// Triangle with counter-clockwise vertices. Local edge e is the edge
/// opposite vertex e, traversed from vertex (e+1)%3 to vertex (e+2)%3.
struct Cell {
  std::array<Index, 3> vertices{};
  Subdomain subdomain = Subdomain::Stokes;
};

struct FacetSide {
  Index cell = -1;
  int local_edge = -1;
};

/// Mesh edge.
///
/// `sides[0]` is the lower-indexed cell on interior facets, the Stokes cell on
/// interface facets and the only cell on boundary facets. `normal` is always
/// the outward normal of `sides[0]`, so it points from the lower to the higher
/// cell, from the Stokes into the dual-porosity region, or out of the domain.
/// The vertices follow the counter-clockwise orientation of `sides[0]`.
struct Facet {
  std::array<Index, 2> vertices{};
  std::array<FacetSide, 2> sides{};
  FacetClass kind = FacetClass::InteriorS;
  Vec2 normal = Vec2::Zero();

  [[nodiscard]] bool on_boundary() const { return sides[1].cell < 0; }
};

enum class Geometry { UnitSquareSplit, VerticalWellbore, HorizontalWellbore };

std::string_view to_string(Geometry g);

class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Point> points, std::vector<Cell> cells);

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<Facet>& facets() const { return facets_; }

  [[nodiscard]] Index num_points() const { return static_cast<Index>(points_.size()); }
  [[nodiscard]] Index num_cells() const { return static_cast<Index>(cells_.size()); }
  [[nodiscard]] Index num_facets() const { return static_cast<Index>(facets_.size()); }

  [[nodiscard]] const Cell& cell(Index c) const { return cells_[c]; }
  [[nodiscard]] const Facet& facet(Index f) const { return facets_[f]; }

  /// Facet index of local edge `e` of cell `c`.
  [[nodiscard]] Index cell_facet(Index c, int e) const { return cell_facets_[c][e]; }

  /// Longest edge of the cell.
  [[nodiscard]] double h(Index c) const { return diameters_[c]; }
  [[nodiscard]] double h_max() const { return h_max_; }
  [[nodiscard]] double area(Index c) const;
  [[nodiscard]] Point centroid(Index c) const;
  [[nodiscard]] std::array<Point, 3> cell_points(Index c) const;

  [[nodiscard]] Index count_cells(Subdomain s) const;
  [[nodiscard]] Index count_facets(FacetClass c) const;

 private:
  void build_facets();

  std::vector<Point> points_;
  std::vector<Cell> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<Index, 3>> cell_facets_;
  std::vector<double> diameters_;
  double h_max_ = 0.0;
};

/// Structured triangulation of one of the supported two-subdomain geometries.
/// `n` is the number of grid intervals per unit length; every geometry
/// breakpoint must fall on a grid line.
Mesh build_structured(Geometry geometry, int n);

/// Red refinement: every triangle is split into four congruent children that
/// inherit the parent subdomain.
Mesh refine_uniform(const Mesh& mesh);

struct FacetGeometry {
  double length = 0.0;
  Vec2 normal = Vec2::Zero();
  Point midpoint = Point::Zero();
};

FacetGeometry facet_geometry(const Mesh& mesh, Index facet);

/// Total area of the geometry's domain.
double domain_area(Geometry geometry);

/// Plain-text listing: `v x y`, `c i j k tag`, `f i j class`.
void write_mesh_dump(const Mesh& mesh, std::ostream& out);

}  // namespace dpshdg
