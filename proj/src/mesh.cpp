#include "dpshdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace dpshdg {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32U) | hi;
}

struct GeometryInfo {
  double extent;
  int divisor;              // n must be a multiple of this
  const char* breakpoint;   // coarsest coordinate that must be resolved
};

GeometryInfo info(Geometry g) {
  switch (g) {
    case Geometry::UnitSquareSplit: return {1.0, 2, "1/2"};
    case Geometry::VerticalWellbore: return {1.5, 2, "1/2"};
    case Geometry::HorizontalWellbore: return {1.5, 4, "1/4"};
  }
  throw std::invalid_argument("unknown geometry");
}

bool in_stokes(Geometry g, const Point& c) {
  const double x = c.x();
  const double y = c.y();
  switch (g) {
    case Geometry::UnitSquareSplit: return y > 0.5;
    case Geometry::VerticalWellbore: return x > 0.5 && x < 1.0 && y > 0.5 && y < 1.5;
    case Geometry::HorizontalWellbore:
      return (x > 0.25 && x < 1.25 && y > 0.25 && y < 0.5) ||
             (x > 1.0 && x < 1.25 && y > 0.5 && y < 1.5);
  }
  return false;
}

}  // namespace

std::string_view to_string(Subdomain s) { return s == Subdomain::Stokes ? "S" : "D"; }

std::string_view to_string(FacetClass c) {
  switch (c) {
    case FacetClass::InteriorS: return "InteriorS";
    case FacetClass::InteriorD: return "InteriorD";
    case FacetClass::BoundaryS: return "BoundaryS";
    case FacetClass::BoundaryD: return "BoundaryD";
    case FacetClass::Interface: return "Interface";
  }
  return "?";
}

std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::UnitSquareSplit: return "unit-square-split";
    case Geometry::VerticalWellbore: return "vertical-wellbore";
    case Geometry::HorizontalWellbore: return "horizontal-wellbore";
  }
  return "?";
}

Mesh::Mesh(std::vector<Point> points, std::vector<Cell> cells)
    : points_(std::move(points)), cells_(std::move(cells)) {
  diameters_.resize(cells_.size());
  for (Index c = 0; c < num_cells(); ++c) {
    const auto& v = cells_[c].vertices;
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
      throw std::invalid_argument("cell " + std::to_string(c) + " has repeated vertices");
    }
    if (area(c) <= 0.0) {
      throw std::invalid_argument("cell " + std::to_string(c) + " is not counter-clockwise");
    }
    const auto p = cell_points(c);
    diameters_[c] = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
  }
  h_max_ = diameters_.empty() ? 0.0 : *std::max_element(diameters_.begin(), diameters_.end());
  build_facets();
}

void Mesh::build_facets() {
  std::unordered_map<std::uint64_t, Index> lookup;
  lookup.reserve(cells_.size() * 2);
  cell_facets_.assign(cells_.size(), {-1, -1, -1});

  for (Index c = 0; c < num_cells(); ++c) {
    const auto& v = cells_[c].vertices;
    for (int e = 0; e < 3; ++e) {
      const Index a = v[(e + 1) % 3];
      const Index b = v[(e + 2) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), static_cast<Index>(facets_.size()));
      if (inserted) {
        Facet f;
        f.vertices = {a, b};
        f.sides[0] = {c, e};
        facets_.push_back(f);
      } else {
        Facet& f = facets_[it->second];
        if (f.sides[1].cell >= 0) {
          throw std::invalid_argument("non-manifold edge at cell " + std::to_string(c));
        }
        f.sides[1] = {c, e};
      }
      cell_facets_[c][e] = it->second;
    }
  }

  for (Facet& f : facets_) {
    if (f.on_boundary()) {
      f.kind = cells_[f.sides[0].cell].subdomain == Subdomain::Stokes ? FacetClass::BoundaryS
                                                                      : FacetClass::BoundaryD;
    } else {
      const Subdomain s0 = cells_[f.sides[0].cell].subdomain;
      const Subdomain s1 = cells_[f.sides[1].cell].subdomain;
      if (s0 == s1) {
        f.kind = s0 == Subdomain::Stokes ? FacetClass::InteriorS : FacetClass::InteriorD;
      } else {
        f.kind = FacetClass::Interface;
        if (s0 == Subdomain::Dual) {
          std::swap(f.sides[0], f.sides[1]);
          std::swap(f.vertices[0], f.vertices[1]);
        }
      }
    }
    const Vec2 t = points_[f.vertices[1]] - points_[f.vertices[0]];
    f.normal = Vec2(t.y(), -t.x()).normalized();
  }
}

double Mesh::area(Index c) const {
  const auto p = cell_points(c);
  const Vec2 a = p[1] - p[0];
  const Vec2 b = p[2] - p[0];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Point Mesh::centroid(Index c) const {
  const auto p = cell_points(c);
  return (p[0] + p[1] + p[2]) / 3.0;
}

std::array<Point, 3> Mesh::cell_points(Index c) const {
  const auto& v = cells_[c].vertices;
  return {points_[v[0]], points_[v[1]], points_[v[2]]};
}

Index Mesh::count_cells(Subdomain s) const {
  return static_cast<Index>(
      std::count_if(cells_.begin(), cells_.end(), [s](const Cell& c) { return c.subdomain == s; }));
}

Index Mesh::count_facets(FacetClass k) const {
  return static_cast<Index>(
      std::count_if(facets_.begin(), facets_.end(), [k](const Facet& f) { return f.kind == k; }));
}

Mesh build_structured(Geometry geometry, int n) {
  const GeometryInfo g = info(geometry);
  if (n < 1) {
    throw std::invalid_argument("subdivision count must be >= 1, got " + std::to_string(n));
  }
  if (n % g.divisor != 0) {
    throw std::invalid_argument(std::string(to_string(geometry)) + ": n=" + std::to_string(n) +
                                " does not resolve breakpoint " + g.breakpoint +
                                " (n must be a multiple of " + std::to_string(g.divisor) + ")");
  }
  const int m = static_cast<int>(std::lround(g.extent * n));
  const double dx = 1.0 / n;

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(m + 1) * (m + 1));
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      points.emplace_back(i * dx, j * dx);
    }
  }
  auto id = [m](int i, int j) { return static_cast<Index>(j * (m + 1) + i); };

  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(2) * m * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const Index p00 = id(i, j);
      const Index p10 = id(i + 1, j);
      const Index p11 = id(i + 1, j + 1);
      const Index p01 = id(i, j + 1);
      for (const auto& tri : {std::array<Index, 3>{p00, p10, p11}, std::array<Index, 3>{p00, p11, p01}}) {
        const Point c = (points[tri[0]] + points[tri[1]] + points[tri[2]]) / 3.0;
        cells.push_back({tri, in_stokes(geometry, c) ? Subdomain::Stokes : Subdomain::Dual});
      }
    }
  }
  return Mesh(std::move(points), std::move(cells));
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> points = mesh.points();
  std::unordered_map<std::uint64_t, Index> midpoint;
  midpoint.reserve(static_cast<std::size_t>(mesh.num_facets()));
  auto mid = [&](Index a, Index b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<Index>(points.size()));
    if (inserted) {
      points.push_back(0.5 * (mesh.points()[a] + mesh.points()[b]));
    }
    return it->second;
  };

  std::vector<Cell> cells;
  cells.reserve(mesh.cells().size() * 4);
  for (const Cell& c : mesh.cells()) {
    const auto [v0, v1, v2] = c.vertices;
    const Index m0 = mid(v1, v2);
    const Index m1 = mid(v2, v0);
    const Index m2 = mid(v0, v1);
    cells.push_back({{v0, m2, m1}, c.subdomain});
    cells.push_back({{m2, v1, m0}, c.subdomain});
    cells.push_back({{m1, m0, v2}, c.subdomain});
    cells.push_back({{m0, m1, m2}, c.subdomain});
  }
  return Mesh(std::move(points), std::move(cells));
}

FacetGeometry facet_geometry(const Mesh& mesh, Index facet) {
  if (facet < 0 || facet >= mesh.num_facets()) {
    throw std::out_of_range("facet index " + std::to_string(facet));
  }
  const Facet& f = mesh.facet(facet);
  const Point& a = mesh.points()[f.vertices[0]];
  const Point& b = mesh.points()[f.vertices[1]];
  return {(b - a).norm(), f.normal, 0.5 * (a + b)};
}

double domain_area(Geometry geometry) {
  const double e = info(geometry).extent;
  return e * e;
}

void write_mesh_dump(const Mesh& mesh, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (const Point& p : mesh.points()) {
    out << "v " << p.x() << ' ' << p.y() << '\n';
  }
  for (const Cell& c : mesh.cells()) {
    out << "c " << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << ' '
        << to_string(c.subdomain) << '\n';
  }
  for (const Facet& f : mesh.facets()) {
    out << "f " << f.vertices[0] << ' ' << f.vertices[1] << ' ' << to_string(f.kind) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dpshdg
