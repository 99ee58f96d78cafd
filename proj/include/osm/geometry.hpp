#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace osm {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag { dirichlet, neumann };

struct BoundaryEdge {
  std::array<int, 2> v{};
  BoundaryTag tag = BoundaryTag::dirichlet;
};

/// Conforming P1 triangulation of a rectangle [0,width]x[0,height].
/// Vertex (i,j) of the structured grid has id j*(nx+1)+i; every cell is
/// split along its (i,j)-(i+1,j+1) diagonal into two counterclockwise
/// triangles.
struct Mesh {
  int nx = 0;
  int ny = 0;
  double width = 0.0;
  double height = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int vertex_id(int i, int j) const { return j * (nx + 1) + i; }
  double signed_area(int t) const;
  Point centroid(int t) const;
};

/// Non-overlapping decomposition of a mesh into subdomains. Subdomain ids
/// are 0-based here; in skeleton block numbering subdomain j is block j+1
/// and block 0 is the outer boundary.
struct Partition {
  int px = 1;
  int py = 1;
  int num_subdomains = 1;
  std::vector<int> subdomain_of_triangle;
  std::vector<std::vector<int>> triangles_of;     // per subdomain
  std::vector<std::vector<int>> boundary_dofs;    // sorted vertex ids on the subdomain boundary
  std::vector<std::vector<int>> interior_dofs;    // sorted vertex ids strictly inside
  std::vector<int> gamma_dofs;                    // sorted vertex ids on the outer boundary
};

inline constexpr int gamma_block = 0;

/// Skeleton dof numbering. Block 0 is the outer boundary, block j+1 is
/// subdomain j.
struct SkeletonIndex {
  std::vector<int> skeleton_dofs;                // sorted mesh vertex ids on the skeleton
  std::vector<std::vector<int>> block_map;       // block-local position -> skeleton position
  std::vector<int> interface_dofs;               // vertex ids shared by >= 2 subdomains
  std::vector<int> cross_points;                 // vertex ids shared by >= 3 subdomains
  std::vector<int> multiplicity;                 // blocks touching each skeleton position

  int num_blocks() const { return static_cast<int>(block_map.size()); }
  int num_skeleton() const { return static_cast<int>(skeleton_dofs.size()); }
  int block_size(int b) const { return static_cast<int>(block_map[b].size()); }
  int total_block_size() const;
};

Mesh build_rect_mesh(int nx, int ny, double width, double height);

Partition partition_checkerboard(const Mesh& mesh, int px, int py);

enum class TagMode { pure, mixed };

/// Returns a copy of `mesh` with each boundary edge tagged by evaluating
/// `rule` at the edge midpoint. In mixed mode both tag sets must be nonempty.
Mesh tag_boundary(const Mesh& mesh, const std::function<BoundaryTag(Point)>& rule,
                  TagMode mode);

SkeletonIndex skeleton_index(const Partition& partition);

/// Plain-text dump: a header line, one "v id x y" record per vertex, one
/// "t id a b c subdomain" record per triangle and one "e a b tag" record
/// per boundary edge.
void write_mesh(std::ostream& out, const Mesh& mesh, const Partition* partition = nullptr);

}  // namespace osm
