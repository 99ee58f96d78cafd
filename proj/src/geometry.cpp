#include "osm/geometry.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "osm/types.hpp"

namespace osm {

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  Point c;
  for (int v : tri) {
    c.x += vertices[v].x / 3.0;
    c.y += vertices[v].y / 3.0;
  }
  return c;
}

int SkeletonIndex::total_block_size() const {
  int n = 0;
  for (const auto& m : block_map) n += static_cast<int>(m.size());
  return n;
}

Mesh build_rect_mesh(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("build_rect_mesh: cell counts must be positive, got nx=" +
                          std::to_string(nx) + " ny=" + std::to_string(ny));
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidArgument("build_rect_mesh: width and height must be positive");
  }
  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.width = width;
  mesh.height = height;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.push_back({width * i / nx, height * j / ny});
    }
  }
  mesh.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = mesh.vertex_id(i, j);
      const int v10 = mesh.vertex_id(i + 1, j);
      const int v01 = mesh.vertex_id(i, j + 1);
      const int v11 = mesh.vertex_id(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  // Boundary loop, counterclockwise starting at the origin.
  for (int i = 0; i < nx; ++i) mesh.boundary_edges.push_back({{mesh.vertex_id(i, 0), mesh.vertex_id(i + 1, 0)}});
  for (int j = 0; j < ny; ++j) mesh.boundary_edges.push_back({{mesh.vertex_id(nx, j), mesh.vertex_id(nx, j + 1)}});
  for (int i = nx; i > 0; --i) mesh.boundary_edges.push_back({{mesh.vertex_id(i, ny), mesh.vertex_id(i - 1, ny)}});
  for (int j = ny; j > 0; --j) mesh.boundary_edges.push_back({{mesh.vertex_id(0, j), mesh.vertex_id(0, j - 1)}});
  return mesh;
}

Partition partition_checkerboard(const Mesh& mesh, int px, int py) {
  if (px < 1 || py < 1) {
    throw InvalidArgument("partition_checkerboard: px and py must be positive");
  }
  if (mesh.nx % px != 0 || mesh.ny % py != 0) {
    throw InvalidArgument("partition_checkerboard: px=" + std::to_string(px) +
                          " must divide nx=" + std::to_string(mesh.nx) + " and py=" +
                          std::to_string(py) + " must divide ny=" + std::to_string(mesh.ny));
  }
  Partition part;
  part.px = px;
  part.py = py;
  part.num_subdomains = px * py;
  const int J = part.num_subdomains;
  const int cx = mesh.nx / px;
  const int cy = mesh.ny / py;

  part.subdomain_of_triangle.resize(mesh.num_triangles());
  part.triangles_of.assign(J, {});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int cell = t / 2;
    const int i = cell % mesh.nx;
    const int j = cell / mesh.nx;
    const int s = (j / cy) * px + (i / cx);
    part.subdomain_of_triangle[t] = s;
    part.triangles_of[s].push_back(t);
  }

  std::vector<int> on_gamma(mesh.num_vertices(), 0);
  for (const auto& e : mesh.boundary_edges) {
    on_gamma[e.v[0]] = 1;
    on_gamma[e.v[1]] = 1;
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (on_gamma[v]) part.gamma_dofs.push_back(v);
  }

  // A vertex of a closed subdomain is interior iff every incident triangle
  // belongs to that subdomain and the vertex is not on the outer boundary.
  std::vector<std::set<int>> touching(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t]) touching[v].insert(part.subdomain_of_triangle[t]);
  }
  part.boundary_dofs.assign(J, {});
  part.interior_dofs.assign(J, {});
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const bool shared = touching[v].size() > 1 || on_gamma[v];
    for (int s : touching[v]) {
      (shared ? part.boundary_dofs[s] : part.interior_dofs[s]).push_back(v);
    }
  }
  return part;
}

Mesh tag_boundary(const Mesh& mesh, const std::function<BoundaryTag(Point)>& rule,
                  TagMode mode) {
  Mesh out = mesh;
  int n_dirichlet = 0;
  int n_neumann = 0;
  for (auto& e : out.boundary_edges) {
    const Point& a = out.vertices[e.v[0]];
    const Point& b = out.vertices[e.v[1]];
    e.tag = rule({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    (e.tag == BoundaryTag::dirichlet ? n_dirichlet : n_neumann) += 1;
  }
  if (mode == TagMode::mixed && (n_dirichlet == 0 || n_neumann == 0)) {
    throw InvalidArgument("tag_boundary: mixed conditions need nonempty Dirichlet and Neumann parts (got " +
                          std::to_string(n_dirichlet) + " Dirichlet and " +
                          std::to_string(n_neumann) + " Neumann edges)");
  }
  return out;
}

SkeletonIndex skeleton_index(const Partition& partition) {
  SkeletonIndex idx;
  std::map<int, int> count;  // vertex -> number of subdomains
  std::set<int> all(partition.gamma_dofs.begin(), partition.gamma_dofs.end());
  for (const auto& dofs : partition.boundary_dofs) {
    for (int v : dofs) {
      all.insert(v);
      ++count[v];
    }
  }
  idx.skeleton_dofs.assign(all.begin(), all.end());
  std::map<int, int> position;
  for (int k = 0; k < idx.num_skeleton(); ++k) position[idx.skeleton_dofs[k]] = k;

  idx.block_map.resize(partition.num_subdomains + 1);
  idx.multiplicity.assign(idx.num_skeleton(), 0);
  auto map_block = [&](int b, const std::vector<int>& dofs) {
    auto& m = idx.block_map[b];
    m.reserve(dofs.size());
    for (int v : dofs) {
      m.push_back(position.at(v));
      ++idx.multiplicity[m.back()];
    }
  };
  map_block(gamma_block, partition.gamma_dofs);
  for (int s = 0; s < partition.num_subdomains; ++s) map_block(s + 1, partition.boundary_dofs[s]);

  for (const auto& [v, c] : count) {
    if (c >= 2) idx.interface_dofs.push_back(v);
    if (c >= 3) idx.cross_points.push_back(v);
  }
  return idx;
}

void write_mesh(std::ostream& out, const Mesh& mesh, const Partition* partition) {
  out << "mesh " << mesh.num_vertices() << " " << mesh.num_triangles() << " "
      << mesh.boundary_edges.size() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << "v " << v << " " << mesh.vertices[v].x << " " << mesh.vertices[v].y << "\n";
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << "t " << t << " " << tri[0] << " " << tri[1] << " " << tri[2] << " "
        << (partition ? partition->subdomain_of_triangle[t] : 0) << "\n";
  }
  for (const auto& e : mesh.boundary_edges) {
    out << "e " << e.v[0] << " " << e.v[1] << " " << (e.tag == BoundaryTag::dirichlet ? "D" : "N")
        << "\n";
  }
}

}  // namespace osm
