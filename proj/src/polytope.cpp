#include "d4/polytope.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

namespace d4::polytope {

namespace {

using Vec = std::vector<Rat>;
using Mat = std::vector<Vec>;

// Row-reduce in place, returning the rank.  Columns are processed left to
// right with exact pivoting on the first nonzero entry.
int row_reduce(Mat& m) {
  if (m.empty()) return 0;
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (m[r][col] != Rat(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    Rat inv = m[rank][col];
    for (int c = col; c < cols; ++c) m[rank][c] /= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][col] == Rat(0)) continue;
      Rat f = m[r][col];
      for (int c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
    }
    ++rank;
  }
  return rank;
}

int rank_of(Mat m) { return row_reduce(m); }

// Solve A x = b for square A; empty optional if A is singular.
std::optional<Vec> solve_square(const Mat& a, const Vec& b) {
  int n = static_cast<int>(a.size());
  Mat m(n, Vec(n + 1));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m[r][c] = a[r][c];
    m[r][n] = b[r];
  }
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (m[r][col] != Rat(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    std::swap(m[col], m[pivot]);
    Rat inv = m[col][col];
    for (int c = col; c <= n; ++c) m[col][c] /= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == Rat(0)) continue;
      Rat f = m[r][col];
      for (int c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  Vec x(n);
  for (int r = 0; r < n; ++r) x[r] = m[r][n];
  return x;
}

// One nonzero generator of the null space, if the nullity is exactly one.
std::optional<Vec> null_space_generator(Mat m, int cols) {
  int rank = row_reduce(m);
  if (rank != cols - 1) return std::nullopt;
  // Pivot column of each nonzero row of the reduced echelon form.
  std::vector<int> pivot_col;
  std::vector<bool> is_pivot(cols, false);
  for (int r = 0; r < rank; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (m[r][c] != Rat(0)) {
        pivot_col.push_back(c);
        is_pivot[c] = true;
        break;
      }
    }
  }
  int free_col = -1;
  for (int c = 0; c < cols; ++c) {
    if (!is_pivot[c]) free_col = c;
  }
  Vec v(cols, Rat(0));
  v[free_col] = Rat(1);
  for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i) {
    v[pivot_col[i]] = -m[i][free_col];
  }
  return v;
}

Rat dot(const Vec& a, const Vec& b) {
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool feasible(const Polytope& p, const Vec& x) {
  for (const auto& hs : p.facets) {
    if (dot(hs.a, x) > hs.b) return false;
  }
  return true;
}

// Iterate over k-subsets of {0..n-1}.
template <typename F>
void for_each_subset(int n, int k, F&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Rat det(Mat m) {
  int n = static_cast<int>(m.size());
  Rat result(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (m[r][col] != Rat(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return Rat(0);
    if (pivot != col) {
      std::swap(m[col], m[pivot]);
      result = -result;
    }
    result *= m[col][col];
    Rat inv = m[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (m[r][col] == Rat(0)) continue;
      Rat f = m[r][col] / inv;
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return result;
}

int affine_dim(const std::vector<Vec>& pts) {
  if (pts.empty()) return -1;
  if (pts.size() == 1) return 0;
  Mat m;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Vec row(pts[0].size());
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = pts[i][c] - pts[0][c];
    m.push_back(std::move(row));
  }
  return rank_of(std::move(m));
}

struct Triangulator {
  const Polytope& poly;
  const std::vector<Vec>& verts;
  // tight[i][v]: facet i is tight at vertex v.
  std::vector<std::vector<bool>> tight;
  std::map<std::vector<int>, std::vector<std::vector<int>>> memo;

  Triangulator(const Polytope& p, const std::vector<Vec>& v) : poly(p), verts(v) {
    tight.assign(p.facets.size(), std::vector<bool>(v.size(), false));
    for (std::size_t i = 0; i < p.facets.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        tight[i][j] = dot(p.facets[i].a, v[j]) == p.facets[i].b;
      }
    }
  }

  int face_dim(const std::vector<int>& face) {
    std::vector<Vec> pts;
    for (int v : face) pts.push_back(verts[v]);
    return affine_dim(pts);
  }

  // Simplices (as sorted vertex-index lists) triangulating the face of
  // dimension k spanned by the given (sorted) vertex indices.
  const std::vector<std::vector<int>>& triangulate(const std::vector<int>& face, int k) {
    auto it = memo.find(face);
    if (it != memo.end()) return it->second;
    std::vector<std::vector<int>> simplices;
    if (static_cast<int>(face.size()) == k + 1) {
      simplices.push_back(face);
    } else {
      int v0 = face[0];
      std::vector<std::vector<int>> children;
      for (std::size_t i = 0; i < poly.facets.size(); ++i) {
        std::vector<int> w;
        for (int v : face) {
          if (tight[i][v]) w.push_back(v);
        }
        if (w.size() == face.size() || static_cast<int>(w.size()) < k) continue;
        if (face_dim(w) != k - 1) continue;
        if (std::find(children.begin(), children.end(), w) == children.end()) {
          children.push_back(std::move(w));
        }
      }
      for (const auto& child : children) {
        if (std::binary_search(child.begin(), child.end(), v0)) continue;
        for (const auto& s : triangulate(child, k - 1)) {
          std::vector<int> simplex = s;
          simplex.insert(simplex.begin(), v0);
          simplices.push_back(std::move(simplex));
        }
      }
    }
    return memo.emplace(face, std::move(simplices)).first->second;
  }
};

}  // namespace

Polytope d4_alpha_polytope() {
  Polytope p;
  p.dim = 6;
  auto add = [&](std::initializer_list<long long> coeffs, long long bound) {
    HalfSpace hs;
    for (long long c : coeffs) hs.a.push_back(make_rat(c));
    hs.b = make_rat(bound);
    p.facets.push_back(std::move(hs));
  };
  // Coordinates (t2, t3, t4, t5, t6, t7).
  add({2, -1, -1, 4, -2, -2}, 1);
  add({-1, 2, -1, -2, 4, -2}, 1);
  add({2, 2, 2, 1, 1, 1}, 1);
  add({-1, 0, 1, -2, 0, 2}, 0);
  add({0, -1, 1, 0, -2, 2}, 0);
  for (int i = 0; i < 6; ++i) {
    HalfSpace hs;
    hs.a.assign(6, Rat(0));
    hs.a[i] = Rat(-1);
    hs.b = Rat(0);
    p.facets.push_back(std::move(hs));
  }
  return p;
}

Polytope unit_cube(int dim) {
  Polytope p;
  p.dim = dim;
  for (int i = 0; i < dim; ++i) {
    HalfSpace lo, hi;
    lo.a.assign(dim, Rat(0));
    hi.a.assign(dim, Rat(0));
    lo.a[i] = Rat(-1);
    lo.b = Rat(0);
    hi.a[i] = Rat(1);
    hi.b = Rat(1);
    p.facets.push_back(std::move(lo));
    p.facets.push_back(std::move(hi));
  }
  return p;
}

Polytope standard_simplex(int dim) {
  Polytope p;
  p.dim = dim;
  for (int i = 0; i < dim; ++i) {
    HalfSpace hs;
    hs.a.assign(dim, Rat(0));
    hs.a[i] = Rat(-1);
    hs.b = Rat(0);
    p.facets.push_back(std::move(hs));
  }
  HalfSpace top;
  top.a.assign(dim, Rat(1));
  top.b = Rat(1);
  p.facets.push_back(std::move(top));
  return p;
}

Polytope simplex_from_vertices(const std::vector<std::vector<Rat>>& vertices) {
  int dim = static_cast<int>(vertices.size()) - 1;
  if (dim < 1 || affine_dim(vertices) != dim) {
    throw std::invalid_argument("simplex_from_vertices: vertices not full-dimensional");
  }
  Polytope p;
  p.dim = dim;
  for (int omit = 0; omit <= dim; ++omit) {
    std::vector<Vec> pts;
    for (int i = 0; i <= dim; ++i) {
      if (i != omit) pts.push_back(vertices[i]);
    }
    Mat m;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      Vec row(dim);
      for (int c = 0; c < dim; ++c) row[c] = pts[i][c] - pts[0][c];
      m.push_back(std::move(row));
    }
    auto normal = null_space_generator(std::move(m), dim);
    if (!normal) throw std::invalid_argument("simplex_from_vertices: degenerate facet");
    HalfSpace hs;
    hs.a = *normal;
    hs.b = dot(hs.a, pts[0]);
    if (dot(hs.a, vertices[omit]) > hs.b) {
      for (auto& c : hs.a) c = -c;
      hs.b = -hs.b;
    }
    p.facets.push_back(std::move(hs));
  }
  return p;
}

std::vector<std::vector<Rat>> enumerate_vertices(const Polytope& p) {
  int n = static_cast<int>(p.facets.size());
  int d = p.dim;
  std::vector<Vec> vertices;
  for_each_subset(n, d, [&](const std::vector<int>& idx) {
    Mat a(d, Vec(d));
    Vec b(d);
    for (int r = 0; r < d; ++r) {
      a[r] = p.facets[idx[r]].a;
      b[r] = p.facets[idx[r]].b;
    }
    auto x = solve_square(a, b);
    if (!x || !feasible(p, *x)) return;
    if (std::find(vertices.begin(), vertices.end(), *x) == vertices.end()) {
      vertices.push_back(std::move(*x));
    }
  });
  std::sort(vertices.begin(), vertices.end());
  return vertices;
}

bool is_bounded(const Polytope& p) {
  int d = p.dim;
  Mat all;
  for (const auto& hs : p.facets) all.push_back(hs.a);
  if (rank_of(all) < d) return false;  // recession cone contains a line
  // The cone is pointed; any nontrivial recession cone has an extreme ray
  // tight on d-1 independent constraints.
  bool unbounded = false;
  for_each_subset(static_cast<int>(p.facets.size()), d - 1, [&](const std::vector<int>& idx) {
    if (unbounded) return;
    Mat m;
    for (int i : idx) m.push_back(p.facets[i].a);
    auto ray = null_space_generator(std::move(m), d);
    if (!ray) return;
    for (int sign = 0; sign < 2; ++sign) {
      bool ok = true;
      for (const auto& hs : p.facets) {
        Rat v = dot(hs.a, *ray);
        if ((sign == 0 ? v : -v) > Rat(0)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        unbounded = true;
        return;
      }
    }
  });
  return !unbounded;
}

Rat volume(const Polytope& p) {
  if (!is_bounded(p)) throw std::invalid_argument("volume: polytope is unbounded");
  auto verts = enumerate_vertices(p);
  if (affine_dim(verts) != p.dim) {
    throw std::invalid_argument("volume: polytope is not full-dimensional");
  }
  Triangulator tri(p, verts);
  std::vector<int> all(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) all[i] = static_cast<int>(i);
  Rat total(0);
  Int dfact(1);
  for (int i = 2; i <= p.dim; ++i) dfact *= i;
  for (const auto& s : tri.triangulate(all, p.dim)) {
    Mat m;
    for (int i = 1; i <= p.dim; ++i) {
      Vec row(p.dim);
      for (int c = 0; c < p.dim; ++c) row[c] = verts[s[i]][c] - verts[s[0]][c];
      m.push_back(std::move(row));
    }
    Rat v = det(std::move(m));
    if (v < Rat(0)) v = -v;
    total += v / Rat(dfact);
  }
  return total;
}

}  // namespace d4::polytope
