#pragma once

#include <algorithm>
#include <cstddef>

#include "rok/kernels.hpp"

namespace rok::kernels::detail {

// Both reduction paths sum the same fixed chunks in the same order, so the
// serial and OpenMP results agree bit for bit.
struct ChunkRange {
  std::size_t begin;
  std::size_t end;
};

inline std::size_t chunk_size(std::size_t n) {
  return std::max<std::size_t>(1, (n + kReductionChunks - 1) / kReductionChunks);
}

inline ChunkRange chunk(std::size_t n, std::size_t c) {
  const std::size_t len = chunk_size(n);
  const std::size_t b = std::min(n, c * len);
  return {b, std::min(n, b + len)};
}

inline double dot_range(const double* x, const double* y, ChunkRange r) {
  double s = 0.0;
  for (std::size_t i = r.begin; i < r.end; ++i) s += x[i] * y[i];
  return s;
}

// Scaled sum of squares for one chunk: returns (scale, ssq) with the chunk's
// squared norm equal to scale^2 * ssq.
inline void ssq_range(const double* x, ChunkRange r, double& scale, double& ssq) {
  for (std::size_t i = r.begin; i < r.end; ++i) {
    const double a = x[i] < 0 ? -x[i] : x[i];
    if (a == 0.0) continue;
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
}

inline void ssq_merge(double& scale, double& ssq, double s2, double q2) {
  if (s2 == 0.0) return;
  if (scale < s2) {
    ssq = q2 + ssq * (scale / s2) * (scale / s2);
    scale = s2;
  } else {
    ssq += q2 * (s2 / scale) * (s2 / scale);
  }
}

// One row j of the cell-centred 5-point Laplacian with mirror (Neumann) ghosts.
inline double laplacian_at(const AllenCahnGrid& g, const double* u, std::size_t i,
                           std::size_t j) {
  const std::size_t nx = g.nx;
  const std::size_t k = i + nx * j;
  const double c = u[k];
  const double w = i > 0 ? u[k - 1] : c;
  const double e = i + 1 < nx ? u[k + 1] : c;
  const double s = j > 0 ? u[k - nx] : c;
  const double n = j + 1 < g.ny ? u[k + nx] : c;
  const double ix2 = static_cast<double>(g.nx) * static_cast<double>(g.nx);
  const double iy2 = static_cast<double>(g.ny) * static_cast<double>(g.ny);
  return (w - 2.0 * c + e) * ix2 + (s - 2.0 * c + n) * iy2;
}

}  // namespace rok::kernels::detail
