// OpenMP kernels. Parallelism is only over independent output elements and
// every output element accumulates its terms in exactly the same order as
// the serial reference, so results are bit-identical to kref for any thread
// count and block size. Outputs are register-blocked so each weight row is
// streamed once per block instead of once per output; the inner loops run
// over the contiguous trailing dimension to vectorize.

#include "elemvae/nn/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace elemvae::nn::kernels::komp {

namespace {

// weights reshaped [kh][kw][cout][cin]; gives contiguous ci rows for the
// input-gradient kernels
std::vector<double> transpose_kernel(const ConvGeom& g, const double* w) {
  std::vector<double> wt(1LL * g.k_h * g.k_w * g.out_c * g.in_c);
  for (int k = 0; k < g.k_h * g.k_w; ++k)
    for (int ci = 0; ci < g.in_c; ++ci)
      for (int co = 0; co < g.out_c; ++co)
        wt[(1LL * k * g.out_c + co) * g.in_c + ci] = w[(1LL * k * g.in_c + ci) * g.out_c + co];
  return wt;
}

int pixel_block(int channels) { return channels >= 128 ? 4 : 8; }

}  // namespace

void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y) {
  const int kBlock = pixel_block(out_dim);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int r0 = 0; r0 < n; r0 += kBlock) {
      int bs = std::min(kBlock, n - r0);
      for (int t = 0; t < bs; ++t) {
        double* yr = y + 1LL * (r0 + t) * out_dim;
        for (int j = 0; j < out_dim; ++j) yr[j] = b[j];
      }
      for (int i = 0; i < in_dim; ++i) {
        const double* wr = w + 1LL * i * out_dim;
        for (int t = 0; t < bs; ++t) {
          double a = x[1LL * (r0 + t) * in_dim + i];
          double* yr = y + 1LL * (r0 + t) * out_dim;
          for (int j = 0; j < out_dim; ++j) yr[j] += a * wr[j];
        }
      }
    }
  }
}

void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx) {
  // w transposed to [out][in] so the accumulation runs over contiguous rows
  std::vector<double> wt(1LL * in_dim * out_dim);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < out_dim; ++j) wt[1LL * j * in_dim + i] = w[1LL * i * out_dim + j];
  const int kBlock = pixel_block(in_dim);
#pragma omp parallel for schedule(static)
  for (int r0 = 0; r0 < n; r0 += kBlock) {
    int bs = std::min(kBlock, n - r0);
    for (int t = 0; t < bs; ++t)
      std::memset(dx + 1LL * (r0 + t) * in_dim, 0, sizeof(double) * in_dim);
    for (int j = 0; j < out_dim; ++j) {
      const double* wr = wt.data() + 1LL * j * in_dim;
      for (int t = 0; t < bs; ++t) {
        double g = dy[1LL * (r0 + t) * out_dim + j];
        double* dxr = dx + 1LL * (r0 + t) * in_dim;
        for (int i = 0; i < in_dim; ++i) dxr[i] += g * wr[i];
      }
    }
  }
}

void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db) {
  const int kBlock = 8;
#pragma omp parallel for schedule(static)
  for (int i0 = 0; i0 < in_dim; i0 += kBlock) {
    int bs = std::min(kBlock, in_dim - i0);
    for (int t = 0; t < bs; ++t)
      std::memset(dw + 1LL * (i0 + t) * out_dim, 0, sizeof(double) * out_dim);
    for (int r = 0; r < n; ++r) {
      const double* dyr = dy + 1LL * r * out_dim;
      const double* xr = x + 1LL * r * in_dim;
      for (int t = 0; t < bs; ++t) {
        double a = xr[i0 + t];
        double* dwr = dw + 1LL * (i0 + t) * out_dim;
        for (int j = 0; j < out_dim; ++j) dwr[j] += a * dyr[j];
      }
    }
  }
  for (int j = 0; j < out_dim; ++j) db[j] = 0.0;
  for (int r = 0; r < n; ++r) {
    const double* dyr = dy + 1LL * r * out_dim;
    for (int j = 0; j < out_dim; ++j) db[j] += dyr[j];
  }
}

void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y) {
  long long npix = 1LL * n * g.out_h * g.out_w;
  const int kBlock = pixel_block(g.out_c);
#pragma omp parallel for schedule(static)
  for (long long p0 = 0; p0 < npix; p0 += kBlock) {
    int bs = static_cast<int>(std::min<long long>(kBlock, npix - p0));
    for (int t = 0; t < bs; ++t) {
      double* yr = y + (p0 + t) * g.out_c;
      for (int co = 0; co < g.out_c; ++co) yr[co] = b[co];
    }
    const double* xp[8];
    for (int ky = 0; ky < g.k_h; ++ky)
      for (int kx = 0; kx < g.k_w; ++kx) {
        for (int t = 0; t < bs; ++t) {
          long long pix = p0 + t;
          int r = static_cast<int>(pix / (g.out_h * g.out_w));
          int oy = static_cast<int>(pix / g.out_w % g.out_h);
          int ox = static_cast<int>(pix % g.out_w);
          int iy = oy * g.s_h + ky - g.pad_h;
          int ix = ox * g.s_w + kx - g.pad_w;
          xp[t] = (iy < 0 || iy >= g.in_h || ix < 0 || ix >= g.in_w)
                      ? nullptr
                      : x + ((1LL * r * g.in_h + iy) * g.in_w + ix) * g.in_c;
        }
        const double* wk = w + (1LL * ky * g.k_w + kx) * g.in_c * g.out_c;
        for (int ci = 0; ci < g.in_c; ++ci) {
          const double* wr = wk + 1LL * ci * g.out_c;
          for (int t = 0; t < bs; ++t) {
            if (!xp[t]) continue;
            double a = xp[t][ci];
            double* yr = y + (p0 + t) * g.out_c;
            for (int co = 0; co < g.out_c; ++co) yr[co] += a * wr[co];
          }
        }
      }
  }
}

void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  std::vector<double> wt = transpose_kernel(g, w);
  long long npix = 1LL * n * g.in_h * g.in_w;
  const int kBlock = pixel_block(g.in_c);
#pragma omp parallel for schedule(static)
  for (long long p0 = 0; p0 < npix; p0 += kBlock) {
    int bs = static_cast<int>(std::min<long long>(kBlock, npix - p0));
    for (int t = 0; t < bs; ++t)
      std::memset(dx + (p0 + t) * g.in_c, 0, sizeof(double) * g.in_c);
    const double* dyp[8];
    for (int ky = 0; ky < g.k_h; ++ky)
      for (int kx = 0; kx < g.k_w; ++kx) {
        for (int t = 0; t < bs; ++t) {
          long long pix = p0 + t;
          int r = static_cast<int>(pix / (g.in_h * g.in_w));
          int iy = static_cast<int>(pix / g.in_w % g.in_h);
          int ix = static_cast<int>(pix % g.in_w);
          dyp[t] = nullptr;
          int ty = iy + g.pad_h - ky;
          int tx = ix + g.pad_w - kx;
          if (ty < 0 || ty % g.s_h != 0 || tx < 0 || tx % g.s_w != 0) continue;
          int oy = ty / g.s_h, ox = tx / g.s_w;
          if (oy >= g.out_h || ox >= g.out_w) continue;
          dyp[t] = dy + ((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c;
        }
        const double* wk = wt.data() + (1LL * ky * g.k_w + kx) * g.out_c * g.in_c;
        for (int co = 0; co < g.out_c; ++co) {
          const double* wr = wk + 1LL * co * g.in_c;
          for (int t = 0; t < bs; ++t) {
            if (!dyp[t]) continue;
            double gv = dyp[t][co];
            double* dxr = dx + (p0 + t) * g.in_c;
            for (int ci = 0; ci < g.in_c; ++ci) dxr[ci] += gv * wr[ci];
          }
        }
      }
  }
}

void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db) {
  const int kBlock = 8;
  int kpos = g.k_h * g.k_w;
  int blocks_per_k = (g.in_c + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (int job = 0; job < kpos * blocks_per_k; ++job) {
    int k = job / blocks_per_k;
    int ky = k / g.k_w, kx = k % g.k_w;
    int c0 = job % blocks_per_k * kBlock;
    int bs = std::min(kBlock, g.in_c - c0);
    double* dwk = dw + (1LL * k * g.in_c + c0) * g.out_c;
    std::memset(dwk, 0, sizeof(double) * bs * g.out_c);
    for (int r = 0; r < n; ++r)
      for (int oy = 0; oy < g.out_h; ++oy) {
        int iy = oy * g.s_h + ky - g.pad_h;
        if (iy < 0 || iy >= g.in_h) continue;
        for (int ox = 0; ox < g.out_w; ++ox) {
          int ix = ox * g.s_w + kx - g.pad_w;
          if (ix < 0 || ix >= g.in_w) continue;
          const double* xr = x + ((1LL * r * g.in_h + iy) * g.in_w + ix) * g.in_c + c0;
          const double* dyp = dy + ((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c;
          for (int t = 0; t < bs; ++t) {
            double a = xr[t];
            double* dwr = dwk + 1LL * t * g.out_c;
            for (int co = 0; co < g.out_c; ++co) dwr[co] += a * dyp[co];
          }
        }
      }
  }
  for (int co = 0; co < g.out_c; ++co) db[co] = 0.0;
  long long npix = 1LL * n * g.out_h * g.out_w;
  for (long long pix = 0; pix < npix; ++pix) {
    const double* dyp = dy + pix * g.out_c;
    for (int co = 0; co < g.out_c; ++co) db[co] += dyp[co];
  }
}

void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y) {
  long long npix = 1LL * n * g.out_h * g.out_w;
  const int kBlock = pixel_block(g.out_c);
#pragma omp parallel for schedule(static)
  for (long long p0 = 0; p0 < npix; p0 += kBlock) {
    int bs = static_cast<int>(std::min<long long>(kBlock, npix - p0));
    for (int t = 0; t < bs; ++t) {
      double* yr = y + (p0 + t) * g.out_c;
      for (int co = 0; co < g.out_c; ++co) yr[co] = b[co];
    }
    const double* xp[8];
    for (int ky = 0; ky < g.k_h; ++ky)
      for (int kx = 0; kx < g.k_w; ++kx) {
        for (int t = 0; t < bs; ++t) {
          long long pix = p0 + t;
          int r = static_cast<int>(pix / (g.out_h * g.out_w));
          int p = static_cast<int>(pix / g.out_w % g.out_h);
          int q = static_cast<int>(pix % g.out_w);
          xp[t] = nullptr;
          int ty = p + g.pad_h - ky;
          int tx = q + g.pad_w - kx;
          if (ty < 0 || ty % g.s_h != 0 || tx < 0 || tx % g.s_w != 0) continue;
          int i = ty / g.s_h, j = tx / g.s_w;
          if (i >= g.in_h || j >= g.in_w) continue;
          xp[t] = x + ((1LL * r * g.in_h + i) * g.in_w + j) * g.in_c;
        }
        const double* wk = w + (1LL * ky * g.k_w + kx) * g.in_c * g.out_c;
        for (int ci = 0; ci < g.in_c; ++ci) {
          const double* wr = wk + 1LL * ci * g.out_c;
          for (int t = 0; t < bs; ++t) {
            if (!xp[t]) continue;
            double a = xp[t][ci];
            double* yr = y + (p0 + t) * g.out_c;
            for (int co = 0; co < g.out_c; ++co) yr[co] += a * wr[co];
          }
        }
      }
  }
}

void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  std::vector<double> wt = transpose_kernel(g, w);
  long long npix = 1LL * n * g.in_h * g.in_w;
  const int kBlock = pixel_block(g.in_c);
#pragma omp parallel for schedule(static)
  for (long long p0 = 0; p0 < npix; p0 += kBlock) {
    int bs = static_cast<int>(std::min<long long>(kBlock, npix - p0));
    for (int t = 0; t < bs; ++t)
      std::memset(dx + (p0 + t) * g.in_c, 0, sizeof(double) * g.in_c);
    const double* dyp[8];
    for (int ky = 0; ky < g.k_h; ++ky)
      for (int kx = 0; kx < g.k_w; ++kx) {
        for (int t = 0; t < bs; ++t) {
          long long pix = p0 + t;
          int r = static_cast<int>(pix / (g.in_h * g.in_w));
          int i = static_cast<int>(pix / g.in_w % g.in_h);
          int j = static_cast<int>(pix % g.in_w);
          int p = i * g.s_h + ky - g.pad_h;
          int q = j * g.s_w + kx - g.pad_w;
          dyp[t] = (p < 0 || p >= g.out_h || q < 0 || q >= g.out_w)
                       ? nullptr
                       : dy + ((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c;
        }
        const double* wk = wt.data() + (1LL * ky * g.k_w + kx) * g.out_c * g.in_c;
        for (int co = 0; co < g.out_c; ++co) {
          const double* wr = wk + 1LL * co * g.in_c;
          for (int t = 0; t < bs; ++t) {
            if (!dyp[t]) continue;
            double gv = dyp[t][co];
            double* dxr = dx + (p0 + t) * g.in_c;
            for (int ci = 0; ci < g.in_c; ++ci) dxr[ci] += gv * wr[ci];
          }
        }
      }
  }
}

void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db) {
  const int kBlock = 8;
  int kpos = g.k_h * g.k_w;
  int blocks_per_k = (g.in_c + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (int job = 0; job < kpos * blocks_per_k; ++job) {
    int k = job / blocks_per_k;
    int ky = k / g.k_w, kx = k % g.k_w;
    int c0 = job % blocks_per_k * kBlock;
    int bs = std::min(kBlock, g.in_c - c0);
    double* dwk = dw + (1LL * k * g.in_c + c0) * g.out_c;
    std::memset(dwk, 0, sizeof(double) * bs * g.out_c);
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < g.in_h; ++i) {
        int p = i * g.s_h + ky - g.pad_h;
        if (p < 0 || p >= g.out_h) continue;
        for (int j = 0; j < g.in_w; ++j) {
          int q = j * g.s_w + kx - g.pad_w;
          if (q < 0 || q >= g.out_w) continue;
          const double* xr = x + ((1LL * r * g.in_h + i) * g.in_w + j) * g.in_c + c0;
          const double* dyp = dy + ((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c;
          for (int t = 0; t < bs; ++t) {
            double a = xr[t];
            double* dwr = dwk + 1LL * t * g.out_c;
            for (int co = 0; co < g.out_c; ++co) dwr[co] += a * dyp[co];
          }
        }
      }
  }
  for (int co = 0; co < g.out_c; ++co) db[co] = 0.0;
  long long npix = 1LL * n * g.out_h * g.out_w;
  for (long long pix = 0; pix < npix; ++pix) {
    const double* dyp = dy + pix * g.out_c;
    for (int co = 0; co < g.out_c; ++co) db[co] += dyp[co];
  }
}

void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax) {
  long long total = 1LL * n * g.out_h * g.out_w * g.c;
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < total; ++k) {
    int c = static_cast<int>(k % g.c);
    long long pix = k / g.c;
    int r = static_cast<int>(pix / (g.out_h * g.out_w));
    int oy = static_cast<int>(pix / g.out_w % g.out_h);
    int ox = static_cast<int>(pix % g.out_w);
    double best = 0.0;
    long long best_idx = -1;
    for (int ky = 0; ky < g.k_h; ++ky)
      for (int kx = 0; kx < g.k_w; ++kx) {
        int iy = oy * g.k_h + ky;
        int ix = ox * g.k_w + kx;
        long long idx = ((1LL * r * g.in_h + iy) * g.in_w + ix) * g.c + c;
        if (best_idx < 0 || x[idx] > best) {
          best = x[idx];
          best_idx = idx;
        }
      }
    y[k] = best;
    argmax[k] = static_cast<int>(best_idx);
  }
}

void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx) {
  std::memset(dx, 0, sizeof(double) * 1LL * n * g.in_h * g.in_w * g.c);
  long long total = 1LL * n * g.out_h * g.out_w * g.c;
  // windows are disjoint (stride = pool size), so writes never collide
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < total; ++k) dx[argmax[k]] = dy[k];
}

}  // namespace elemvae::nn::kernels::komp
