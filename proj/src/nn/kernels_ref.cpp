// Serial reference kernels: one accumulator per output element, inner loops
// in (ky, kx, ci) / (n, oy, ox) order. The OpenMP kernels replay exactly the
// same per-output accumulation order, so both paths agree bit-for-bit.

#include "elemvae/nn/kernels.hpp"

#include <cstring>

namespace elemvae::nn::kernels::kref {

void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y) {
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < out_dim; ++j) {
      double s = b[j];
      for (int i = 0; i < in_dim; ++i) s += x[r * in_dim + i] * w[i * out_dim + j];
      y[r * out_dim + j] = s;
    }
}

void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx) {
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < in_dim; ++i) {
      double s = 0.0;
      for (int j = 0; j < out_dim; ++j) s += dy[r * out_dim + j] * w[i * out_dim + j];
      dx[r * in_dim + i] = s;
    }
}

void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db) {
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < out_dim; ++j) {
      double s = 0.0;
      for (int r = 0; r < n; ++r) s += x[r * in_dim + i] * dy[r * out_dim + j];
      dw[i * out_dim + j] = s;
    }
  for (int j = 0; j < out_dim; ++j) {
    double s = 0.0;
    for (int r = 0; r < n; ++r) s += dy[r * out_dim + j];
    db[j] = s;
  }
}

void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y) {
  for (int r = 0; r < n; ++r)
    for (int oy = 0; oy < g.out_h; ++oy)
      for (int ox = 0; ox < g.out_w; ++ox)
        for (int co = 0; co < g.out_c; ++co) {
          double s = b[co];
          for (int ky = 0; ky < g.k_h; ++ky) {
            int iy = oy * g.s_h + ky - g.pad_h;
            if (iy < 0 || iy >= g.in_h) continue;
            for (int kx = 0; kx < g.k_w; ++kx) {
              int ix = ox * g.s_w + kx - g.pad_w;
              if (ix < 0 || ix >= g.in_w) continue;
              const double* xp = x + ((1LL * r * g.in_h + iy) * g.in_w + ix) * g.in_c;
              const double* wp = w + ((1LL * ky * g.k_w + kx) * g.in_c) * g.out_c + co;
              for (int ci = 0; ci < g.in_c; ++ci) s += xp[ci] * wp[1LL * ci * g.out_c];
            }
          }
          y[((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c + co] = s;
        }
}

void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  for (int r = 0; r < n; ++r)
    for (int iy = 0; iy < g.in_h; ++iy)
      for (int ix = 0; ix < g.in_w; ++ix)
        for (int ci = 0; ci < g.in_c; ++ci) {
          double s = 0.0;
          for (int ky = 0; ky < g.k_h; ++ky) {
            int t = iy + g.pad_h - ky;
            if (t < 0 || t % g.s_h != 0) continue;
            int oy = t / g.s_h;
            if (oy >= g.out_h) continue;
            for (int kx = 0; kx < g.k_w; ++kx) {
              int u = ix + g.pad_w - kx;
              if (u < 0 || u % g.s_w != 0) continue;
              int ox = u / g.s_w;
              if (ox >= g.out_w) continue;
              const double* dyp = dy + ((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c;
              const double* wp = w + ((1LL * ky * g.k_w + kx) * g.in_c + ci) * g.out_c;
              for (int co = 0; co < g.out_c; ++co) s += dyp[co] * wp[co];
            }
          }
          dx[((1LL * r * g.in_h + iy) * g.in_w + ix) * g.in_c + ci] = s;
        }
}

void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db) {
  for (int ky = 0; ky < g.k_h; ++ky)
    for (int kx = 0; kx < g.k_w; ++kx)
      for (int ci = 0; ci < g.in_c; ++ci)
        for (int co = 0; co < g.out_c; ++co) {
          double s = 0.0;
          for (int r = 0; r < n; ++r)
            for (int oy = 0; oy < g.out_h; ++oy) {
              int iy = oy * g.s_h + ky - g.pad_h;
              if (iy < 0 || iy >= g.in_h) continue;
              for (int ox = 0; ox < g.out_w; ++ox) {
                int ix = ox * g.s_w + kx - g.pad_w;
                if (ix < 0 || ix >= g.in_w) continue;
                s += x[((1LL * r * g.in_h + iy) * g.in_w + ix) * g.in_c + ci] *
                     dy[((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c + co];
              }
            }
          dw[((1LL * ky * g.k_w + kx) * g.in_c + ci) * g.out_c + co] = s;
        }
  for (int co = 0; co < g.out_c; ++co) {
    double s = 0.0;
    for (int r = 0; r < n; ++r)
      for (int oy = 0; oy < g.out_h; ++oy)
        for (int ox = 0; ox < g.out_w; ++ox)
          s += dy[((1LL * r * g.out_h + oy) * g.out_w + ox) * g.out_c + co];
    db[co] = s;
  }
}

void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y) {
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < g.out_h; ++p)
      for (int q = 0; q < g.out_w; ++q)
        for (int co = 0; co < g.out_c; ++co) {
          double s = b[co];
          for (int ky = 0; ky < g.k_h; ++ky) {
            int t = p + g.pad_h - ky;
            if (t < 0 || t % g.s_h != 0) continue;
            int i = t / g.s_h;
            if (i >= g.in_h) continue;
            for (int kx = 0; kx < g.k_w; ++kx) {
              int u = q + g.pad_w - kx;
              if (u < 0 || u % g.s_w != 0) continue;
              int j = u / g.s_w;
              if (j >= g.in_w) continue;
              const double* xp = x + ((1LL * r * g.in_h + i) * g.in_w + j) * g.in_c;
              const double* wp = w + ((1LL * ky * g.k_w + kx) * g.in_c) * g.out_c + co;
              for (int ci = 0; ci < g.in_c; ++ci) s += xp[ci] * wp[1LL * ci * g.out_c];
            }
          }
          y[((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c + co] = s;
        }
}

void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < g.in_h; ++i)
      for (int j = 0; j < g.in_w; ++j)
        for (int ci = 0; ci < g.in_c; ++ci) {
          double s = 0.0;
          for (int ky = 0; ky < g.k_h; ++ky) {
            int p = i * g.s_h + ky - g.pad_h;
            if (p < 0 || p >= g.out_h) continue;
            for (int kx = 0; kx < g.k_w; ++kx) {
              int q = j * g.s_w + kx - g.pad_w;
              if (q < 0 || q >= g.out_w) continue;
              const double* dyp = dy + ((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c;
              const double* wp = w + ((1LL * ky * g.k_w + kx) * g.in_c + ci) * g.out_c;
              for (int co = 0; co < g.out_c; ++co) s += dyp[co] * wp[co];
            }
          }
          dx[((1LL * r * g.in_h + i) * g.in_w + j) * g.in_c + ci] = s;
        }
}

void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db) {
  for (int ky = 0; ky < g.k_h; ++ky)
    for (int kx = 0; kx < g.k_w; ++kx)
      for (int ci = 0; ci < g.in_c; ++ci)
        for (int co = 0; co < g.out_c; ++co) {
          double s = 0.0;
          for (int r = 0; r < n; ++r)
            for (int i = 0; i < g.in_h; ++i) {
              int p = i * g.s_h + ky - g.pad_h;
              if (p < 0 || p >= g.out_h) continue;
              for (int j = 0; j < g.in_w; ++j) {
                int q = j * g.s_w + kx - g.pad_w;
                if (q < 0 || q >= g.out_w) continue;
                s += x[((1LL * r * g.in_h + i) * g.in_w + j) * g.in_c + ci] *
                     dy[((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c + co];
              }
            }
          dw[((1LL * ky * g.k_w + kx) * g.in_c + ci) * g.out_c + co] = s;
        }
  for (int co = 0; co < g.out_c; ++co) {
    double s = 0.0;
    for (int r = 0; r < n; ++r)
      for (int p = 0; p < g.out_h; ++p)
        for (int q = 0; q < g.out_w; ++q)
          s += dy[((1LL * r * g.out_h + p) * g.out_w + q) * g.out_c + co];
    db[co] = s;
  }
}

void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax) {
  for (int r = 0; r < n; ++r)
    for (int oy = 0; oy < g.out_h; ++oy)
      for (int ox = 0; ox < g.out_w; ++ox)
        for (int c = 0; c < g.c; ++c) {
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
          long long out_idx = ((1LL * r * g.out_h + oy) * g.out_w + ox) * g.c + c;
          y[out_idx] = best;
          argmax[out_idx] = static_cast<int>(best_idx);
        }
}

void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx) {
  std::memset(dx, 0, sizeof(double) * 1LL * n * g.in_h * g.in_w * g.c);
  long long total = 1LL * n * g.out_h * g.out_w * g.c;
  for (long long k = 0; k < total; ++k) dx[argmax[k]] = dy[k];
}

}  // namespace elemvae::nn::kernels::kref
