#include "elemvae/nn/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

namespace elemvae::nn::kernels {

ConvGeom ConvGeom::conv_same(int h, int w, int c, int f, int kh, int kw, int sh, int sw) {
  ConvGeom g;
  g.in_h = h; g.in_w = w; g.in_c = c; g.out_c = f;
  g.k_h = kh; g.k_w = kw; g.s_h = sh; g.s_w = sw;
  g.out_h = (h + sh - 1) / sh;
  g.out_w = (w + sw - 1) / sw;
  int pad_total_h = std::max((g.out_h - 1) * sh + kh - h, 0);
  int pad_total_w = std::max((g.out_w - 1) * sw + kw - w, 0);
  g.pad_h = pad_total_h / 2;
  g.pad_w = pad_total_w / 2;
  return g;
}

ConvGeom ConvGeom::conv_valid(int h, int w, int c, int f, int kh, int kw, int sh, int sw) {
  if (h < kh || w < kw) throw std::invalid_argument("conv_valid: kernel larger than input");
  ConvGeom g;
  g.in_h = h; g.in_w = w; g.in_c = c; g.out_c = f;
  g.k_h = kh; g.k_w = kw; g.s_h = sh; g.s_w = sw;
  g.out_h = (h - kh) / sh + 1;
  g.out_w = (w - kw) / sw + 1;
  g.pad_h = 0;
  g.pad_w = 0;
  return g;
}

ConvGeom ConvGeom::convt_same(int h, int w, int c, int f, int kh, int kw, int sh, int sw) {
  ConvGeom g;
  g.in_h = h; g.in_w = w; g.in_c = c; g.out_c = f;
  g.k_h = kh; g.k_w = kw; g.s_h = sh; g.s_w = sw;
  g.out_h = h * sh;
  g.out_w = w * sw;
  // pad of the conv this layer is the adjoint of
  g.pad_h = std::max(kh - sh, 0) / 2;
  g.pad_w = std::max(kw - sw, 0) / 2;
  return g;
}

PoolGeom PoolGeom::valid(int h, int w, int c, int kh, int kw) {
  if (h < kh || w < kw) throw std::invalid_argument("pool: window larger than input");
  PoolGeom g;
  g.in_h = h; g.in_w = w; g.c = c; g.k_h = kh; g.k_w = kw;
  g.out_h = h / kh;
  g.out_w = w / kw;
  return g;
}

namespace {
std::atomic<bool> g_parallel{true};
}

void use_parallel(bool on) { g_parallel.store(on); }
bool parallel_in_use() { return g_parallel.load(); }

#define ELEMVAE_DISPATCH(fn, ...)            \
  do {                                       \
    if (g_parallel.load())                   \
      komp::fn(__VA_ARGS__);                 \
    else                                     \
      kref::fn(__VA_ARGS__);                 \
  } while (0)

void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y) {
  ELEMVAE_DISPATCH(dense_forward, n, in_dim, out_dim, x, w, b, y);
}
void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx) {
  ELEMVAE_DISPATCH(dense_dinput, n, in_dim, out_dim, dy, w, dx);
}
void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db) {
  ELEMVAE_DISPATCH(dense_dparams, n, in_dim, out_dim, x, dy, dw, db);
}
void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y) {
  ELEMVAE_DISPATCH(conv2d_forward, g, n, x, w, b, y);
}
void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  ELEMVAE_DISPATCH(conv2d_dinput, g, n, dy, w, dx);
}
void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db) {
  ELEMVAE_DISPATCH(conv2d_dparams, g, n, x, dy, dw, db);
}
void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y) {
  ELEMVAE_DISPATCH(convt_forward, g, n, x, w, b, y);
}
void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx) {
  ELEMVAE_DISPATCH(convt_dinput, g, n, dy, w, dx);
}
void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db) {
  ELEMVAE_DISPATCH(convt_dparams, g, n, x, dy, dw, db);
}
void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax) {
  ELEMVAE_DISPATCH(maxpool_forward, g, n, x, y, argmax);
}
void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx) {
  ELEMVAE_DISPATCH(maxpool_dinput, g, n, dy, argmax, dx);
}

#undef ELEMVAE_DISPATCH

}  // namespace elemvae::nn::kernels
