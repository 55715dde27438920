#pragma once

namespace elemvae::nn::kernels {

/// Geometry of a 2-D convolution (TensorFlow layout and padding rules).
/// Inputs are NHWC, conv weights are [kh][kw][cin][cout].
/// 'same' padding puts the smaller half of the pad before (top/left).
struct ConvGeom {
  int in_h = 0, in_w = 0, in_c = 0;
  int out_c = 0;
  int k_h = 0, k_w = 0;
  int s_h = 1, s_w = 1;
  int out_h = 0, out_w = 0;
  int pad_h = 0, pad_w = 0;  // leading pad

  /// forward conv, padding='same': out = ceil(in / stride)
  static ConvGeom conv_same(int h, int w, int c, int f, int kh, int kw, int sh, int sw);
  /// forward conv, padding='valid': out = floor((in - k) / stride) + 1
  static ConvGeom conv_valid(int h, int w, int c, int f, int kh, int kw, int sh, int sw);
  /// transposed conv, padding='same': out = in * stride
  static ConvGeom convt_same(int h, int w, int c, int f, int kh, int kw, int sh, int sw);

  long long weight_count() const {
    return 1LL * k_h * k_w * in_c * out_c;
  }
};

/// Non-overlapping max pooling (stride = pool size, valid padding).
struct PoolGeom {
  int in_h = 0, in_w = 0, c = 0;
  int k_h = 0, k_w = 0;
  int out_h = 0, out_w = 0;

  static PoolGeom valid(int h, int w, int c, int kh, int kw);
};

/// Kernel dispatch: `use_parallel(false)` routes every call through the
/// serial reference implementation. Both paths accumulate each output
/// element in the same order, so results are bit-identical; the tests
/// assert exactly that.
void use_parallel(bool on);
bool parallel_in_use();

// dense: x[n][in] * w[in][out] + b[out] -> y[n][out]
void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y);
void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx);
void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db);

void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y);
void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db);

void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y);
void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db);

void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax);
void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx);

/// serial reference implementations (textbook loops, no OpenMP)
namespace kref {
void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y);
void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx);
void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db);
void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y);
void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db);
void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y);
void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db);
void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax);
void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx);
}  // namespace kref

/// OpenMP implementations, parallel over independent output elements
namespace komp {
void dense_forward(int n, int in_dim, int out_dim, const double* x, const double* w,
                   const double* b, double* y);
void dense_dinput(int n, int in_dim, int out_dim, const double* dy, const double* w, double* dx);
void dense_dparams(int n, int in_dim, int out_dim, const double* x, const double* dy, double* dw,
                   double* db);
void conv2d_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                    double* y);
void conv2d_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void conv2d_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                    double* db);
void convt_forward(const ConvGeom& g, int n, const double* x, const double* w, const double* b,
                   double* y);
void convt_dinput(const ConvGeom& g, int n, const double* dy, const double* w, double* dx);
void convt_dparams(const ConvGeom& g, int n, const double* x, const double* dy, double* dw,
                   double* db);
void maxpool_forward(const PoolGeom& g, int n, const double* x, double* y, int* argmax);
void maxpool_dinput(const PoolGeom& g, int n, const double* dy, const int* argmax, double* dx);
}  // namespace komp

}  // namespace elemvae::nn::kernels
