// The OpenMP kernels must agree bit-for-bit with the serial reference.

#include <doctest.h>

#include <cstring>
#include <tuple>

#include "elemvae/nn/kernels.hpp"
#include "elemvae/nn/rng.hpp"

using namespace elemvae::nn;
using namespace elemvae::nn::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("kernels: dense forward/backward bit-identical") {
  Rng rng(101);
  const std::tuple<int, int, int> cases[] = {{1, 3, 5}, {4, 17, 9}, {32, 896, 896}};
  for (auto [n, in, out] : cases) {
    std::vector<double> x = random_vec(1LL * n * in, rng);
    std::vector<double> w = random_vec(1LL * in * out, rng);
    std::vector<double> b = random_vec(out, rng);
    std::vector<double> y1(1LL * n * out), y2(y1.size());
    kref::dense_forward(n, in, out, x.data(), w.data(), b.data(), y1.data());
    komp::dense_forward(n, in, out, x.data(), w.data(), b.data(), y2.data());
    CHECK(bits_equal(y1, y2));

    std::vector<double> dy = random_vec(y1.size(), rng);
    std::vector<double> dx1(x.size()), dx2(x.size());
    kref::dense_dinput(n, in, out, dy.data(), w.data(), dx1.data());
    komp::dense_dinput(n, in, out, dy.data(), w.data(), dx2.data());
    CHECK(bits_equal(dx1, dx2));

    std::vector<double> dw1(w.size()), dw2(w.size()), db1(out), db2(out);
    kref::dense_dparams(n, in, out, x.data(), dy.data(), dw1.data(), db1.data());
    komp::dense_dparams(n, in, out, x.data(), dy.data(), dw2.data(), db2.data());
    CHECK(bits_equal(dw1, dw2));
    CHECK(bits_equal(db1, db2));
  }
}

TEST_CASE("kernels: conv2d and conv2d_transpose bit-identical") {
  Rng rng(102);
  struct Case {
    ConvGeom g;
  };
  std::vector<ConvGeom> cases = {
      ConvGeom::conv_same(7, 4, 1, 256, 5, 2, 1, 1),
      ConvGeom::conv_same(7, 4, 16, 8, 3, 3, 2, 1),
      ConvGeom::conv_valid(6, 5, 3, 4, 3, 2, 2, 2),
      ConvGeom::convt_same(7, 4, 32, 16, 5, 2, 1, 1),
      ConvGeom::convt_same(3, 2, 4, 3, 3, 2, 2, 2),
  };
  bool transpose[] = {false, false, false, true, true};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const ConvGeom& g = cases[c];
    int n = 3;
    std::vector<double> x = random_vec(1LL * n * g.in_h * g.in_w * g.in_c, rng);
    std::vector<double> w = random_vec(g.weight_count(), rng);
    std::vector<double> b = random_vec(g.out_c, rng);
    std::size_t ylen = 1LL * n * g.out_h * g.out_w * g.out_c;
    std::vector<double> y1(ylen), y2(ylen);
    std::vector<double> dy = random_vec(ylen, rng);
    std::vector<double> dx1(x.size()), dx2(x.size());
    std::vector<double> dw1(w.size()), dw2(w.size()), db1(g.out_c), db2(g.out_c);
    if (!transpose[c]) {
      kref::conv2d_forward(g, n, x.data(), w.data(), b.data(), y1.data());
      komp::conv2d_forward(g, n, x.data(), w.data(), b.data(), y2.data());
      kref::conv2d_dinput(g, n, dy.data(), w.data(), dx1.data());
      komp::conv2d_dinput(g, n, dy.data(), w.data(), dx2.data());
      kref::conv2d_dparams(g, n, x.data(), dy.data(), dw1.data(), db1.data());
      komp::conv2d_dparams(g, n, x.data(), dy.data(), dw2.data(), db2.data());
    } else {
      kref::convt_forward(g, n, x.data(), w.data(), b.data(), y1.data());
      komp::convt_forward(g, n, x.data(), w.data(), b.data(), y2.data());
      kref::convt_dinput(g, n, dy.data(), w.data(), dx1.data());
      komp::convt_dinput(g, n, dy.data(), w.data(), dx2.data());
      kref::convt_dparams(g, n, x.data(), dy.data(), dw1.data(), db1.data());
      komp::convt_dparams(g, n, x.data(), dy.data(), dw2.data(), db2.data());
    }
    CHECK(bits_equal(y1, y2));
    CHECK(bits_equal(dx1, dx2));
    CHECK(bits_equal(dw1, dw2));
    CHECK(bits_equal(db1, db2));
  }
}

TEST_CASE("kernels: maxpool bit-identical and argmax consistent") {
  Rng rng(103);
  PoolGeom g = PoolGeom::valid(4, 4, 8, 2, 4);
  int n = 5;
  std::vector<double> x = random_vec(1LL * n * g.in_h * g.in_w * g.c, rng);
  std::size_t ylen = 1LL * n * g.out_h * g.out_w * g.c;
  std::vector<double> y1(ylen), y2(ylen);
  std::vector<int> a1(ylen), a2(ylen);
  kref::maxpool_forward(g, n, x.data(), y1.data(), a1.data());
  komp::maxpool_forward(g, n, x.data(), y2.data(), a2.data());
  CHECK(bits_equal(y1, y2));
  CHECK(a1 == a2);
  for (std::size_t k = 0; k < ylen; ++k) CHECK(x[a1[k]] == y1[k]);

  std::vector<double> dy = random_vec(ylen, rng);
  std::vector<double> dx1(x.size()), dx2(x.size());
  kref::maxpool_dinput(g, n, dy.data(), a1.data(), dx1.data());
  komp::maxpool_dinput(g, n, dy.data(), a2.data(), dx2.data());
  CHECK(bits_equal(dx1, dx2));
}

TEST_CASE("kernels: geometry follows the shape algebra") {
  ConvGeom same = ConvGeom::conv_same(7, 4, 1, 256, 5, 2, 1, 1);
  CHECK(same.out_h == 7);
  CHECK(same.out_w == 4);
  ConvGeom strided = ConvGeom::conv_same(7, 4, 1, 4, 3, 3, 2, 1);
  CHECK(strided.out_h == 4);  // ceil(7/2)
  CHECK(strided.out_w == 4);  // ceil(4/1)
  ConvGeom valid = ConvGeom::conv_valid(7, 4, 1, 4, 3, 3, 2, 1);
  CHECK(valid.out_h == 3);  // floor((7-3)/2)+1
  CHECK(valid.out_w == 2);
  ConvGeom t = ConvGeom::convt_same(7, 4, 8, 2, 5, 2, 1, 1);
  CHECK(t.out_h == 7);
  CHECK(t.out_w == 4);
  ConvGeom t2 = ConvGeom::convt_same(3, 2, 1, 1, 3, 3, 2, 2);
  CHECK(t2.out_h == 6);  // in * stride
  CHECK(t2.out_w == 4);
}

TEST_CASE("kernels: dispatch switch routes to both implementations") {
  CHECK(parallel_in_use());
  use_parallel(false);
  CHECK_FALSE(parallel_in_use());
  Rng rng(104);
  std::vector<double> x = random_vec(6, rng), w = random_vec(6, rng), b = random_vec(2, rng);
  std::vector<double> y1(4), y2(4);
  dense_forward(2, 3, 2, x.data(), w.data(), b.data(), y1.data());
  use_parallel(true);
  dense_forward(2, 3, 2, x.data(), w.data(), b.data(), y2.data());
  CHECK(bits_equal(y1, y2));
}
