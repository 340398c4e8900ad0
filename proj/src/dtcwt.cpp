#include "wdfp/dtcwt.hpp"

#include <cmath>
#include <string>

namespace wdfp {
namespace {

using Taps = std::vector<double>;

// near_sym_b, level 1 (odd length, zero phase).
const Taps kH0o{-0.0017578125, 0.0,         0.022265625,   -0.046875, -0.0482421875,
                0.296875,      0.55546875,  0.296875,      -0.0482421875, -0.046875,
                0.022265625,   0.0,         -0.0017578125};
const Taps kH1o{-7.062639508928571e-05, 0.0,                   0.0013419015066964285,
                -0.0018833705357142855, -0.007156808035714285, 0.023856026785714284,
                0.05564313616071428,    -0.05168805803571428,  -0.29975760323660716,
                0.5594308035714286,     -0.29975760323660716,  -0.05168805803571428,
                0.05564313616071428,    0.023856026785714284,  -0.007156808035714285,
                -0.0018833705357142855, 0.0013419015066964285, 0.0,
                -7.062639508928571e-05};
const Taps kG0o{7.062639508928571e-05,  0.0,                    -0.0013419015066964285,
                -0.0018833705357142855, 0.007156808035714285,   0.023856026785714284,
                -0.05564313616071428,   -0.05168805803571428,   0.29975760323660716,
                0.5594308035714286,     0.29975760323660716,    -0.05168805803571428,
                -0.05564313616071428,   0.023856026785714284,   0.007156808035714285,
                -0.0018833705357142855, -0.0013419015066964285, 0.0,
                7.062639508928571e-05};
const Taps kG1o{-0.0017578125, -0.0,        0.022265625, 0.046875, -0.0482421875,
                -0.296875,     0.55546875,  -0.296875,   -0.0482421875, 0.046875,
                0.022265625,   -0.0,        -0.0017578125};

// qshift_b, levels >= 2 (14 taps). The b filters are the a filters reversed.
const Taps kH0a{0.003253142763653182,   -0.00388321199915849, 0.03466034684485349,
                -0.03887280126882779,   -0.11720388769911527, 0.27529538466888204,
                0.7561456438925225,     0.5688104207121227,   0.011866092033797,
                -0.1067118046866654,    0.023825384794920298, 0.01702522388155399,
                -0.005439475937274115,  -0.004556895628475491};
const Taps kH1a{-0.004556895628475491, 0.005439475937274115, 0.01702522388155399,
                -0.023825384794920298, -0.1067118046866654,  -0.011866092033797,
                0.5688104207121227,    -0.7561456438925225,  0.27529538466888204,
                0.11720388769911527,   -0.03887280126882779, -0.03466034684485349,
                -0.00388321199915849,  -0.003253142763653182};

Taps reversed(const Taps& t) { return Taps(t.rbegin(), t.rend()); }

struct QshiftBank {
  Taps h0a, h0b, h1a, h1b, g0a, g0b, g1a, g1b;
};

const QshiftBank& qshift() {
  static const QshiftBank bank = [] {
    QshiftBank q;
    q.h0a = kH0a;
    q.h0b = reversed(kH0a);
    q.h1a = kH1a;
    q.h1b = reversed(kH1a);
    // Synthesis filters are the time reverses of the analysis ones.
    q.g0a = q.h0b;
    q.g0b = q.h0a;
    q.g1a = q.h1b;
    q.g1b = q.h1a;
    return q;
  }();
  return bank;
}

// Half-sample symmetric reflection: ... b a | a b c ... c | c b ...
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t period = 2 * m;
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  return static_cast<std::size_t>(k < m ? k : period - 1 - k);
}

inline void axpy(std::span<double> dst, double a, std::span<const double> src) {
  for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += a * src[c];
}

// Undecimated column filter with an odd-length kernel; output aligned with input.
ImagePlane colfilter(const ImagePlane& x, const Taps& h) {
  const std::size_t r = x.rows();
  const auto m2 = static_cast<std::ptrdiff_t>(h.size() / 2);
  ImagePlane y(r, x.cols());
  for (std::size_t k = 0; k < r; ++k) {
    auto dst = y.row(k);
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
      if (h[idx] == 0.0) continue;
      const auto src = static_cast<std::ptrdiff_t>(k) + m2 - static_cast<std::ptrdiff_t>(idx);
      axpy(dst, h[idx], x.row(reflect(src, r)));
    }
  }
  return y;
}

double dot(const Taps& a, const Taps& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Decimating column filter for the Q-shift pair; output has rows/2 rows with
// the two trees interleaved.
ImagePlane coldfilt(const ImagePlane& x, const Taps& ha, const Taps& hb) {
  const std::size_t r = x.rows();
  if (r % 4 != 0) throw Error(ErrorCode::BadDimensions, "coldfilt needs rows divisible by 4");
  const auto m = static_cast<std::ptrdiff_t>(ha.size());
  const std::size_t half_taps = ha.size() / 2;
  const std::size_t r2 = r / 2;
  const bool same_sign = dot(ha, hb) > 0;
  ImagePlane y(r2, x.cols());

  // Row of the symmetrically extended signal; ext index i maps to x[i - m].
  auto ext = [&](std::ptrdiff_t i) { return x.row(reflect(i - m, r)); };
  auto t = [](std::ptrdiff_t n) { return 5 + 4 * n; };

  for (std::size_t k = 0; k < r2 / 2; ++k) {
    auto ya = y.row(same_sign ? 2 * k : 2 * k + 1);
    auto yb = y.row(same_sign ? 2 * k + 1 : 2 * k);
    for (std::size_t idx = 0; idx < half_taps; ++idx) {
      const std::ptrdiff_t tn = t(static_cast<std::ptrdiff_t>(k + half_taps - 1 - idx));
      axpy(ya, ha[2 * idx], ext(tn - 1));
      axpy(ya, ha[2 * idx + 1], ext(tn - 3));
      axpy(yb, hb[2 * idx], ext(tn));
      axpy(yb, hb[2 * idx + 1], ext(tn - 2));
    }
  }
  return y;
}

// Interpolating column filter inverse to coldfilt; output has 2*rows rows.
ImagePlane colifilt(const ImagePlane& x, const Taps& ha, const Taps& hb) {
  const std::size_t r = x.rows();
  if (r % 2 != 0) throw Error(ErrorCode::BadDimensions, "colifilt needs an even row count");
  const std::size_t m = ha.size();
  const std::size_t half_taps = m / 2;
  if (half_taps % 2 == 0) throw Error(ErrorCode::BadDimensions, "unsupported Q-shift length");
  const auto m2 = static_cast<std::ptrdiff_t>(half_taps);
  const bool same_sign = dot(ha, hb) > 0;
  ImagePlane y(2 * r, x.cols());

  auto ext = [&](std::ptrdiff_t i) { return x.row(reflect(i - m2, r)); };
  auto t = [](std::ptrdiff_t n) { return 2 + 2 * n; };
  auto ta = [&](std::ptrdiff_t n) { return same_sign ? t(n) : t(n) - 1; };
  auto tb = [&](std::ptrdiff_t n) { return same_sign ? t(n) - 1 : t(n); };

  for (std::size_t k = 0; k < r / 2; ++k) {
    auto y0 = y.row(4 * k);
    auto y1 = y.row(4 * k + 1);
    auto y2 = y.row(4 * k + 2);
    auto y3 = y.row(4 * k + 3);
    for (std::size_t idx = 0; idx < half_taps; ++idx) {
      const auto n = static_cast<std::ptrdiff_t>(k + half_taps - 1 - idx);
      const auto xb = ext(tb(n));
      const auto xa = ext(ta(n));
      axpy(y0, ha[2 * idx], xb);
      axpy(y1, hb[2 * idx], xa);
      axpy(y2, ha[2 * idx + 1], xb);
      axpy(y3, hb[2 * idx + 1], xa);
    }
  }
  return y;
}

template <typename ColOp>
ImagePlane along_rows(const ImagePlane& x, ColOp op) {
  return transpose(op(transpose(x)));
}

ImagePlane rowfilter(const ImagePlane& x, const Taps& h) {
  return along_rows(x, [&](const ImagePlane& t) { return colfilter(t, h); });
}
ImagePlane rowdfilt(const ImagePlane& x, const Taps& ha, const Taps& hb) {
  return along_rows(x, [&](const ImagePlane& t) { return coldfilt(t, ha, hb); });
}
ImagePlane rowifilt(const ImagePlane& x, const Taps& ha, const Taps& hb) {
  return along_rows(x, [&](const ImagePlane& t) { return colifilt(t, ha, hb); });
}

void add_into(ImagePlane& acc, const ImagePlane& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += other.data()[i];
}

// Quad (2x2 block) to complex pair: tree 1 gets p - q, tree 2 gets p + q.
void q2c(const ImagePlane& y, ComplexPlane& tree1, ComplexPlane& tree2) {
  const double s = std::sqrt(0.5);
  const std::size_t rows = y.rows() / 2, cols = y.cols() / 2;
  tree1 = ComplexPlane(rows, cols);
  tree2 = ComplexPlane(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::complex<double> p(y(2 * r, 2 * c) * s, y(2 * r, 2 * c + 1) * s);
      const std::complex<double> q(y(2 * r + 1, 2 * c + 1) * s, -y(2 * r + 1, 2 * c) * s);
      tree1(r, c) = p - q;
      tree2(r, c) = p + q;
    }
  }
}

ImagePlane c2q(const ComplexPlane& tree1, const ComplexPlane& tree2) {
  const double s = std::sqrt(0.5);
  ImagePlane x(tree1.rows() * 2, tree1.cols() * 2);
  for (std::size_t r = 0; r < tree1.rows(); ++r) {
    for (std::size_t c = 0; c < tree1.cols(); ++c) {
      const std::complex<double> p = tree1(r, c) * s + tree2(r, c) * s;
      const std::complex<double> q = tree1(r, c) * s - tree2(r, c) * s;
      x(2 * r, 2 * c) = p.real();
      x(2 * r, 2 * c + 1) = p.imag();
      x(2 * r + 1, 2 * c) = q.imag();
      x(2 * r + 1, 2 * c + 1) = -q.real();
    }
  }
  return x;
}

void split_bands(const ImagePlane& horizontal, const ImagePlane& vertical,
                 const ImagePlane& diagonal, DtcwtLevel& out) {
  using B = DtcwtBand;
  q2c(horizontal, out[std::size_t(B::H1)], out[std::size_t(B::H2)]);
  q2c(vertical, out[std::size_t(B::V1)], out[std::size_t(B::V2)]);
  q2c(diagonal, out[std::size_t(B::D1)], out[std::size_t(B::D2)]);
}

void check_dims(std::size_t rows, std::size_t cols, int levels) {
  if (levels < 1 || levels > 30) throw Error(ErrorCode::BadDimensions, "DTCWT level count out of range");
  const std::size_t block = std::size_t{1} << levels;
  if (rows == 0 || cols == 0 || rows % block != 0 || cols % block != 0) {
    throw Error(ErrorCode::BadDimensions, std::to_string(rows) + "x" + std::to_string(cols) +
                                              " is not divisible by 2^" + std::to_string(levels));
  }
}

}  // namespace

DtcwtPyramid dtcwt_forward(const ImagePlane& plane, int levels) {
  check_dims(plane.rows(), plane.cols(), levels);
  DtcwtPyramid out;
  out.rows = plane.rows();
  out.cols = plane.cols();
  out.levels.resize(levels);

  ImagePlane lo = colfilter(plane, kH0o);
  ImagePlane hi = colfilter(plane, kH1o);
  ImagePlane lolo = rowfilter(lo, kH0o);
  split_bands(rowfilter(hi, kH0o), rowfilter(lo, kH1o), rowfilter(hi, kH1o), out.levels[0]);

  const QshiftBank& q = qshift();
  for (int j = 1; j < levels; ++j) {
    lo = coldfilt(lolo, q.h0b, q.h0a);
    hi = coldfilt(lolo, q.h1b, q.h1a);
    lolo = rowdfilt(lo, q.h0b, q.h0a);
    split_bands(rowdfilt(hi, q.h0b, q.h0a), rowdfilt(lo, q.h1b, q.h1a),
                rowdfilt(hi, q.h1b, q.h1a), out.levels[j]);
  }
  out.lowpass = std::move(lolo);
  return out;
}

ImagePlane dtcwt_inverse(const DtcwtPyramid& pyramid) {
  const int levels = pyramid.depth();
  check_dims(pyramid.rows, pyramid.cols, levels);
  for (int j = 0; j < levels; ++j) {
    const std::size_t r = pyramid.rows >> (j + 1), c = pyramid.cols >> (j + 1);
    for (const ComplexPlane& band : pyramid.levels[j]) {
      if (band.rows() != r || band.cols() != c) {
        throw Error(ErrorCode::InconsistentPyramid,
                    "level " + std::to_string(j + 1) + " band is " + std::to_string(band.rows()) +
                        "x" + std::to_string(band.cols()) + ", expected " + std::to_string(r) +
                        "x" + std::to_string(c));
      }
    }
  }
  const std::size_t low_r = pyramid.rows >> (levels - 1), low_c = pyramid.cols >> (levels - 1);
  if (pyramid.lowpass.rows() != low_r || pyramid.lowpass.cols() != low_c) {
    throw Error(ErrorCode::InconsistentPyramid, "lowpass size does not match the band layout");
  }

  using B = DtcwtBand;
  auto quads = [](const DtcwtLevel& lv, B a, B b) {
    return c2q(lv[std::size_t(a)], lv[std::size_t(b)]);
  };

  const QshiftBank& q = qshift();
  ImagePlane z = pyramid.lowpass;
  for (int j = levels - 1; j >= 1; --j) {
    const DtcwtLevel& lv = pyramid.levels[j];
    const ImagePlane lh = quads(lv, B::H1, B::H2);
    const ImagePlane hl = quads(lv, B::V1, B::V2);
    const ImagePlane hh = quads(lv, B::D1, B::D2);
    ImagePlane y1 = colifilt(z, q.g0b, q.g0a);
    add_into(y1, colifilt(lh, q.g1b, q.g1a));
    ImagePlane y2 = colifilt(hl, q.g0b, q.g0a);
    add_into(y2, colifilt(hh, q.g1b, q.g1a));
    z = rowifilt(y1, q.g0b, q.g0a);
    add_into(z, rowifilt(y2, q.g1b, q.g1a));
  }

  const DtcwtLevel& lv = pyramid.levels[0];
  ImagePlane y1 = colfilter(z, kG0o);
  add_into(y1, colfilter(quads(lv, B::H1, B::H2), kG1o));
  ImagePlane y2 = colfilter(quads(lv, B::V1, B::V2), kG0o);
  add_into(y2, colfilter(quads(lv, B::D1, B::D2), kG1o));
  z = rowfilter(y1, kG0o);
  add_into(z, rowfilter(y2, kG1o));
  return z;
}

}  // namespace wdfp
