#include "tdas/transforms.hpp"

#include <algorithm>
#include <cctype>

#include "tdas/error.hpp"
#include "tdas/fft.hpp"
#include "tdas/noise.hpp"

namespace tdas {

namespace {

// Columns are processed in blocks gathered into contiguous scratch so the
// strided walk touches each cache line once per block. The block is sized to
// stay resident in L2 next to its mask block.
constexpr std::size_t kBlockBytes = std::size_t{1} << 17;

std::size_t column_block(std::size_t h, std::size_t elem) {
  return std::clamp<std::size_t>(kBlockBytes / (h * elem), 8, 64);
}

enum class Direction { Forward, Inverse };

// Transforms count vectors of length n laid out at base + i * stride, two at a time.
void dct_many(const DctPlan& plan, double* base, std::size_t count, std::size_t stride, Direction dir,
              cplx* scratch) {
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    double* a = base + i * stride;
    double* b = a + stride;
    if (dir == Direction::Forward)
      plan.forward_pair(a, b, a, b, scratch);
    else
      plan.inverse_pair(a, b, a, b, scratch);
  }
  if (i < count) {
    double* a = base + i * stride;
    if (dir == Direction::Forward)
      plan.forward(a, a, scratch);
    else
      plan.inverse(a, a, scratch);
  }
}

void dct_rows_plane(double* plane, std::size_t h, std::size_t w, Direction dir) {
  std::vector<cplx> scratch(w);
  dct_many(*DctPlan::get(w), plane, h, w, dir, scratch.data());
}

void dct_cols_plane(double* plane, std::size_t h, std::size_t w, Direction dir) {
  const auto plan = DctPlan::get(h);
  std::vector<cplx> scratch(h);
  const std::size_t kb = column_block(h, sizeof(double));
  std::vector<double> block(kb * h);
  for (std::size_t c0 = 0; c0 < w; c0 += kb) {
    const std::size_t nb = std::min(kb, w - c0);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t b = 0; b < nb; ++b) block[b * h + r] = plane[r * w + c0 + b];
    dct_many(*plan, block.data(), nb, h, dir, scratch.data());
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t b = 0; b < nb; ++b) plane[r * w + c0 + b] = block[b * h + r];
  }
}

void fft_rows(cplx* plane, std::size_t h, std::size_t w, Direction dir) {
  const auto plan = FftPlan::get(w);
  for (std::size_t r = 0; r < h; ++r) {
    if (dir == Direction::Forward)
      plan->forward(plane + r * w);
    else
      plan->backward(plane + r * w);
  }
}

void fft_cols(cplx* plane, std::size_t h, std::size_t w, Direction dir) {
  const auto plan = FftPlan::get(h);
  const std::size_t kb = column_block(h, sizeof(cplx));
  std::vector<cplx> block(kb * h);
  for (std::size_t c0 = 0; c0 < w; c0 += kb) {
    const std::size_t nb = std::min(kb, w - c0);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t b = 0; b < nb; ++b) block[b * h + r] = plane[r * w + c0 + b];
    for (std::size_t b = 0; b < nb; ++b) {
      if (dir == Direction::Forward)
        plan->forward(block.data() + b * h);
      else
        plan->backward(block.data() + b * h);
    }
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t b = 0; b < nb; ++b) plane[r * w + c0 + b] = block[b * h + r];
  }
}

template <class Fn>
Tensor per_channel(const Tensor& t, Fn&& fn) {
  Tensor out = t;
  for (std::size_t c = 0; c < t.channels(); ++c)
    fn(out.channel(c).data(), t.height(), t.width());
  return out;
}

}  // namespace

std::string to_string(TransformKind k) { return k == TransformKind::DCT ? "dct" : "dft"; }

TransformKind parse_transform(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dct") return TransformKind::DCT;
  if (lower == "dft") return TransformKind::DFT;
  throw DomainError("unknown transform '" + std::string(s) + "' (expected dct or dft)");
}

std::vector<double> dct1(std::span<const double> v) {
  if (v.empty()) throw DomainError("dct1: empty input");
  std::vector<double> out(v.begin(), v.end());
  std::vector<cplx> scratch(v.size());
  DctPlan::get(v.size())->forward(out.data(), out.data(), scratch.data());
  return out;
}

std::vector<double> idct1(std::span<const double> v) {
  if (v.empty()) throw DomainError("idct1: empty input");
  std::vector<double> out(v.begin(), v.end());
  std::vector<cplx> scratch(v.size());
  DctPlan::get(v.size())->inverse(out.data(), out.data(), scratch.data());
  return out;
}

Tensor dct_rows(const Tensor& t) {
  return per_channel(t, [](double* p, std::size_t h, std::size_t w) {
    dct_rows_plane(p, h, w, Direction::Forward);
  });
}

Tensor dct_cols(const Tensor& t) {
  return per_channel(t, [](double* p, std::size_t h, std::size_t w) {
    dct_cols_plane(p, h, w, Direction::Forward);
  });
}

Tensor dct2(const Tensor& t) {
  return per_channel(t, [](double* p, std::size_t h, std::size_t w) {
    dct_rows_plane(p, h, w, Direction::Forward);
    dct_cols_plane(p, h, w, Direction::Forward);
  });
}

Tensor idct2(const Tensor& t) {
  return per_channel(t, [](double* p, std::size_t h, std::size_t w) {
    dct_cols_plane(p, h, w, Direction::Inverse);
    dct_rows_plane(p, h, w, Direction::Inverse);
  });
}

SpectrumGrid dft2(const Tensor& t) {
  const std::size_t h = t.height(), w = t.width();
  SpectrumGrid s{Tensor(t.shape()), Tensor(t.shape())};
  std::vector<cplx> plane(h * w);
  for (std::size_t c = 0; c < t.channels(); ++c) {
    const auto in = t.channel(c);
    std::copy(in.begin(), in.end(), plane.begin());
    fft_rows(plane.data(), h, w, Direction::Forward);
    fft_cols(plane.data(), h, w, Direction::Forward);
    auto re = s.re.channel(c);
    auto im = s.im.channel(c);
    for (std::size_t i = 0; i < h * w; ++i) {
      re[i] = plane[i].real();
      im[i] = plane[i].imag();
    }
  }
  return s;
}

Tensor idft2_real(const SpectrumGrid& s) {
  require_same(s.re.shape(), s.im.shape(), "idft2_real");
  const std::size_t h = s.re.height(), w = s.re.width();
  Tensor out(s.re.shape());
  std::vector<cplx> plane(h * w);
  const double inv = 1.0 / static_cast<double>(h * w);
  for (std::size_t c = 0; c < out.channels(); ++c) {
    const auto re = s.re.channel(c);
    const auto im = s.im.channel(c);
    for (std::size_t i = 0; i < h * w; ++i) plane[i] = cplx(re[i], im[i]);
    fft_cols(plane.data(), h, w, Direction::Inverse);
    fft_rows(plane.data(), h, w, Direction::Inverse);
    auto o = out.channel(c);
    for (std::size_t i = 0; i < h * w; ++i) o[i] = plane[i].real() * inv;
  }
  return out;
}

namespace {

constexpr std::size_t kTileRows = 32;

// Block leading dimension: padded so consecutive columns do not alias in cache.
std::size_t padded(std::size_t h) { return h + 8; }

// dst[b * ld + r] = src[r * w + c0 + b] (times scale, if given) for r < h, b < nb.
// Here w is the row stride of src.
// Rows are taken in tiles of kTileRows so writes stay contiguous.
template <class T>
void gather_cols(const T* src, const double* scale, std::size_t w, std::size_t h, std::size_t c0,
                 std::size_t nb, T* dst, std::size_t ld) {
  for (std::size_t r0 = 0; r0 < h; r0 += kTileRows) {
    const std::size_t r1 = std::min(r0 + kTileRows, h);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t r = r0; r < r1; ++r) {
        const std::size_t i = r * w + c0 + b;
        dst[b * ld + r] = scale ? src[i] * scale[i] : src[i];
      }
  }
}

template <class Src, class Dst, class Fn>
void scatter_cols(const Src* src, std::size_t ld, std::size_t w, std::size_t h, std::size_t c0, std::size_t nb,
                  Dst* dst, Fn&& convert) {
  for (std::size_t r0 = 0; r0 < h; r0 += kTileRows) {
    const std::size_t r1 = std::min(r0 + kTileRows, h);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t r = r0; r < r1; ++r) dst[r * w + c0 + b] = convert(src[b * ld + r]);
  }
}

void dct_filter_plane(const double* x, const double* scale, const double* mask, double* out, std::size_t h,
                      std::size_t w) {
  const auto rows = DctPlan::get(w);
  const auto cols = DctPlan::get(h);
  std::vector<cplx> scratch(std::max(h, w));
  // Work on padded copies: with power-of-two row strides every row of a
  // column block lands in the same few cache sets.
  const std::size_t lw = padded(w);
  std::vector<double> plane(h * lw), m(h * lw);
  for (std::size_t r0 = 0; r0 < h; r0 += 2) {
    const std::size_t nr = std::min<std::size_t>(2, h - r0);
    for (std::size_t r = r0; r < r0 + nr; ++r) {
      double* dst = plane.data() + r * lw;
      const std::size_t o = r * w;
      if (scale)
        for (std::size_t i = 0; i < w; ++i) dst[i] = scale[o + i] * x[o + i];
      else
        std::copy(x + o, x + o + w, dst);
      std::copy(mask + o, mask + o + w, m.data() + r * lw);
    }
    dct_many(*rows, plane.data() + r0 * lw, nr, lw, Direction::Forward, scratch.data());
  }
  const std::size_t kb = column_block(h, sizeof(double));
  const std::size_t ld = padded(h);
  std::vector<double> block(kb * ld), mblock(kb * ld);
  for (std::size_t c0 = 0; c0 < w; c0 += kb) {
    const std::size_t nb = std::min(kb, w - c0);
    gather_cols<double>(plane.data(), nullptr, lw, h, c0, nb, block.data(), ld);
    gather_cols<double>(m.data(), nullptr, lw, h, c0, nb, mblock.data(), ld);
    dct_many(*cols, block.data(), nb, ld, Direction::Forward, scratch.data());
    for (std::size_t i = 0; i < nb * ld; ++i) block[i] *= mblock[i];
    dct_many(*cols, block.data(), nb, ld, Direction::Inverse, scratch.data());
    scatter_cols(block.data(), ld, lw, h, c0, nb, plane.data(), [](double v) { return v; });
  }
  for (std::size_t r0 = 0; r0 < h; r0 += 2) {
    const std::size_t nr = std::min<std::size_t>(2, h - r0);
    dct_many(*rows, plane.data() + r0 * lw, nr, lw, Direction::Inverse, scratch.data());
    for (std::size_t r = r0; r < r0 + nr; ++r)
      std::copy(plane.data() + r * lw, plane.data() + r * lw + w, out + r * w);
  }
}

void dft_filter_plane(const double* x, const double* scale, const double* mask, double* out, std::size_t h,
                      std::size_t w) {
  const auto rows = FftPlan::get(w);
  const auto cols = FftPlan::get(h);
  const std::size_t lw = padded(w);
  std::vector<cplx> plane(h * lw);
  std::vector<cplx> z(w);
  auto value = [&](std::size_t i) { return scale ? scale[i] * x[i] : x[i]; };
  // Two real rows share one complex FFT: z = a + ib, A = (Z + conj Z-)/2, B = (Z - conj Z-)/2i.
  for (std::size_t r = 0; r < h; r += 2) {
    const bool pair = r + 1 < h;
    for (std::size_t i = 0; i < w; ++i) z[i] = cplx(value(r * w + i), pair ? value((r + 1) * w + i) : 0.0);
    rows->forward(z.data());
    cplx* a = plane.data() + r * lw;
    for (std::size_t k = 0; k < w; ++k) {
      const cplx zc = std::conj(z[k == 0 ? 0 : w - k]);
      a[k] = 0.5 * (z[k] + zc);
      if (pair) a[lw + k] = cplx(0.0, -0.5) * (z[k] - zc);
    }
  }
  const std::size_t kb = column_block(h, sizeof(cplx));
  const std::size_t ld = padded(h);
  std::vector<cplx> block(kb * ld);
  std::vector<double> mblock(kb * ld);
  for (std::size_t c0 = 0; c0 < w; c0 += kb) {
    const std::size_t nb = std::min(kb, w - c0);
    gather_cols<cplx>(plane.data(), nullptr, lw, h, c0, nb, block.data(), ld);
    gather_cols<double>(mask, nullptr, w, h, c0, nb, mblock.data(), ld);
    for (std::size_t b = 0; b < nb; ++b) {
      cplx* col = block.data() + b * ld;
      const double* m = mblock.data() + b * ld;
      cols->forward(col);
      for (std::size_t r = 0; r < h; ++r) col[r] *= m[r];
      cols->backward(col);
    }
    scatter_cols(block.data(), ld, lw, h, c0, nb, plane.data(), [](cplx v) { return v; });
  }
  // With a mask symmetric under (h, w) -> (-h, -w) every row spectrum is
  // Hermitian again, so pairs invert together as A + iB.
  const double inv = 1.0 / static_cast<double>(h * w);
  for (std::size_t r = 0; r < h; r += 2) {
    const bool pair = r + 1 < h;
    const cplx* a = plane.data() + r * lw;
    for (std::size_t k = 0; k < w; ++k) z[k] = pair ? a[k] + cplx(0.0, 1.0) * a[lw + k] : a[k];
    rows->backward(z.data());
    for (std::size_t i = 0; i < w; ++i) {
      out[r * w + i] = z[i].real() * inv;
      if (pair) out[(r + 1) * w + i] = z[i].imag() * inv;
    }
  }
}

bool conjugate_symmetric(const double* m, std::size_t h, std::size_t w) {
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      if (m[r * w + c] != m[((h - r) % h) * w + (w - c) % w]) return false;
  return true;
}

}  // namespace

Tensor spectral_filter(const Tensor& x, const Tensor* scale, const Tensor& mask, TransformKind kind) {
  require_same(x.shape(), mask.shape(), "spectral_filter mask");
  if (scale) require_same(x.shape(), scale->shape(), "spectral_filter scale");
  Tensor out(x.shape());
  const std::size_t h = x.height(), w = x.width();
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double* s = scale ? scale->channel(c).data() : nullptr;
    const double* m = mask.channel(c).data();
    if (kind == TransformKind::DCT) {
      dct_filter_plane(x.channel(c).data(), s, m, out.channel(c).data(), h, w);
    } else if (conjugate_symmetric(m, h, w)) {
      dft_filter_plane(x.channel(c).data(), s, m, out.channel(c).data(), h, w);
    } else {
      // The paired real transforms need a Hermitian result; take the long way.
      Tensor one({1, h, w});
      for (std::size_t i = 0; i < h * w; ++i) one[i] = s ? s[i] * x.channel(c)[i] : x.channel(c)[i];
      SpectrumGrid g = dft2(one);
      for (std::size_t i = 0; i < h * w; ++i) {
        g.re[i] *= m[i];
        g.im[i] *= m[i];
      }
      const Tensor back = idft2_real(g);
      std::copy(back.values().begin(), back.values().end(), out.channel(c).begin());
    }
  }
  return out;
}

PermutationMap::PermutationMap(Shape shape, std::uint64_t seed) : shape_(shape), perm_(shape.size()) {
  require_valid(shape);
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  NoiseSource src(seed);
  for (std::size_t i = perm_.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(src.next_u64() % i);
    std::swap(perm_[i - 1], perm_[j]);
  }
}

Tensor PermutationMap::forward(const Tensor& x) const {
  require_same(shape_, x.shape(), "PermutationMap::forward");
  Tensor out(shape_);
  for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = x[perm_[i]];
  return out;
}

Tensor PermutationMap::inverse(const Tensor& x) const {
  require_same(shape_, x.shape(), "PermutationMap::inverse");
  Tensor out(shape_);
  for (std::size_t i = 0; i < perm_.size(); ++i) out[perm_[i]] = x[i];
  return out;
}

}  // namespace tdas
