#include "gaic/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace gaic::nn {

namespace {

constexpr double kNormEps = 1e-8;
constexpr double kDegenerateVar = 1e-12;

std::string shape_str(const Tensor& t) {
  std::string s = "{";
  for (size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.shape[i]);
  }
  return s + "}";
}

void require_4d(const TensorPtr& t, const char* who) {
  if (t->ndim() != 4)
    throw Error(std::string(who) + ": expected a 4-d tensor, got " +
                shape_str(*t));
}

bool any_requires_grad(std::span<const TensorPtr> ts) {
  for (const auto& t : ts)
    if (t->requires_grad) return true;
  return false;
}

// C[M,N] += A[M,K] * B[K,N]
void gemm_acc(double* C, const double* A, const double* B, int M, int K,
              int N) {
  for (int i = 0; i < M; ++i) {
    double* c = C + static_cast<size_t>(i) * N;
    const double* a = A + static_cast<size_t>(i) * K;
    for (int k = 0; k < K; ++k) {
      const double av = a[k];
      if (av == 0.0) continue;
      const double* b = B + static_cast<size_t>(k) * N;
      for (int j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

// C[M,K] += A[M,N] * B[K,N]^T  (dot products of contiguous rows)
void gemm_acc_nt(double* C, const double* A, const double* B, int M, int N,
                 int K) {
  for (int i = 0; i < M; ++i) {
    const double* a = A + static_cast<size_t>(i) * N;
    double* c = C + static_cast<size_t>(i) * K;
    for (int k = 0; k < K; ++k) {
      const double* b = B + static_cast<size_t>(k) * N;
      double acc = 0.0;
      for (int j = 0; j < N; ++j) acc += a[j] * b[j];
      c[k] += acc;
    }
  }
}

// C[K,N] += A[M,K]^T * B[M,N]
void gemm_acc_tn(double* C, const double* A, const double* B, int M, int K,
                 int N) {
  for (int m = 0; m < M; ++m) {
    const double* a = A + static_cast<size_t>(m) * K;
    const double* b = B + static_cast<size_t>(m) * N;
    for (int k = 0; k < K; ++k) {
      const double av = a[k];
      if (av == 0.0) continue;
      double* c = C + static_cast<size_t>(k) * N;
      for (int j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

struct ConvDims {
  int batch, in_c, in_h, in_w;
  int out_c, k_h, k_w;
  int out_h, out_w;
  int stride, pad;
  int patch_len() const { return in_c * k_h * k_w; }
  int out_pix() const { return out_h * out_w; }
};

ConvDims conv_dims(const TensorPtr& input, const TensorPtr& weights,
                   int stride, int padding) {
  require_4d(input, "conv2d input");
  require_4d(weights, "conv2d weights");
  if (stride < 1) throw Error("conv2d: stride must be >= 1");
  if (padding < 0) throw Error("conv2d: padding must be >= 0");
  ConvDims d{};
  d.batch = input->dim(0);
  d.in_c = input->dim(1);
  d.in_h = input->dim(2);
  d.in_w = input->dim(3);
  d.out_c = weights->dim(0);
  d.k_h = weights->dim(2);
  d.k_w = weights->dim(3);
  d.stride = stride;
  d.pad = padding;
  if (weights->dim(1) != d.in_c)
    throw Error("conv2d: weight channels " + std::to_string(weights->dim(1)) +
                " do not match input channels " + std::to_string(d.in_c));
  d.out_h = (d.in_h + 2 * padding - d.k_h) / stride + 1;
  d.out_w = (d.in_w + 2 * padding - d.k_w) / stride + 1;
  if (d.in_h + 2 * padding < d.k_h || d.in_w + 2 * padding < d.k_w)
    throw Error("conv2d: kernel " + std::to_string(d.k_h) + "x" +
                std::to_string(d.k_w) + " exceeds padded input " +
                std::to_string(d.in_h + 2 * padding) + "x" +
                std::to_string(d.in_w + 2 * padding));
  return d;
}

// Patch matrix layout: col[(c*k_h + kh)*k_w + kw][oh*out_w + ow].
void im2col(const double* in, const ConvDims& d, double* col) {
  const int P = d.out_pix();
  for (int c = 0; c < d.in_c; ++c) {
    const double* in_c = in + static_cast<size_t>(c) * d.in_h * d.in_w;
    for (int kh = 0; kh < d.k_h; ++kh) {
      for (int kw = 0; kw < d.k_w; ++kw) {
        double* row =
            col + (static_cast<size_t>(c) * d.k_h * d.k_w + kh * d.k_w + kw) *
                      P;
        for (int oh = 0; oh < d.out_h; ++oh) {
          const int ih = oh * d.stride - d.pad + kh;
          double* dst = row + static_cast<size_t>(oh) * d.out_w;
          if (ih < 0 || ih >= d.in_h) {
            std::memset(dst, 0, sizeof(double) * d.out_w);
            continue;
          }
          const double* src = in_c + static_cast<size_t>(ih) * d.in_w;
          for (int ow = 0; ow < d.out_w; ++ow) {
            const int iw = ow * d.stride - d.pad + kw;
            dst[ow] = (iw >= 0 && iw < d.in_w) ? src[iw] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvDims& d, double* in_grad) {
  const int P = d.out_pix();
  for (int c = 0; c < d.in_c; ++c) {
    double* g_c = in_grad + static_cast<size_t>(c) * d.in_h * d.in_w;
    for (int kh = 0; kh < d.k_h; ++kh) {
      for (int kw = 0; kw < d.k_w; ++kw) {
        const double* row =
            col + (static_cast<size_t>(c) * d.k_h * d.k_w + kh * d.k_w + kw) *
                      P;
        for (int oh = 0; oh < d.out_h; ++oh) {
          const int ih = oh * d.stride - d.pad + kh;
          if (ih < 0 || ih >= d.in_h) continue;
          double* dst = g_c + static_cast<size_t>(ih) * d.in_w;
          const double* src = row + static_cast<size_t>(oh) * d.out_w;
          for (int ow = 0; ow < d.out_w; ++ow) {
            const int iw = ow * d.stride - d.pad + kw;
            if (iw >= 0 && iw < d.in_w) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

struct AxisSample {
  int lo = 0, hi = 0;
  double frac = 0.0;
};

// Sample positions start + (i + 0.5) * scale - 0.5, clamped to [0, in - 1].
std::vector<AxisSample> linear_samples(int out, double start, double scale,
                                       int in_extent) {
  std::vector<AxisSample> s(static_cast<size_t>(out));
  for (int i = 0; i < out; ++i) {
    double c = start + (i + 0.5) * scale - 0.5;
    c = std::min(std::max(c, 0.0), static_cast<double>(in_extent - 1));
    const int lo = static_cast<int>(c);
    s[i].lo = lo;
    s[i].hi = std::min(lo + 1, in_extent - 1);
    s[i].frac = c - lo;
  }
  return s;
}

// Shared bilinear gather/scatter over per-axis tables.
TensorPtr sample_grid(Tape* tape, const TensorPtr& x,
                      const std::vector<AxisSample>& rows,
                      const std::vector<AxisSample>& cols) {
  const int batch = x->dim(0), ch = x->dim(1);
  const int in_h = x->dim(2), in_w = x->dim(3);
  const int out_h = static_cast<int>(rows.size());
  const int out_w = static_cast<int>(cols.size());
  auto out = make_tensor({batch, ch, out_h, out_w}, x->requires_grad);
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < ch; ++c) {
      const double* src =
          x->value.data() + (static_cast<size_t>(n) * ch + c) * in_h * in_w;
      double* dst = out->value.data() +
                    (static_cast<size_t>(n) * ch + c) * out_h * out_w;
      for (int r = 0; r < out_h; ++r) {
        const AxisSample& ar = rows[r];
        const double* r0 = src + static_cast<size_t>(ar.lo) * in_w;
        const double* r1 = src + static_cast<size_t>(ar.hi) * in_w;
        for (int q = 0; q < out_w; ++q) {
          const AxisSample& ac = cols[q];
          const double top = r0[ac.lo] + ac.frac * (r0[ac.hi] - r0[ac.lo]);
          const double bot = r1[ac.lo] + ac.frac * (r1[ac.hi] - r1[ac.lo]);
          dst[r * out_w + q] = top + ar.frac * (bot - top);
        }
      }
    }
  }
  if (tape && out->requires_grad) {
    tape->record([x, out, rows, cols, batch, ch, in_h, in_w, out_h, out_w] {
      if (out->grad.empty() || !x->requires_grad) return;
      x->ensure_grad();
      for (int n = 0; n < batch; ++n) {
        for (int c = 0; c < ch; ++c) {
          double* gx = x->grad.data() +
                       (static_cast<size_t>(n) * ch + c) * in_h * in_w;
          const double* go = out->grad.data() +
                             (static_cast<size_t>(n) * ch + c) * out_h * out_w;
          for (int r = 0; r < out_h; ++r) {
            const AxisSample& ar = rows[r];
            for (int q = 0; q < out_w; ++q) {
              const AxisSample& ac = cols[q];
              const double g = go[r * out_w + q];
              const double w00 = (1.0 - ar.frac) * (1.0 - ac.frac);
              const double w01 = (1.0 - ar.frac) * ac.frac;
              const double w10 = ar.frac * (1.0 - ac.frac);
              const double w11 = ar.frac * ac.frac;
              gx[ar.lo * in_w + ac.lo] += w00 * g;
              gx[ar.lo * in_w + ac.hi] += w01 * g;
              gx[ar.hi * in_w + ac.lo] += w10 * g;
              gx[ar.hi * in_w + ac.hi] += w11 * g;
            }
          }
        }
      }
    });
  }
  return out;
}

struct FeatureRect {
  double x1, y1, x2, y2;
};

FeatureRect map_crop_to_features(const CropRect& crop,
                                 const ImageDims& image_dims,
                                 int feature_stride, int fm_h, int fm_w,
                                 const char* who) {
  validate_crop(crop, image_dims);
  if (feature_stride < 1)
    throw Error(std::string(who) + ": feature_stride must be >= 1");
  const double fs = static_cast<double>(feature_stride);
  FeatureRect r{crop.x1 / fs, crop.y1 / fs, crop.x2 / fs, crop.y2 / fs};
  if (r.x1 >= fm_h || r.y1 >= fm_w)
    throw Error(std::string(who) + ": crop maps outside the " +
                std::to_string(fm_h) + "x" + std::to_string(fm_w) +
                " feature map");
  return r;
}

}  // namespace

TensorPtr conv2d(Tape* tape, const TensorPtr& input, const TensorPtr& weights,
                 int stride, int padding) {
  const ConvDims d = conv_dims(input, weights, stride, padding);
  const int K = d.patch_len(), P = d.out_pix();
  auto out = make_tensor({d.batch, d.out_c, d.out_h, d.out_w},
                         input->requires_grad || weights->requires_grad);
  std::vector<double> col(static_cast<size_t>(K) * P);
  for (int n = 0; n < d.batch; ++n) {
    im2col(input->value.data() + static_cast<size_t>(n) * d.in_c * d.in_h *
                                     d.in_w,
           d, col.data());
    gemm_acc(out->value.data() + static_cast<size_t>(n) * d.out_c * P,
             weights->value.data(), col.data(), d.out_c, K, P);
  }
  if (tape && out->requires_grad) {
    tape->record([input, weights, out, d, K, P] {
      if (out->grad.empty()) return;
      std::vector<double> col(static_cast<size_t>(K) * P);
      std::vector<double> dcol;
      if (input->requires_grad) {
        input->ensure_grad();
        dcol.assign(static_cast<size_t>(K) * P, 0.0);
      }
      if (weights->requires_grad) weights->ensure_grad();
      for (int n = 0; n < d.batch; ++n) {
        const double* g_out =
            out->grad.data() + static_cast<size_t>(n) * d.out_c * P;
        if (weights->requires_grad) {
          im2col(input->value.data() + static_cast<size_t>(n) * d.in_c *
                                           d.in_h * d.in_w,
                 d, col.data());
          // dW[o,k] += sum_p g_out[o,p] * col[k,p]
          gemm_acc_nt(weights->grad.data(), g_out, col.data(), d.out_c, P, K);
        }
        if (input->requires_grad) {
          std::fill(dcol.begin(), dcol.end(), 0.0);
          // dcol[k,p] += sum_o W[o,k] * g_out[o,p]
          gemm_acc_tn(dcol.data(), weights->value.data(), g_out, d.out_c, K,
                      P);
          col2im_add(dcol.data(), d,
                     input->grad.data() + static_cast<size_t>(n) * d.in_c *
                                              d.in_h * d.in_w);
        }
      }
    });
  }
  return out;
}

TensorPtr relu(Tape* tape, const TensorPtr& x) {
  auto out = make_tensor(x->shape, x->requires_grad);
  const size_t n = x->value.size();
  for (size_t i = 0; i < n; ++i)
    out->value[i] = x->value[i] > 0.0 ? x->value[i] : 0.0;
  if (tape && out->requires_grad) {
    tape->record([x, out, n] {
      if (out->grad.empty() || !x->requires_grad) return;
      x->ensure_grad();
      for (size_t i = 0; i < n; ++i)
        if (x->value[i] > 0.0) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr channel_norm(Tape* tape, const TensorPtr& x, const TensorPtr& gamma,
                       const TensorPtr& shift) {
  require_4d(x, "channel_norm");
  const int batch = x->dim(0), ch = x->dim(1);
  const int spatial = x->dim(2) * x->dim(3);
  if (gamma->size() != ch || shift->size() != ch)
    throw Error("channel_norm: gamma/shift must have one value per channel (" +
                std::to_string(ch) + "), got " + std::to_string(gamma->size()) +
                " and " + std::to_string(shift->size()));
  if (spatial < 2)
    throw Error("channel_norm: spatial extent " + std::to_string(x->dim(2)) +
                "x" + std::to_string(x->dim(3)) +
                " leaves the channel variance undefined");

  auto out = make_tensor(x->shape, x->requires_grad || gamma->requires_grad ||
                                       shift->requires_grad);
  const int planes = batch * ch;
  std::vector<double> mean(planes), inv_dev(planes);
  for (int p = 0; p < planes; ++p) {
    const double* src = x->value.data() + static_cast<size_t>(p) * spatial;
    double m = 0.0;
    for (int i = 0; i < spatial; ++i) m += src[i];
    m /= spatial;
    double var = 0.0;
    for (int i = 0; i < spatial; ++i) {
      const double dlt = src[i] - m;
      var += dlt * dlt;
    }
    var /= spatial;
    if (var < kDegenerateVar)
      throw Error("channel_norm: channel " + std::to_string(p % ch) +
                  " of sample " + std::to_string(p / ch) +
                  " has (near-)zero spatial variance");
    mean[p] = m;
    inv_dev[p] = 1.0 / std::sqrt(var + kNormEps);
    const double g = gamma->value[static_cast<size_t>(p % ch)];
    const double b = shift->value[static_cast<size_t>(p % ch)];
    double* dst = out->value.data() + static_cast<size_t>(p) * spatial;
    for (int i = 0; i < spatial; ++i)
      dst[i] = g * (src[i] - m) * inv_dev[p] + b;
  }
  if (tape && out->requires_grad) {
    tape->record([x, gamma, shift, out, mean, inv_dev, batch, ch, spatial] {
      if (out->grad.empty()) return;
      if (x->requires_grad) x->ensure_grad();
      if (gamma->requires_grad) gamma->ensure_grad();
      if (shift->requires_grad) shift->ensure_grad();
      for (int p = 0; p < batch * ch; ++p) {
        const int c = p % ch;
        const double* xv = x->value.data() + static_cast<size_t>(p) * spatial;
        const double* go = out->grad.data() + static_cast<size_t>(p) * spatial;
        const double inv = inv_dev[p];
        const double m = mean[p];
        const double g = gamma->value[static_cast<size_t>(c)];
        double sum_go = 0.0, sum_go_xhat = 0.0;
        for (int i = 0; i < spatial; ++i) {
          const double xhat = (xv[i] - m) * inv;
          sum_go += go[i];
          sum_go_xhat += go[i] * xhat;
        }
        if (gamma->requires_grad)
          gamma->grad[static_cast<size_t>(c)] += sum_go_xhat;
        if (shift->requires_grad) shift->grad[static_cast<size_t>(c)] += sum_go;
        if (x->requires_grad) {
          double* gx = x->grad.data() + static_cast<size_t>(p) * spatial;
          const double mean_go = sum_go / spatial;
          const double mean_go_xhat = sum_go_xhat / spatial;
          for (int i = 0; i < spatial; ++i) {
            const double xhat = (xv[i] - m) * inv;
            gx[i] += g * inv * (go[i] - mean_go - xhat * mean_go_xhat);
          }
        }
      }
    });
  }
  return out;
}

TensorPtr channel_concat(Tape* tape, std::span<const TensorPtr> parts) {
  if (parts.empty()) throw Error("channel_concat: no inputs");
  require_4d(parts[0], "channel_concat");
  const int batch = parts[0]->dim(0);
  const int h = parts[0]->dim(2), w = parts[0]->dim(3);
  int total_c = 0;
  for (const auto& p : parts) {
    require_4d(p, "channel_concat");
    if (p->dim(0) != batch || p->dim(2) != h || p->dim(3) != w)
      throw Error("channel_concat: batch/spatial extents differ: " +
                  shape_str(*parts[0]) + " vs " + shape_str(*p));
    total_c += p->dim(1);
  }
  auto out = make_tensor({batch, total_c, h, w}, any_requires_grad(parts));
  const size_t plane = static_cast<size_t>(h) * w;
  size_t c_off = 0;
  std::vector<TensorPtr> owned(parts.begin(), parts.end());
  for (const auto& p : parts) {
    const size_t pc = static_cast<size_t>(p->dim(1));
    for (int n = 0; n < batch; ++n) {
      std::memcpy(
          out->value.data() + (static_cast<size_t>(n) * total_c + c_off) *
                                  plane,
          p->value.data() + static_cast<size_t>(n) * pc * plane,
          sizeof(double) * pc * plane);
    }
    c_off += pc;
  }
  if (tape && out->requires_grad) {
    tape->record([owned, out, batch, total_c, plane] {
      if (out->grad.empty()) return;
      size_t c_off = 0;
      for (const auto& p : owned) {
        const size_t pc = static_cast<size_t>(p->dim(1));
        if (p->requires_grad) {
          p->ensure_grad();
          for (int n = 0; n < batch; ++n) {
            const double* src = out->grad.data() +
                                (static_cast<size_t>(n) * total_c + c_off) *
                                    plane;
            double* dst = p->grad.data() + static_cast<size_t>(n) * pc * plane;
            for (size_t i = 0; i < pc * plane; ++i) dst[i] += src[i];
          }
        }
        c_off += pc;
      }
    });
  }
  return out;
}

TensorPtr batch_concat(Tape* tape, std::span<const TensorPtr> parts) {
  if (parts.empty()) throw Error("batch_concat: no inputs");
  const auto& first = parts[0];
  int total_n = 0;
  for (const auto& p : parts) {
    if (p->ndim() != first->ndim())
      throw Error("batch_concat: rank mismatch");
    for (int i = 1; i < p->ndim(); ++i)
      if (p->dim(i) != first->dim(i))
        throw Error("batch_concat: trailing extents differ: " +
                    shape_str(*first) + " vs " + shape_str(*p));
    total_n += p->dim(0);
  }
  auto shape = first->shape;
  shape[0] = total_n;
  auto out = make_tensor(shape, any_requires_grad(parts));
  std::vector<TensorPtr> owned(parts.begin(), parts.end());
  size_t off = 0;
  for (const auto& p : parts) {
    std::memcpy(out->value.data() + off, p->value.data(),
                sizeof(double) * p->value.size());
    off += p->value.size();
  }
  if (tape && out->requires_grad) {
    tape->record([owned, out] {
      if (out->grad.empty()) return;
      size_t off = 0;
      for (const auto& p : owned) {
        if (p->requires_grad) {
          p->ensure_grad();
          for (size_t i = 0; i < p->grad.size(); ++i)
            p->grad[i] += out->grad[off + i];
        }
        off += p->value.size();
      }
    });
  }
  return out;
}

TensorPtr bilinear_resize(Tape* tape, const TensorPtr& x, int out_h,
                          int out_w) {
  require_4d(x, "bilinear_resize");
  if (out_h < 1 || out_w < 1)
    throw Error("bilinear_resize: output extents must be positive");
  const auto rows = linear_samples(
      out_h, 0.0, static_cast<double>(x->dim(2)) / out_h, x->dim(2));
  const auto cols = linear_samples(
      out_w, 0.0, static_cast<double>(x->dim(3)) / out_w, x->dim(3));
  return sample_grid(tape, x, rows, cols);
}

TensorPtr roi_align(Tape* tape, const TensorPtr& fmap, const CropRect& crop,
                    const ImageDims& image_dims, int out_size,
                    int feature_stride) {
  require_4d(fmap, "roi_align");
  if (fmap->dim(0) != 1)
    throw Error("roi_align: feature map must have batch extent 1");
  if (out_size < 1) throw Error("roi_align: output size must be >= 1");
  const int fm_h = fmap->dim(2), fm_w = fmap->dim(3);
  const FeatureRect r = map_crop_to_features(crop, image_dims, feature_stride,
                                             fm_h, fm_w, "roi_align");
  const auto rows =
      linear_samples(out_size, r.x1, (r.x2 - r.x1) / out_size, fm_h);
  const auto cols =
      linear_samples(out_size, r.y1, (r.y2 - r.y1) / out_size, fm_w);
  return sample_grid(tape, fmap, rows, cols);
}

TensorPtr rod_align(Tape* tape, const TensorPtr& fmap, const CropRect& crop,
                    const ImageDims& image_dims, int out_size,
                    int feature_stride) {
  require_4d(fmap, "rod_align");
  if (fmap->dim(0) != 1)
    throw Error("rod_align: feature map must have batch extent 1");
  if (out_size < 1) throw Error("rod_align: output size must be >= 1");
  const int ch = fmap->dim(1), fm_h = fmap->dim(2), fm_w = fmap->dim(3);
  const FeatureRect r = map_crop_to_features(crop, image_dims, feature_stride,
                                             fm_h, fm_w, "rod_align");

  // Cells whose centers fall inside the mapped rectangle are discarded.
  auto masked = make_tensor(fmap->shape, fmap->requires_grad);
  const auto inside_rows = [&](int row) {
    const double c = row + 0.5;
    return c >= r.x1 && c < r.x2;
  };
  const auto inside_cols = [&](int col) {
    const double c = col + 0.5;
    return c >= r.y1 && c < r.y2;
  };
  for (int c = 0; c < ch; ++c) {
    const double* src = fmap->value.data() + static_cast<size_t>(c) * fm_h *
                                                 fm_w;
    double* dst = masked->value.data() + static_cast<size_t>(c) * fm_h * fm_w;
    for (int row = 0; row < fm_h; ++row) {
      const bool row_in = inside_rows(row);
      for (int col = 0; col < fm_w; ++col)
        dst[row * fm_w + col] =
            (row_in && inside_cols(col)) ? 0.0 : src[row * fm_w + col];
    }
  }
  if (tape && masked->requires_grad) {
    tape->record([fmap, masked, r, ch, fm_h, fm_w] {
      if (masked->grad.empty() || !fmap->requires_grad) return;
      fmap->ensure_grad();
      for (int c = 0; c < ch; ++c) {
        const double* src =
            masked->grad.data() + static_cast<size_t>(c) * fm_h * fm_w;
        double* dst = fmap->grad.data() + static_cast<size_t>(c) * fm_h * fm_w;
        for (int row = 0; row < fm_h; ++row) {
          const double rc = row + 0.5;
          const bool row_in = rc >= r.x1 && rc < r.x2;
          for (int col = 0; col < fm_w; ++col) {
            const double cc = col + 0.5;
            if (row_in && cc >= r.y1 && cc < r.y2) continue;
            dst[row * fm_w + col] += src[row * fm_w + col];
          }
        }
      }
    });
  }
  // Sample the full map extent, same convention as bilinear_resize.
  return bilinear_resize(tape, masked, out_size, out_size);
}

TensorPtr fully_connected(Tape* tape, const TensorPtr& x,
                          const TensorPtr& weights) {
  if (x->ndim() != 2 || weights->ndim() != 2)
    throw Error("fully_connected: expected {N,D} input and {D,O} weights, got " +
                shape_str(*x) + " and " + shape_str(*weights));
  const int batch = x->dim(0), in = x->dim(1), out_w = weights->dim(1);
  if (weights->dim(0) != in)
    throw Error("fully_connected: input length " + std::to_string(in) +
                " does not match weight rows " +
                std::to_string(weights->dim(0)));
  auto out = make_tensor({batch, out_w},
                         x->requires_grad || weights->requires_grad);
  gemm_acc(out->value.data(), x->value.data(), weights->value.data(), batch,
           in, out_w);
  if (tape && out->requires_grad) {
    tape->record([x, weights, out, batch, in, out_w] {
      if (out->grad.empty()) return;
      if (weights->requires_grad) {
        weights->ensure_grad();
        // dW[d,o] += sum_n x[n,d] * g[n,o]
        gemm_acc_tn(weights->grad.data(), x->value.data(), out->grad.data(),
                    batch, in, out_w);
      }
      if (x->requires_grad) {
        x->ensure_grad();
        // dx[n,d] += sum_o g[n,o] * W[d,o]
        gemm_acc_nt(x->grad.data(), out->grad.data(), weights->value.data(),
                    batch, out_w, in);
      }
    });
  }
  return out;
}

TensorPtr flatten_rows(Tape* tape, const TensorPtr& x) {
  if (x->ndim() < 1) throw Error("flatten_rows: scalar input");
  const int batch = x->dim(0);
  const int rest = static_cast<int>(x->size() / batch);
  auto out = make_tensor({batch, rest}, x->requires_grad);
  out->value = x->value;
  if (tape && out->requires_grad) {
    tape->record([x, out] {
      if (out->grad.empty() || !x->requires_grad) return;
      x->ensure_grad();
      for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr huber_loss(Tape* tape, const TensorPtr& pred, const TensorPtr& target,
                     double delta) {
  if (pred->shape != target->shape)
    throw Error("huber_loss: prediction " + shape_str(*pred) +
                " and target " + shape_str(*target) + " shapes differ");
  if (!(delta > 0.0)) throw Error("huber_loss: delta must be positive");
  const size_t n = pred->value.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = target->value[i] - pred->value[i];
    const double a = std::abs(e);
    total += a <= delta ? 0.5 * e * e : delta * a - 0.5 * delta * delta;
  }
  auto out = make_tensor({1}, pred->requires_grad || target->requires_grad);
  out->value[0] = total / static_cast<double>(n);
  if (tape && out->requires_grad) {
    tape->record([pred, target, out, delta, n] {
      if (out->grad.empty()) return;
      const double g = out->grad[0] / static_cast<double>(n);
      if (pred->requires_grad) pred->ensure_grad();
      if (target->requires_grad) target->ensure_grad();
      for (size_t i = 0; i < n; ++i) {
        const double e = target->value[i] - pred->value[i];
        const double clamped = std::min(std::max(e, -delta), delta);
        if (pred->requires_grad) pred->grad[i] -= g * clamped;
        if (target->requires_grad) target->grad[i] += g * clamped;
      }
    });
  }
  return out;
}

TensorPtr mul(Tape* tape, const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape)
    throw Error("mul: shapes differ: " + shape_str(*a) + " vs " +
                shape_str(*b));
  auto out = make_tensor(a->shape, a->requires_grad || b->requires_grad);
  for (size_t i = 0; i < a->value.size(); ++i)
    out->value[i] = a->value[i] * b->value[i];
  if (tape && out->requires_grad) {
    tape->record([a, b, out] {
      if (out->grad.empty()) return;
      if (a->requires_grad) {
        a->ensure_grad();
        for (size_t i = 0; i < a->grad.size(); ++i)
          a->grad[i] += out->grad[i] * b->value[i];
      }
      if (b->requires_grad) {
        b->ensure_grad();
        for (size_t i = 0; i < b->grad.size(); ++i)
          b->grad[i] += out->grad[i] * a->value[i];
      }
    });
  }
  return out;
}

TensorPtr sum(Tape* tape, const TensorPtr& x) {
  auto out = make_tensor({1}, x->requires_grad);
  double total = 0.0;
  for (double v : x->value) total += v;
  out->value[0] = total;
  if (tape && out->requires_grad) {
    tape->record([x, out] {
      if (out->grad.empty() || !x->requires_grad) return;
      x->ensure_grad();
      const double g = out->grad[0];
      for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += g;
    });
  }
  return out;
}

}  // namespace gaic::nn
