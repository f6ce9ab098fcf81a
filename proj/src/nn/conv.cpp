// Copyright 2026 The TerraSeg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "terraseg/nn/conv.hpp"

#include "terraseg/error.hpp"

namespace terraseg::nn {

namespace {

struct KernelDims {
  std::size_t out_ch;
  std::size_t in_ch;
  std::size_t kh;
  std::size_t kw;
};

KernelDims kernel_dims(const Tensor& k) {
  if (k.rank() != 4) {
    throw ShapeError("kernels must be rank 4, got " +
                     shape_to_string(k.shape()));
  }
  return {k.extent(0), k.extent(1), k.extent(2), k.extent(3)};
}

std::size_t output_extent(std::size_t in, std::size_t k, std::size_t stride,
                          const char* axis) {
  if (stride == 0) throw ShapeError("stride must be >= 1");
  if (k > in) {
    throw ShapeError(std::string("kernel larger than padded input along ") +
                     axis);
  }
  if ((in - k) % stride != 0) {
    throw ShapeError(std::string("non-integral output extent along ") + axis);
  }
  return (in - k) / stride + 1;
}

// Valid cross-correlation. x: [N, I, H, W]; k: [O, I, kh, kw]; out [N, O, oh, ow].
void correlate(const double* x, const ImageDims& xd, const double* k,
               const KernelDims& kd, std::size_t stride, double* out,
               std::size_t oh, std::size_t ow) {
  for (std::size_t n = 0; n < xd.batch; ++n) {
    for (std::size_t o = 0; o < kd.out_ch; ++o) {
      double* out_plane = out + (n * kd.out_ch + o) * oh * ow;
      for (std::size_t i = 0; i < kd.in_ch; ++i) {
        const double* x_plane = x + (n * xd.channels + i) * xd.plane();
        const double* kern = k + (o * kd.in_ch + i) * kd.kh * kd.kw;
        for (std::size_t ky = 0; ky < kd.kh; ++ky) {
          for (std::size_t kx = 0; kx < kd.kw; ++kx) {
            const double w = kern[ky * kd.kw + kx];
            for (std::size_t y = 0; y < oh; ++y) {
              const double* src = x_plane + (y * stride + ky) * xd.width + kx;
              double* dst = out_plane + y * ow;
              if (stride == 1) {
                for (std::size_t xo = 0; xo < ow; ++xo) dst[xo] += w * src[xo];
              } else {
                for (std::size_t xo = 0; xo < ow; ++xo) {
                  dst[xo] += w * src[xo * stride];
                }
              }
            }
          }
        }
      }
    }
  }
}

// Adjoint of correlate with respect to x. g: [N, O, oh, ow]; writes
// (accumulates into) out: [N, I, H, W].
void scatter(const double* g, std::size_t oh, std::size_t ow, const double* k,
             const KernelDims& kd, std::size_t stride, double* out,
             const ImageDims& od) {
  for (std::size_t n = 0; n < od.batch; ++n) {
    for (std::size_t o = 0; o < kd.out_ch; ++o) {
      const double* g_plane = g + (n * kd.out_ch + o) * oh * ow;
      for (std::size_t i = 0; i < kd.in_ch; ++i) {
        double* out_plane = out + (n * od.channels + i) * od.plane();
        const double* kern = k + (o * kd.in_ch + i) * kd.kh * kd.kw;
        for (std::size_t ky = 0; ky < kd.kh; ++ky) {
          for (std::size_t kx = 0; kx < kd.kw; ++kx) {
            const double w = kern[ky * kd.kw + kx];
            for (std::size_t y = 0; y < oh; ++y) {
              const double* src = g_plane + y * ow;
              double* dst = out_plane + (y * stride + ky) * od.width + kx;
              if (stride == 1) {
                for (std::size_t xo = 0; xo < ow; ++xo) dst[xo] += w * src[xo];
              } else {
                for (std::size_t xo = 0; xo < ow; ++xo) {
                  dst[xo * stride] += w * src[xo];
                }
              }
            }
          }
        }
      }
    }
  }
}

// Gradient of correlate with respect to k. Accumulates into gk: [O, I, kh, kw].
void weight_grad(const double* x, const ImageDims& xd, const double* g,
                 std::size_t out_ch, std::size_t oh, std::size_t ow,
                 std::size_t stride, const KernelDims& kd, double* gk) {
  for (std::size_t n = 0; n < xd.batch; ++n) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      const double* g_plane = g + (n * out_ch + o) * oh * ow;
      for (std::size_t i = 0; i < kd.in_ch; ++i) {
        const double* x_plane = x + (n * xd.channels + i) * xd.plane();
        double* gkern = gk + (o * kd.in_ch + i) * kd.kh * kd.kw;
        for (std::size_t ky = 0; ky < kd.kh; ++ky) {
          for (std::size_t kx = 0; kx < kd.kw; ++kx) {
            double acc = 0.0;
            for (std::size_t y = 0; y < oh; ++y) {
              const double* src = x_plane + (y * stride + ky) * xd.width + kx;
              const double* gr = g_plane + y * ow;
              if (stride == 1) {
                for (std::size_t xo = 0; xo < ow; ++xo) acc += gr[xo] * src[xo];
              } else {
                for (std::size_t xo = 0; xo < ow; ++xo) {
                  acc += gr[xo] * src[xo * stride];
                }
              }
            }
            gkern[ky * kd.kw + kx] += acc;
          }
        }
      }
    }
  }
}

void add_bias(Tensor& out, const Tensor& bias) {
  if (bias.empty()) return;
  const ImageDims d = image_dims(out);
  if (bias.size() != d.channels) {
    throw ShapeError("bias has " + std::to_string(bias.size()) +
                     " entries, expected " + std::to_string(d.channels));
  }
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      double* p = out.data() + (n * d.channels + c) * d.plane();
      const double b = bias[c];
      for (std::size_t j = 0; j < d.plane(); ++j) p[j] += b;
    }
  }
}

Tensor bias_grad(const Tensor& grad_output) {
  const ImageDims d = image_dims(grad_output);
  Tensor gb({d.channels}, 0.0);
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      const double* p = grad_output.data() + (n * d.channels + c) * d.plane();
      double s = 0.0;
      for (std::size_t j = 0; j < d.plane(); ++j) s += p[j];
      gb[c] += s;
    }
  }
  return gb;
}

// Strips `pad` rows/columns from every border.
Tensor unpad(const Tensor& t, std::size_t pad) {
  if (pad == 0) return t;
  const ImageDims d = image_dims(t);
  return crop_center(t, d.height - 2 * pad, d.width - 2 * pad);
}

void check_grad_shape(const Tensor& grad, const Shape& expected) {
  if (grad.shape() != expected) {
    throw ShapeError("gradient shape " + shape_to_string(grad.shape()) +
                     " does not match output shape " +
                     shape_to_string(expected));
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride, std::size_t padding) {
  const KernelDims kd = kernel_dims(kernels);
  const ImageDims in = image_dims(input);
  if (in.channels != kd.in_ch) {
    throw ShapeError("conv2d: input has " + std::to_string(in.channels) +
                     " channels, kernels expect " + std::to_string(kd.in_ch));
  }
  const Tensor padded = pad_zero(input, padding, padding);
  const ImageDims pd = image_dims(padded);
  const std::size_t oh = output_extent(pd.height, kd.kh, stride, "height");
  const std::size_t ow = output_extent(pd.width, kd.kw, stride, "width");
  Tensor out(image_shape_like(input, in.batch, kd.out_ch, oh, ow), 0.0);
  correlate(padded.data(), pd, kernels.data(), kd, stride, out.data(), oh, ow);
  add_bias(out, bias);
  return out;
}

ConvGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                          std::size_t stride, std::size_t padding,
                          const Tensor& grad_output) {
  const KernelDims kd = kernel_dims(kernels);
  const Tensor padded = pad_zero(input, padding, padding);
  const ImageDims pd = image_dims(padded);
  const std::size_t oh = output_extent(pd.height, kd.kh, stride, "height");
  const std::size_t ow = output_extent(pd.width, kd.kw, stride, "width");
  check_grad_shape(grad_output,
                   image_shape_like(input, pd.batch, kd.out_ch, oh, ow));

  Tensor grad_padded(padded.shape(), 0.0);
  scatter(grad_output.data(), oh, ow, kernels.data(), kd, stride,
          grad_padded.data(), pd);
  Tensor grad_kernels(kernels.shape(), 0.0);
  weight_grad(padded.data(), pd, grad_output.data(), kd.out_ch, oh, ow, stride,
              kd, grad_kernels.data());
  return {unpad(grad_padded, padding), std::move(grad_kernels),
          bias_grad(grad_output)};
}

Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels,
                        std::size_t stride) {
  return conv2d_transpose(input, kernels, Tensor(), stride);
}

Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels,
                        const Tensor& bias, std::size_t stride) {
  if (stride == 0) throw ShapeError("stride must be >= 1");
  // Viewed as the adjoint conv: kernels [A, B, kh, kw] map B -> A forward, so
  // this operation maps A channels to B channels.
  const KernelDims kd = kernel_dims(kernels);
  const ImageDims in = image_dims(input);
  if (in.channels != kd.out_ch) {
    throw ShapeError("conv2d_transpose: input has " +
                     std::to_string(in.channels) + " channels, kernels expect " +
                     std::to_string(kd.out_ch));
  }
  const std::size_t oh = (in.height - 1) * stride + kd.kh;
  const std::size_t ow = (in.width - 1) * stride + kd.kw;
  Tensor out(image_shape_like(input, in.batch, kd.in_ch, oh, ow), 0.0);
  scatter(input.data(), in.height, in.width, kernels.data(), kd, stride,
          out.data(), image_dims(out));
  add_bias(out, bias);
  return out;
}

ConvGrads conv2d_transpose_backward(const Tensor& input, const Tensor& kernels,
                                    std::size_t stride,
                                    const Tensor& grad_output) {
  const KernelDims kd = kernel_dims(kernels);
  const ImageDims in = image_dims(input);
  const std::size_t oh = (in.height - 1) * stride + kd.kh;
  const std::size_t ow = (in.width - 1) * stride + kd.kw;
  check_grad_shape(grad_output,
                   image_shape_like(input, in.batch, kd.in_ch, oh, ow));
  const ImageDims gd = image_dims(grad_output);

  Tensor grad_input(input.shape(), 0.0);
  correlate(grad_output.data(), gd, kernels.data(), kd, stride,
            grad_input.data(), in.height, in.width);
  Tensor grad_kernels(kernels.shape(), 0.0);
  weight_grad(grad_output.data(), gd, input.data(), kd.out_ch, in.height,
              in.width, stride, kd, grad_kernels.data());
  return {std::move(grad_input), std::move(grad_kernels),
          bias_grad(grad_output)};
}

}  // namespace terraseg::nn
