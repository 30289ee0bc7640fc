/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "asyrec/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace asyrec {

namespace {

// Splits a shape around `axis` into (outer, extent, inner) so that element
// (o, k, i) lives at (o * extent + k) * inner + i.
struct AxisView {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;

  std::size_t index(std::size_t o, std::size_t k, std::size_t i) const {
    return (o * extent + k) * inner + i;
  }
};

AxisView axis_view(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw std::invalid_argument(std::string(op) + ": axis " + std::to_string(axis) +
                                " out of range for shape " + shape_to_string(shape));
  }
  AxisView v;
  for (std::size_t a = 0; a < axis; ++a) v.outer *= shape[a];
  v.extent = shape[axis];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) v.inner *= shape[a];
  return v;
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_to_string(a) +
                              " and " + shape_to_string(b));
}

Tape* tape_of(const Var& a) {
  if (!a.valid()) throw std::invalid_argument("op applied to an unbound Var");
  return a.tape();
}

void accumulate(Tensor* dst, const Tensor& src) {
  if (dst == nullptr) return;
  auto d = dst->data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void require_same_shape(const char* op, const Var& a, const Var& b) {
  if (a.shape() != b.shape()) shape_error(op, a.shape(), b.shape());
}

}  // namespace

Var unary_map(const UnaryOp& op, const Var& x) {
  if (op.kind == UnaryKind::kLeakyRelu && !(op.alpha > 0.0 && op.alpha < 1.0)) {
    throw std::invalid_argument("leaky_relu slope must lie in (0, 1)");
  }
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    switch (op.kind) {
      case UnaryKind::kRelu: out[i] = v > 0.0 ? v : 0.0; break;
      case UnaryKind::kLeakyRelu: out[i] = v > 0.0 ? v : op.alpha * v; break;
      case UnaryKind::kSin: out[i] = std::sin(v); break;
      case UnaryKind::kCos: out[i] = std::cos(v); break;
    }
  }
  return tape_of(x)->record(std::move(out), {x}, [x, op](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    const Tensor& xv = x.value();
    Tensor& dx = *gin[0];
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double v = xv[i];
      double d = 0.0;
      switch (op.kind) {
        case UnaryKind::kRelu: d = v > 0.0 ? 1.0 : 0.0; break;
        // Slope alpha for v < 0 and 0 at the kink.
        case UnaryKind::kLeakyRelu: d = v > 0.0 ? 1.0 : (v < 0.0 ? op.alpha : 0.0); break;
        case UnaryKind::kSin: d = std::cos(v); break;
        case UnaryKind::kCos: d = -std::sin(v); break;
      }
      dx[i] += g[i] * d;
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) shape_error("matmul", sa, sb);
  const std::size_t m = sa[0], k = sa[1], n = sb[1];
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor out(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * bv[p * n + j];
    }
  }
  return tape_of(a)->record(std::move(out), {a, b}, [a, b, m, k, n](const Tensor& g, std::span<Tensor* const> gin) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (gin[0] != nullptr) {  // dA = G * B^T
      Tensor& da = *gin[0];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
          da[i * k + p] += acc;
        }
    }
    if (gin[1] != nullptr) {  // dB = A^T * G
      Tensor& db = *gin[1];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          for (std::size_t j = 0; j < n; ++j) db[p * n + j] += aip * g[i * n + j];
        }
    }
  });
}

Var transpose(const Var& a) {
  const Shape& s = a.shape();
  if (s.size() != 2) throw std::invalid_argument("transpose expects a matrix, got " + shape_to_string(s));
  const std::size_t rows = s[0], cols = s[1];
  const Tensor& av = a.value();
  Tensor out(Shape{cols, rows});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = av[r * cols + c];
  return tape_of(a)->record(std::move(out), {a}, [rows, cols](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    Tensor& da = *gin[0];
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) da[r * cols + c] += g[c * rows + r];
  });
}

Var reshape(const Var& a, Shape shape) {
  if (shape_size(shape) != a.value().size()) shape_error("reshape", a.shape(), shape);
  Tensor out(std::move(shape), a.value().values());
  return tape_of(a)->record(std::move(out), {a}, [](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    auto d = gin[0]->data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape("add", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return tape_of(a)->record(std::move(out), {a, b}, [](const Tensor& g, std::span<Tensor* const> gin) {
    accumulate(gin[0], g);
    accumulate(gin[1], g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape("sub", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return tape_of(a)->record(std::move(out), {a, b}, [](const Tensor& g, std::span<Tensor* const> gin) {
    accumulate(gin[0], g);
    if (gin[1] != nullptr) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gin[1])[i] -= g[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape("mul", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return tape_of(a)->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> gin) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gin[0] != nullptr) (*gin[0])[i] += g[i] * bv[i];
      if (gin[1] != nullptr) (*gin[1])[i] += g[i] * av[i];
    }
  });
}

Var div(const Var& a, const Var& b) {
  require_same_shape("div", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= b.value()[i];
  return tape_of(a)->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> gin) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gin[0] != nullptr) (*gin[0])[i] += g[i] / bv[i];
      if (gin[1] != nullptr) (*gin[1])[i] -= g[i] * av[i] / (bv[i] * bv[i]);
    }
  });
}

Var scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return tape_of(a)->record(std::move(out), {a}, [factor](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += factor * g[i];
  });
}

Var add_scalar(const Var& a, double offset) {
  Tensor out = a.value();
  for (double& v : out.values()) v += offset;
  return tape_of(a)->record(std::move(out), {a}, [](const Tensor& g, std::span<Tensor* const> gin) {
    accumulate(gin[0], g);
  });
}

Var clamp_min(const Var& a, double floor) {
  Tensor out = a.value();
  for (double& v : out.values()) v = std::max(v, floor);
  return tape_of(a)->record(std::move(out), {a}, [a, floor](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    const Tensor& av = a.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (av[i] > floor) (*gin[0])[i] += g[i];
    }
  });
}

Var scale_rows(const Var& a, const Var& w) {
  const Shape& sa = a.shape();
  if (sa.size() != 2 || w.value().size() != sa[0]) shape_error("scale_rows", sa, w.shape());
  const std::size_t rows = sa[0], cols = sa[1];
  Tensor out = a.value();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] *= w.value()[r];
  return tape_of(a)->record(std::move(out), {a, w}, [a, w, rows, cols](const Tensor& g, std::span<Tensor* const> gin) {
    const Tensor& av = a.value();
    const Tensor& wv = w.value();
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t i = r * cols + c;
        if (gin[0] != nullptr) (*gin[0])[i] += g[i] * wv[r];
        acc += g[i] * av[i];
      }
      if (gin[1] != nullptr) (*gin[1])[r] += acc;
    }
  });
}

Var sum(const Var& a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return tape_of(a)->record(Tensor::scalar(total), {a}, [](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    for (double& d : gin[0]->values()) d += g[0];
  });
}

namespace {

Shape reduced_shape(const Shape& s, std::size_t axis) {
  Shape out;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (a != axis) out.push_back(s[a]);
  if (out.empty()) out.push_back(1);
  return out;
}

Var reduce_along(const Var& a, std::size_t axis, double weight, const char* name) {
  const AxisView v = axis_view(a.shape(), axis, name);
  const Tensor& av = a.value();
  Tensor out(reduced_shape(a.shape(), axis));
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t k = 0; k < v.extent; ++k)
      for (std::size_t i = 0; i < v.inner; ++i) out[o * v.inner + i] += weight * av[v.index(o, k, i)];
  return tape_of(a)->record(std::move(out), {a}, [v, weight](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    Tensor& da = *gin[0];
    for (std::size_t o = 0; o < v.outer; ++o)
      for (std::size_t k = 0; k < v.extent; ++k)
        for (std::size_t i = 0; i < v.inner; ++i) da[v.index(o, k, i)] += weight * g[o * v.inner + i];
  });
}

}  // namespace

Var reduce_sum(const Var& a, std::size_t axis) { return reduce_along(a, axis, 1.0, "reduce_sum"); }

Var reduce_mean(const Var& a, std::size_t axis) {
  const AxisView v = axis_view(a.shape(), axis, "reduce_mean");
  return reduce_along(a, axis, 1.0 / static_cast<double>(v.extent), "reduce_mean");
}

Var concat(std::initializer_list<Var> xs, std::size_t axis) {
  return concat(std::span<const Var>(xs.begin(), xs.size()), axis);
}

Var concat(std::span<const Var> xs, std::size_t axis) {
  if (xs.empty()) throw std::invalid_argument("concat of an empty sequence");
  const Shape& first = xs[0].shape();
  axis_view(first, axis, "concat");
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> offsets;
  for (const Var& x : xs) {
    const Shape& s = x.shape();
    if (s.size() != first.size()) shape_error("concat", first, s);
    for (std::size_t a = 0; a < s.size(); ++a)
      if (a != axis && s[a] != first[a]) shape_error("concat", first, s);
    offsets.push_back(out_shape[axis]);
    out_shape[axis] += s[axis];
  }
  const AxisView ov = axis_view(out_shape, axis, "concat");
  Tensor out(out_shape);
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const AxisView iv = axis_view(xs[n].shape(), axis, "concat");
    const Tensor& xv = xs[n].value();
    for (std::size_t o = 0; o < iv.outer; ++o)
      for (std::size_t k = 0; k < iv.extent; ++k)
        for (std::size_t i = 0; i < iv.inner; ++i) out[ov.index(o, offsets[n] + k, i)] = xv[iv.index(o, k, i)];
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  std::vector<Shape> shapes;
  for (const Var& x : xs) shapes.push_back(x.shape());
  return tape_of(xs[0])->record(std::move(out), inputs, [ov, axis, offsets, shapes](const Tensor& g, std::span<Tensor* const> gin) {
    for (std::size_t n = 0; n < gin.size(); ++n) {
      if (gin[n] == nullptr) continue;
      const AxisView iv = axis_view(shapes[n], axis, "concat");
      Tensor& dx = *gin[n];
      for (std::size_t o = 0; o < iv.outer; ++o)
        for (std::size_t k = 0; k < iv.extent; ++k)
          for (std::size_t i = 0; i < iv.inner; ++i) dx[iv.index(o, k, i)] += g[ov.index(o, offsets[n] + k, i)];
    }
  });
}

Var slice(const Var& a, std::size_t axis, std::size_t begin, std::size_t end) {
  const AxisView iv = axis_view(a.shape(), axis, "slice");
  if (begin >= end || end > iv.extent) {
    throw std::invalid_argument("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                ") invalid for shape " + shape_to_string(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const AxisView ov = axis_view(out_shape, axis, "slice");
  const Tensor& av = a.value();
  Tensor out(out_shape);
  for (std::size_t o = 0; o < ov.outer; ++o)
    for (std::size_t k = 0; k < ov.extent; ++k)
      for (std::size_t i = 0; i < ov.inner; ++i) out[ov.index(o, k, i)] = av[iv.index(o, begin + k, i)];
  return tape_of(a)->record(std::move(out), {a}, [iv, ov, begin](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    Tensor& da = *gin[0];
    for (std::size_t o = 0; o < ov.outer; ++o)
      for (std::size_t k = 0; k < ov.extent; ++k)
        for (std::size_t i = 0; i < ov.inner; ++i) da[iv.index(o, begin + k, i)] += g[ov.index(o, k, i)];
  });
}

Var gather_rows(const Var& a, std::span<const std::size_t> rows) {
  const Shape& s = a.shape();
  if (s.size() != 2) throw std::invalid_argument("gather_rows expects a matrix, got " + shape_to_string(s));
  const std::size_t cols = s[1];
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  for (std::size_t r : idx) {
    if (r >= s[0]) throw std::invalid_argument("gather_rows: row " + std::to_string(r) + " out of range");
  }
  const Tensor& av = a.value();
  Tensor out(Shape{idx.size(), cols});
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t c = 0; c < cols; ++c) out[k * cols + c] = av[idx[k] * cols + c];
  return tape_of(a)->record(std::move(out), {a}, [idx, cols](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t c = 0; c < cols; ++c) (*gin[0])[idx[k] * cols + c] += g[k * cols + c];
  });
}

Var scatter(const Var& a, Shape shape, std::span<const std::size_t> positions) {
  if (positions.size() != a.value().size()) {
    throw std::invalid_argument("scatter: " + std::to_string(positions.size()) + " positions for " +
                                std::to_string(a.value().size()) + " values");
  }
  std::vector<std::size_t> pos(positions.begin(), positions.end());
  Tensor out(std::move(shape));
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (pos[k] >= out.size()) throw std::invalid_argument("scatter: position out of range");
    out[pos[k]] = a.value()[k];
  }
  return tape_of(a)->record(std::move(out), {a}, [pos](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    for (std::size_t k = 0; k < pos.size(); ++k) (*gin[0])[k] += g[pos[k]];
  });
}

namespace {

Var softmax_impl(const Var& x, const Tensor* mask, std::size_t axis, const char* name) {
  const AxisView v = axis_view(x.shape(), axis, name);
  if (mask != nullptr && mask->shape() != x.shape()) shape_error(name, x.shape(), mask->shape());
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  auto admissible = [mask](std::size_t idx) { return mask == nullptr || (*mask)[idx] != 0.0; };
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t i = 0; i < v.inner; ++i) {
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < v.extent; ++k) {
        const std::size_t idx = v.index(o, k, i);
        if (admissible(idx)) hi = std::max(hi, xv[idx]);
      }
      if (hi == -std::numeric_limits<double>::infinity()) continue;
      double z = 0.0;
      for (std::size_t k = 0; k < v.extent; ++k) {
        const std::size_t idx = v.index(o, k, i);
        if (admissible(idx)) {
          out[idx] = std::exp(xv[idx] - hi);
          z += out[idx];
        }
      }
      for (std::size_t k = 0; k < v.extent; ++k) out[v.index(o, k, i)] /= z;
    }
  }
  Tensor y = out;
  Tape* tape = tape_of(x);
  return tape->record(std::move(out), {x}, [v, y = std::move(y)](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    // dx_k = y_k (g_k - sum_j g_j y_j); masked entries have y_k = 0.
    for (std::size_t o = 0; o < v.outer; ++o)
      for (std::size_t i = 0; i < v.inner; ++i) {
        double dot = 0.0;
        for (std::size_t k = 0; k < v.extent; ++k) dot += g[v.index(o, k, i)] * y[v.index(o, k, i)];
        for (std::size_t k = 0; k < v.extent; ++k) {
          const std::size_t idx = v.index(o, k, i);
          (*gin[0])[idx] += y[idx] * (g[idx] - dot);
        }
      }
  });
}

}  // namespace

Var softmax(const Var& x, std::size_t axis) { return softmax_impl(x, nullptr, axis, "softmax"); }

Var masked_softmax(const Var& x, const Tensor& mask, std::size_t axis) {
  return softmax_impl(x, &mask, axis, "masked_softmax");
}

Var cross_entropy(const Var& logits, std::size_t label) {
  const Tensor& lv = logits.value();
  if (lv.rank() != 1) throw std::invalid_argument("cross_entropy expects a logits vector, got " + shape_to_string(lv.shape()));
  if (label >= lv.size()) {
    throw std::invalid_argument("cross_entropy: label " + std::to_string(label) + " out of range for " +
                                std::to_string(lv.size()) + " classes");
  }
  Tensor p = softmax_values(lv.data());
  const double hi = *std::max_element(lv.values().begin(), lv.values().end());
  double z = 0.0;
  for (double v : lv.values()) z += std::exp(v - hi);
  const double loss = hi + std::log(z) - lv[label];
  return tape_of(logits)->record(Tensor::scalar(loss), {logits}, [p = std::move(p), label](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] == nullptr) return;
    for (std::size_t k = 0; k < p.size(); ++k) (*gin[0])[k] += g[0] * (p[k] - (k == label ? 1.0 : 0.0));
  });
}

Tensor softmax_values(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of an empty vector");
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - hi);
    z += out[k];
  }
  for (double& v : out) v /= z;
  return Tensor::vector(std::move(out));
}

}  // namespace asyrec
