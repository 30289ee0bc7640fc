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

#include "asyrec/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asyrec {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

namespace {

void check_extents(const Shape& shape) {
  for (std::size_t e : shape) {
    if (e == 0) {
      throw std::invalid_argument("tensor extents must be positive, got " +
                                  shape_to_string(shape));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (shape_size(shape_) != data_.size()) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_to_string(shape_));
  }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{1}, std::vector<double>{value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for shape " +
                            shape_to_string(shape_));
  }
  return shape_[axis];
}

double& Tensor::at(std::size_t row, std::size_t col) { return data_[row * shape_[1] + col]; }

double Tensor::at(std::size_t row, std::size_t col) const { return data_[row * shape_[1] + col]; }

double Tensor::item() const {
  if (data_.size() != 1) {
    throw std::logic_error("item() on non-scalar tensor of shape " + shape_to_string(shape_));
  }
  return data_[0];
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.value.set_requires_grad(requires_grad);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.inputs.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.tape() != this) throw std::invalid_argument("op inputs live on a different tape");
    node.inputs.push_back(in.id());
    node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  node.value.set_requires_grad(node.requires_grad);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(const Var& loss) {
  if (loss.tape() != this) throw std::invalid_argument("loss lives on a different tape");
  const Node& root = nodes_.at(loss.id());
  if (root.value.size() != 1) {
    throw std::invalid_argument("backward requires a scalar loss, got shape " +
                                shape_to_string(root.value.shape()));
  }
  if (backward_done_) {
    throw std::logic_error("backward already ran on this tape; call zero_grad() first");
  }
  backward_done_ = true;

  for (Node& node : nodes_) {
    if (node.requires_grad) node.grad = Tensor(node.value.shape(), 0.0);
  }
  if (!root.requires_grad) return;
  nodes_[loss.id()].grad.fill(1.0);

  std::vector<Tensor*> grad_in;
  for (std::size_t k = loss.id() + 1; k-- > 0;) {
    Node& node = nodes_[k];
    if (!node.backward) continue;
    grad_in.clear();
    for (std::size_t in : node.inputs) {
      grad_in.push_back(nodes_[in].requires_grad ? &nodes_[in].grad : nullptr);
    }
    node.backward(node.grad, grad_in);
  }
}

void Tape::zero_grad() {
  for (Node& node : nodes_) {
    if (!node.grad.empty()) node.grad.fill(0.0);
  }
  backward_done_ = false;
}

const Tensor& Tape::value(std::size_t id) const { return nodes_.at(id).value; }

const Tensor& Tape::grad(std::size_t id) const {
  const Node& node = nodes_.at(id);
  if (node.grad.empty()) {
    throw std::logic_error("no gradient for node " + std::to_string(id) +
                           " (not differentiable or backward not run)");
  }
  return node.grad;
}

bool Tape::requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

}  // namespace asyrec
