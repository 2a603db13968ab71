#pragma once
/**
 * @file nn.hpp
 * @brief Minimal layer library with explicit backpropagation.
 *
 * Activations are (features x batch) column-major matrices: one column per
 * sample. Image-like tensors are flattened channel-major, i.e. element
 * (c, h, w) of a C x H x W tensor lives at row c*H*W + h*W + w.
 *
 * forward() caches what backward() needs, so a backward call must follow
 * the forward call it differentiates. backward() accumulates into the
 * parameter gradients; call zero_grad() between updates.
 */

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace socnav::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

struct TensorShape {
  int channels = 1;
  int height = 1;
  int width = 1;
  int size() const { return channels * height * width; }
  bool operator==(const TensorShape&) const = default;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Matrix forward(const Matrix& input) = 0;
  virtual Matrix backward(const Matrix& grad_output) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual TensorShape output_shape() const = 0;
};

/// Valid (unpadded) strided 2D convolution, computed per sample as im2col + GEMM.
class Conv2D final : public Layer {
 public:
  Conv2D(TensorShape input, int out_channels, int kernel_h, int kernel_w, int stride_h,
         int stride_w, const std::string& name);

  Matrix forward(const Matrix& input) override;
  Matrix backward(const Matrix& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2D>(*this); }
  TensorShape output_shape() const override { return out_; }
  /// When false, backward() only accumulates parameter gradients and returns an empty matrix.
  void set_input_gradient(bool enabled) { input_gradient_ = enabled; }

 private:
  TensorShape in_;
  TensorShape out_;
  int kernel_h_;
  int kernel_w_;
  int stride_h_;
  int stride_w_;
  Parameter weight_;  ///< out_channels x (in_channels * kernel_h * kernel_w)
  Parameter bias_;    ///< out_channels x 1
  void fill_columns(const double* sample, Eigen::Index first_row);

  Matrix columns_;  ///< im2col patches of the last forward batch
  bool input_gradient_ = true;
};

/// Non-overlapping max pooling (stride equals window); leftovers are dropped.
class MaxPool2D final : public Layer {
 public:
  MaxPool2D(TensorShape input, int pool_h, int pool_w);

  Matrix forward(const Matrix& input) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2D>(*this); }
  TensorShape output_shape() const override { return out_; }

 private:
  TensorShape in_;
  TensorShape out_;
  int pool_h_;
  int pool_w_;
  Eigen::MatrixXi argmax_;
};

class Dense final : public Layer {
 public:
  Dense(int inputs, int outputs, const std::string& name);

  Matrix forward(const Matrix& input) override;
  Matrix backward(const Matrix& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }
  TensorShape output_shape() const override { return {static_cast<int>(weight_.value.rows()), 1, 1}; }

 private:
  Parameter weight_;
  Parameter bias_;
  Matrix input_;
};

class ReLU final : public Layer {
 public:
  explicit ReLU(TensorShape shape) : shape_(shape) {}
  Matrix forward(const Matrix& input) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
  TensorShape output_shape() const override { return shape_; }

 private:
  TensorShape shape_;
  Matrix mask_;
};

/// y = scale * tanh(x)
class ScaledTanh final : public Layer {
 public:
  ScaledTanh(TensorShape shape, double scale) : shape_(shape), scale_(scale) {}
  Matrix forward(const Matrix& input) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ScaledTanh>(*this); }
  TensorShape output_shape() const override { return shape_; }

 private:
  TensorShape shape_;
  double scale_;
  Matrix tanh_;
};

/// Ordered stack of layers with value semantics (copies deep-clone layers).
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <class L, class... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Matrix forward(const Matrix& input);
  Matrix backward(const Matrix& grad_output);
  std::vector<Parameter*> parameters();
  TensorShape output_shape(TensorShape input) const;
  std::size_t size() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

void zero_grad(const std::vector<Parameter*>& params);

/// Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero bias.
void init_uniform(Parameter& weight, int fan_in, std::mt19937_64& rng, double scale = 1.0);

/// Adam with bias correction.
class Adam {
 public:
  Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(const std::vector<Parameter*>& params);

  double learning_rate() const { return lr_; }
  long long step_count() const { return t_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void set_step_count(long long t) { t_ = t; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace socnav::nn
