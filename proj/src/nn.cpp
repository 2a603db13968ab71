#include "socnav/nn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socnav::nn {

namespace {

Parameter make_param(std::string name, int rows, int cols) {
  return {std::move(name), Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)};
}

void require_rows(const Matrix& m, int rows, const char* what) {
  if (m.rows() != rows) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) +
                                " input rows, got " + std::to_string(m.rows()));
  }
}

}  // namespace

Conv2D::Conv2D(TensorShape input, int out_channels, int kernel_h, int kernel_w, int stride_h,
               int stride_w, const std::string& name)
    : in_(input),
      kernel_h_(kernel_h),
      kernel_w_(kernel_w),
      stride_h_(stride_h),
      stride_w_(stride_w) {
  if (kernel_h < 1 || kernel_w < 1 || stride_h < 1 || stride_w < 1 || out_channels < 1) {
    throw std::invalid_argument("conv: kernel, stride and channels must be positive");
  }
  if (kernel_h > input.height || kernel_w > input.width) {
    throw std::invalid_argument("conv " + name + ": kernel larger than input (" +
                                std::to_string(input.height) + "x" +
                                std::to_string(input.width) + ")");
  }
  out_ = {out_channels, (input.height - kernel_h) / stride_h + 1,
          (input.width - kernel_w) / stride_w + 1};
  weight_ = make_param(name + ".weight", out_channels, input.channels * kernel_h * kernel_w);
  bias_ = make_param(name + ".bias", out_channels, 1);
}

void Conv2D::fill_columns(const double* src, Eigen::Index first_row) {
  // Row = output position of one sample, column = patch entry.
  for (int c = 0; c < in_.channels; ++c) {
    const double* plane = src + c * in_.height * in_.width;
    for (int i = 0; i < kernel_h_; ++i) {
      for (int j = 0; j < kernel_w_; ++j) {
        double* dst = columns_.col((c * kernel_h_ + i) * kernel_w_ + j).data() + first_row;
        for (int oh = 0; oh < out_.height; ++oh) {
          const double* row = plane + (oh * stride_h_ + i) * in_.width + j;
          for (int ow = 0; ow < out_.width; ++ow) *dst++ = row[ow * stride_w_];
        }
      }
    }
  }
}

Matrix Conv2D::forward(const Matrix& input) {
  require_rows(input, in_.size(), "conv");
  const Eigen::Index positions = static_cast<Eigen::Index>(out_.height) * out_.width;
  const Eigen::Index batch = input.cols();
  // The whole batch shares one patch matrix, so a single product covers it.
  // Sample b owns rows [b * positions, (b + 1) * positions).
  columns_.resize(positions * batch, static_cast<Eigen::Index>(in_.channels) * kernel_h_ * kernel_w_);
  for (Eigen::Index b = 0; b < batch; ++b) fill_columns(input.col(b).data(), b * positions);
  Matrix product = columns_ * weight_.value.transpose();
  product.rowwise() += bias_.value.col(0).transpose();
  // Output channels are contiguous blocks of `positions` rows.
  Matrix output(static_cast<Eigen::Index>(out_.size()), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    Eigen::Map<Matrix>(output.col(b).data(), positions, out_.channels) =
        product.middleRows(b * positions, positions);
  }
  return output;
}

Matrix Conv2D::backward(const Matrix& grad_output) {
  require_rows(grad_output, out_.size(), "conv backward");
  const Eigen::Index positions = static_cast<Eigen::Index>(out_.height) * out_.width;
  const Eigen::Index batch = grad_output.cols();
  if (columns_.rows() != positions * batch) {
    throw std::logic_error("conv backward: batch differs from the last forward");
  }
  Matrix g(positions * batch, out_.channels);
  for (Eigen::Index b = 0; b < batch; ++b) {
    g.middleRows(b * positions, positions) =
        Eigen::Map<const Matrix>(grad_output.col(b).data(), positions, out_.channels);
  }
  weight_.grad.noalias() += g.transpose() * columns_;
  bias_.grad.col(0) += g.colwise().sum().transpose();
  if (!input_gradient_) return {};
  const Matrix grad_columns = g * weight_.value;
  Matrix grad_input = Matrix::Zero(in_.size(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    double* dst_base = grad_input.col(b).data();
    for (int c = 0; c < in_.channels; ++c) {
      double* plane = dst_base + c * in_.height * in_.width;
      for (int i = 0; i < kernel_h_; ++i) {
        for (int j = 0; j < kernel_w_; ++j) {
          const double* src =
              grad_columns.col((c * kernel_h_ + i) * kernel_w_ + j).data() + b * positions;
          for (int oh = 0; oh < out_.height; ++oh) {
            double* row = plane + (oh * stride_h_ + i) * in_.width + j;
            for (int ow = 0; ow < out_.width; ++ow) row[ow * stride_w_] += *src++;
          }
        }
      }
    }
  }
  return grad_input;
}

MaxPool2D::MaxPool2D(TensorShape input, int pool_h, int pool_w)
    : in_(input), pool_h_(pool_h), pool_w_(pool_w) {
  if (pool_h < 1 || pool_w < 1) throw std::invalid_argument("pool window must be positive");
  out_ = {input.channels, input.height / pool_h, input.width / pool_w};
  if (out_.height < 1 || out_.width < 1) throw std::invalid_argument("pool window larger than input");
}

Matrix MaxPool2D::forward(const Matrix& input) {
  require_rows(input, in_.size(), "maxpool");
  const auto batch = input.cols();
  Matrix output(out_.size(), batch);
  argmax_.resize(out_.size(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int c = 0; c < out_.channels; ++c) {
      for (int oh = 0; oh < out_.height; ++oh) {
        for (int ow = 0; ow < out_.width; ++ow) {
          int best = -1;
          double best_value = -std::numeric_limits<double>::infinity();
          for (int i = 0; i < pool_h_; ++i) {
            for (int j = 0; j < pool_w_; ++j) {
              const int idx = (c * in_.height + oh * pool_h_ + i) * in_.width + ow * pool_w_ + j;
              if (best < 0 || input(idx, b) > best_value) {
                best = idx;
                best_value = input(idx, b);
              }
            }
          }
          const int o = (c * out_.height + oh) * out_.width + ow;
          output(o, b) = best_value;
          argmax_(o, b) = best;
        }
      }
    }
  }
  return output;
}

Matrix MaxPool2D::backward(const Matrix& grad_output) {
  require_rows(grad_output, out_.size(), "maxpool backward");
  Matrix grad_input = Matrix::Zero(in_.size(), grad_output.cols());
  for (Eigen::Index b = 0; b < grad_output.cols(); ++b) {
    for (int o = 0; o < out_.size(); ++o) grad_input(argmax_(o, b), b) += grad_output(o, b);
  }
  return grad_input;
}

Dense::Dense(int inputs, int outputs, const std::string& name)
    : weight_(make_param(name + ".weight", outputs, inputs)),
      bias_(make_param(name + ".bias", outputs, 1)) {
  if (inputs < 1 || outputs < 1) throw std::invalid_argument("dense layer sizes must be positive");
}

Matrix Dense::forward(const Matrix& input) {
  require_rows(input, static_cast<int>(weight_.value.cols()), "dense");
  input_ = input;
  Matrix out = weight_.value * input;
  out.colwise() += bias_.value.col(0);
  return out;
}

Matrix Dense::backward(const Matrix& grad_output) {
  weight_.grad.noalias() += grad_output * input_.transpose();
  bias_.grad.col(0) += grad_output.rowwise().sum();
  return weight_.value.transpose() * grad_output;
}

Matrix ReLU::forward(const Matrix& input) {
  mask_ = (input.array() > 0.0).cast<double>();
  return input.cwiseProduct(mask_);
}

Matrix ReLU::backward(const Matrix& grad_output) { return grad_output.cwiseProduct(mask_); }

Matrix ScaledTanh::forward(const Matrix& input) {
  tanh_ = input.array().tanh();
  return scale_ * tanh_;
}

Matrix ScaledTanh::backward(const Matrix& grad_output) {
  return (grad_output.array() * scale_ * (1.0 - tanh_.array().square())).matrix();
}

Sequential::Sequential(const Sequential& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    layers_ = std::move(copy.layers_);
  }
  return *this;
}

Matrix Sequential::forward(const Matrix& input) {
  Matrix x = input;
  for (auto& layer : layers_) x = layer->forward(x);
  return x;
}

Matrix Sequential::backward(const Matrix& grad_output) {
  Matrix g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Parameter*> Sequential::parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    for (Parameter* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

TensorShape Sequential::output_shape(TensorShape input) const {
  return layers_.empty() ? input : layers_.back()->output_shape();
}

void zero_grad(const std::vector<Parameter*>& params) {
  for (Parameter* p : params) p->grad.setZero();
}

void init_uniform(Parameter& weight, int fan_in, std::mt19937_64& rng, double scale) {
  const double bound = scale / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < weight.value.cols(); ++j) {
    for (Eigen::Index i = 0; i < weight.value.rows(); ++i) weight.value(i, j) = dist(rng);
  }
}

Adam::Adam(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const std::vector<Parameter*>& params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const Parameter* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace socnav::nn
