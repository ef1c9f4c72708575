#include "patmine/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace patmine {
namespace {

inline Matrix sigmoid(const Matrix& x) {
  return ((-x.array()).exp() + 1.0).inverse().matrix();
}

}  // namespace

void xavier_init(Param& p, Rng& rng) {
  const Real limit = std::sqrt(
      6.0 / static_cast<Real>(p.value.rows() + p.value.cols()));
  for (Index i = 0; i < p.value.rows(); ++i) {
    for (Index j = 0; j < p.value.cols(); ++j) {
      p.value(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
  }
  p.zero_grad();
}

void gaussian_init(Param& p, Rng& rng, Real stddev) {
  for (Index i = 0; i < p.value.rows(); ++i) {
    for (Index j = 0; j < p.value.cols(); ++j) {
      p.value(i, j) = normal01(rng) * stddev;
    }
  }
  p.zero_grad();
}

Matrix reverse_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) out.row(i) = x.row(x.rows() - 1 - i);
  return out;
}

// ---- LSTM -------------------------------------------------------------

void LstmCell::init(const std::string& prefix, Index in_dim, Index h,
                    Rng& rng) {
  input_dim = in_dim;
  hidden = h;
  w = Param{prefix + ".w", Matrix(in_dim, 4 * h), Matrix(), true};
  u = Param{prefix + ".u", Matrix(h, 4 * h), Matrix(), true};
  b = Param{prefix + ".b", Matrix::Zero(1, 4 * h), Matrix(), false};
  xavier_init(w, rng);
  xavier_init(u, rng);
  b.value.block(0, h, 1, h).setOnes();  // forget-gate bias
  b.zero_grad();
}

std::vector<Param*> LstmCell::params() { return {&w, &u, &b}; }

Matrix LstmCell::forward(const Matrix& x, LstmTrace* trace) const {
  const Index T = x.rows();
  const Index H = hidden;
  Matrix h_out(T, H), c_out(T, H), gates(T, 4 * H);
  RowVector h_prev = RowVector::Zero(H);
  RowVector c_prev = RowVector::Zero(H);
  for (Index t = 0; t < T; ++t) {
    RowVector z = x.row(t) * w.value + h_prev * u.value + b.value;
    const RowVector i = sigmoid(z.segment(0, H));
    const RowVector f = sigmoid(z.segment(H, H));
    const RowVector g = z.segment(2 * H, H).array().tanh();
    const RowVector o = sigmoid(z.segment(3 * H, H));
    const RowVector c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    const RowVector h = o.cwiseProduct(c.array().tanh().matrix());
    gates.row(t) << i, f, g, o;
    c_out.row(t) = c;
    h_out.row(t) = h;
    h_prev = h;
    c_prev = c;
  }
  if (trace != nullptr) {
    trace->x = x;
    trace->h = h_out;
    trace->c = c_out;
    trace->gates = gates;
  }
  return h_out;
}

Matrix LstmCell::backward(const LstmTrace& trace, const Matrix& dh_up) {
  const Index T = trace.x.rows();
  const Index H = hidden;
  Matrix dx = Matrix::Zero(T, input_dim);
  RowVector dh_next = RowVector::Zero(H);
  RowVector dc_next = RowVector::Zero(H);
  for (Index t = T - 1; t >= 0; --t) {
    const RowVector i = trace.gates.row(t).segment(0, H);
    const RowVector f = trace.gates.row(t).segment(H, H);
    const RowVector g = trace.gates.row(t).segment(2 * H, H);
    const RowVector o = trace.gates.row(t).segment(3 * H, H);
    const RowVector c = trace.c.row(t);
    const RowVector c_prev =
        t > 0 ? RowVector(trace.c.row(t - 1)) : RowVector::Zero(H);
    const RowVector tanh_c = c.array().tanh();

    const RowVector dh = dh_up.row(t) + dh_next;
    RowVector dc = dc_next +
                   dh.cwiseProduct(o).cwiseProduct(
                       (1.0 - tanh_c.array().square()).matrix());
    const RowVector do_ = dh.cwiseProduct(tanh_c);
    const RowVector di = dc.cwiseProduct(g);
    const RowVector df = dc.cwiseProduct(c_prev);
    const RowVector dg = dc.cwiseProduct(i);

    RowVector dz(4 * H);
    dz.segment(0, H) = di.cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
    dz.segment(H, H) = df.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
    dz.segment(2 * H, H) = dg.cwiseProduct((1.0 - g.array().square()).matrix());
    dz.segment(3 * H, H) =
        do_.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

    w.grad += trace.x.row(t).transpose() * dz;
    if (t > 0) u.grad += trace.h.row(t - 1).transpose() * dz;
    b.grad += dz;

    dx.row(t) = dz * w.value.transpose();
    dh_next = t > 0 ? RowVector(dz * u.value.transpose()) : RowVector::Zero(H);
    dc_next = dc.cwiseProduct(f);
  }
  return dx;
}

// ---- Conv1d ---------------------------------------------------------------

void Conv1d::init(const std::string& prefix, Index in_dim, Index filters,
                  int w, Rng& rng) {
  if (w < 1 || w % 2 == 0) {
    throw std::invalid_argument("convolution width must be odd");
  }
  width = w;
  kernel = Param{prefix + ".kernel", Matrix(filters, w * in_dim), Matrix(), true};
  bias = Param{prefix + ".bias", Matrix::Zero(1, filters), Matrix(), false};
  xavier_init(kernel, rng);
  bias.zero_grad();
}

std::vector<Param*> Conv1d::params() { return {&kernel, &bias}; }

Matrix Conv1d::forward(const Matrix& x, Conv1dTrace* trace) const {
  const Index T = x.rows();
  const Index D = x.cols();
  const Index F = kernel.value.rows();
  const int pad = (width - 1) / 2;
  Matrix y(T, F);
  Vector window(width * D);
  for (Index t = 0; t < T; ++t) {
    window.setZero();
    for (int k = 0; k < width; ++k) {
      const Index src = t + k - pad;
      if (src < 0 || src >= T) continue;
      window.segment(k * D, D) = x.row(src).transpose();
    }
    y.row(t) =
        ((kernel.value * window).transpose() + bias.value).array().tanh();
  }
  if (trace != nullptr) {
    trace->x = x;
    trace->y = y;
  }
  return y;
}

Matrix Conv1d::backward(const Conv1dTrace& trace, const Matrix& dy) {
  const Index T = trace.x.rows();
  const Index D = trace.x.cols();
  const int pad = (width - 1) / 2;
  Matrix dx = Matrix::Zero(T, D);
  Vector window(width * D);
  for (Index t = 0; t < T; ++t) {
    const RowVector dpre =
        dy.row(t).cwiseProduct((1.0 - trace.y.row(t).array().square()).matrix());
    window.setZero();
    for (int k = 0; k < width; ++k) {
      const Index src = t + k - pad;
      if (src < 0 || src >= T) continue;
      window.segment(k * D, D) = trace.x.row(src).transpose();
    }
    kernel.grad += dpre.transpose() * window.transpose();
    bias.grad += dpre;
    const Vector dwindow = kernel.value.transpose() * dpre.transpose();
    for (int k = 0; k < width; ++k) {
      const Index src = t + k - pad;
      if (src < 0 || src >= T) continue;
      dx.row(src) += dwindow.segment(k * D, D).transpose();
    }
  }
  return dx;
}

// ---- multi-head self-attention ---------------------------------------------

void MultiHeadAttention::init(const std::string& prefix, Index d, int h,
                              Rng& rng) {
  if (h < 1 || d % h != 0) {
    throw std::invalid_argument("attention heads must divide the model width");
  }
  heads = h;
  dim = d;
  for (auto [p, name] : {std::pair<Param*, const char*>{&wq, ".wq"},
                         {&wk, ".wk"},
                         {&wv, ".wv"},
                         {&wo, ".wo"}}) {
    *p = Param{prefix + name, Matrix(d, d), Matrix(), true};
    xavier_init(*p, rng);
  }
  for (auto [p, name] : {std::pair<Param*, const char*>{&bq, ".bq"},
                         {&bk, ".bk"},
                         {&bv, ".bv"},
                         {&bo, ".bo"}}) {
    *p = Param{prefix + name, Matrix::Zero(1, d), Matrix(), false};
    p->zero_grad();
  }
}

std::vector<Param*> MultiHeadAttention::params() {
  return {&wq, &wk, &wv, &wo, &bq, &bk, &bv, &bo};
}

Matrix MultiHeadAttention::forward(const Matrix& x,
                                   AttentionTrace* trace) const {
  const Index T = x.rows();
  const Index dk = dim / heads;
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(dk));
  const Matrix q = (x * wq.value).rowwise() + bq.value.row(0);
  const Matrix k = (x * wk.value).rowwise() + bk.value.row(0);
  const Matrix v = (x * wv.value).rowwise() + bv.value.row(0);
  Matrix concat(T, dim);
  std::vector<Matrix> attn(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const auto qh = q.middleCols(h * dk, dk);
    const auto kh = k.middleCols(h * dk, dk);
    const auto vh = v.middleCols(h * dk, dk);
    Matrix scores = qh * kh.transpose() * scale;
    for (Index r = 0; r < T; ++r) {
      const Real m = scores.row(r).maxCoeff();
      scores.row(r) = (scores.row(r).array() - m).exp();
      scores.row(r) /= scores.row(r).sum();
    }
    concat.middleCols(h * dk, dk) = scores * vh;
    attn[static_cast<std::size_t>(h)] = std::move(scores);
  }
  const Matrix projected = (concat * wo.value).rowwise() + bo.value.row(0);
  if (trace != nullptr) {
    trace->x = x;
    trace->q = q;
    trace->k = k;
    trace->v = v;
    trace->attn = std::move(attn);
    trace->concat = concat;
  }
  return x + projected;
}

Matrix MultiHeadAttention::backward(const AttentionTrace& trace,
                                    const Matrix& dy) {
  const Index T = trace.x.rows();
  const Index dk = dim / heads;
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(dk));

  wo.grad += trace.concat.transpose() * dy;
  bo.grad += dy.colwise().sum();
  const Matrix dconcat = dy * wo.value.transpose();

  Matrix dq(T, dim), dkm(T, dim), dv(T, dim);
  for (int h = 0; h < heads; ++h) {
    const auto qh = trace.q.middleCols(h * dk, dk);
    const auto kh = trace.k.middleCols(h * dk, dk);
    const auto vh = trace.v.middleCols(h * dk, dk);
    const Matrix& a = trace.attn[static_cast<std::size_t>(h)];
    const auto doh = dconcat.middleCols(h * dk, dk);

    const Matrix da = doh * vh.transpose();
    dv.middleCols(h * dk, dk) = a.transpose() * doh;
    Matrix ds(T, T);
    for (Index r = 0; r < T; ++r) {
      const Real dot = da.row(r).dot(a.row(r));
      ds.row(r) = a.row(r).cwiseProduct((da.row(r).array() - dot).matrix());
    }
    dq.middleCols(h * dk, dk) = ds * kh * scale;
    dkm.middleCols(h * dk, dk) = ds.transpose() * qh * scale;
  }

  wq.grad += trace.x.transpose() * dq;
  bq.grad += dq.colwise().sum();
  wk.grad += trace.x.transpose() * dkm;
  bk.grad += dkm.colwise().sum();
  wv.grad += trace.x.transpose() * dv;
  bv.grad += dv.colwise().sum();

  return dy + dq * wq.value.transpose() + dkm * wk.value.transpose() +
         dv * wv.value.transpose();
}

// ---- linear -----------------------------------------------------------------

void Linear::init(const std::string& prefix, Index in_dim, Index out_dim,
                  Rng& rng) {
  w = Param{prefix + ".w", Matrix(in_dim, out_dim), Matrix(), true};
  b = Param{prefix + ".b", Matrix::Zero(1, out_dim), Matrix(), false};
  xavier_init(w, rng);
  b.zero_grad();
}

std::vector<Param*> Linear::params() { return {&w, &b}; }

Matrix Linear::forward(const Matrix& x) const {
  return (x * w.value).rowwise() + b.value.row(0);
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  w.grad += x.transpose() * dy;
  b.grad += dy.colwise().sum();
  return dy * w.value.transpose();
}

// ---- dropout ----------------------------------------------------------------

Matrix dropout_forward(const Matrix& x, Real rate, bool train, Rng& rng,
                       Matrix& mask) {
  if (!train || rate <= 0) {
    mask = Matrix::Ones(x.rows(), x.cols());
    return x;
  }
  const Real keep = 1.0 - rate;
  mask.resize(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      mask(i, j) = uniform01(rng) < rate ? 0.0 : 1.0 / keep;
    }
  }
  return x.cwiseProduct(mask);
}

// ---- AdamW -------------------------------------------------------------------

AdamW::AdamW(std::vector<Param*> params, Real learning_rate, Real weight_decay,
             Real beta1, Real beta2, Real epsilon)
    : params_(std::move(params)),
      lr_(learning_rate),
      wd_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Param* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamW::zero_grad() {
  for (Param* p : params_) p->zero_grad();
}

void AdamW::step(Real clip_norm) {
  if (clip_norm > 0) {
    Real total = 0;
    for (const Param* p : params_) total += p->grad.squaredNorm();
    total = std::sqrt(total);
    if (total > clip_norm) {
      const Real scale = clip_norm / total;
      for (Param* p : params_) p->grad *= scale;
    }
  }
  ++t_;
  const Real bc1 = 1.0 - std::pow(beta1_, static_cast<Real>(t_));
  const Real bc2 = 1.0 - std::pow(beta2_, static_cast<Real>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    const Matrix mhat = m_[i] / bc1;
    const Matrix vhat = v_[i] / bc2;
    p.value -=
        lr_ * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
    if (p.decay && wd_ > 0) p.value *= (1.0 - lr_ * wd_);
  }
}

}  // namespace patmine
