#pragma once

#include <string>
#include <vector>

#include "patmine/rng.hpp"
#include "patmine/types.hpp"

// Building blocks of the sequence encoder.  Each layer owns its parameters,
// caches what forward() needs for the matching backward(), and accumulates
// gradients into the Param buffers (zeroed by the training loop).

namespace patmine {

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  bool decay = false;  // participates in decoupled weight decay

  void zero_grad() { grad = Matrix::Zero(value.rows(), value.cols()); }
};

void xavier_init(Param& p, Rng& rng);
void gaussian_init(Param& p, Rng& rng, Real stddev);

Matrix reverse_rows(const Matrix& x);

// ---- LSTM -------------------------------------------------------------

struct LstmTrace {
  Matrix x;      // T x D
  Matrix h;      // T x H
  Matrix c;      // T x H
  Matrix gates;  // T x 4H, post-activation, gate order [i f g o]
};

struct LstmCell {
  Param w;  // D x 4H
  Param u;  // H x 4H
  Param b;  // 1 x 4H (forget-gate slice initialized to 1)
  Index input_dim = 0;
  Index hidden = 0;

  void init(const std::string& prefix, Index in_dim, Index h, Rng& rng);
  std::vector<Param*> params();

  // Processes rows of x front to back; callers reverse rows for the
  // backward direction.
  Matrix forward(const Matrix& x, LstmTrace* trace) const;
  // dh aligns with forward output rows; returns dx and accumulates grads.
  Matrix backward(const LstmTrace& trace, const Matrix& dh);
};

// ---- 1-D convolution ----------------------------------------------------

struct Conv1dTrace {
  Matrix x;
  Matrix y;  // tanh activations
};

struct Conv1d {
  Param kernel;  // filters x (width * D)
  Param bias;    // 1 x filters
  int width = 3;

  void init(const std::string& prefix, Index in_dim, Index filters, int w,
            Rng& rng);
  std::vector<Param*> params();

  // Same-length zero padding; tanh activation.
  Matrix forward(const Matrix& x, Conv1dTrace* trace) const;
  Matrix backward(const Conv1dTrace& trace, const Matrix& dy);
};

// ---- multi-head self-attention -------------------------------------------

struct AttentionTrace {
  Matrix x, q, k, v;
  std::vector<Matrix> attn;  // per head, T x T row-softmax
  Matrix concat;             // T x D
};

struct MultiHeadAttention {
  Param wq, wk, wv, wo;  // D x D each
  Param bq, bk, bv, bo;  // 1 x D each
  int heads = 4;
  Index dim = 0;

  void init(const std::string& prefix, Index d, int h, Rng& rng);
  std::vector<Param*> params();

  // Scaled dot-product attention with a residual connection.
  Matrix forward(const Matrix& x, AttentionTrace* trace) const;
  Matrix backward(const AttentionTrace& trace, const Matrix& dy);
};

// ---- linear projection ----------------------------------------------------

struct Linear {
  Param w;  // in x out
  Param b;  // 1 x out

  void init(const std::string& prefix, Index in_dim, Index out_dim, Rng& rng);
  std::vector<Param*> params();

  Matrix forward(const Matrix& x) const;
  Matrix backward(const Matrix& x, const Matrix& dy);
};

// ---- dropout --------------------------------------------------------------

// Inverted dropout; identity when !train or rate == 0.  mask is written for
// the backward pass.
Matrix dropout_forward(const Matrix& x, Real rate, bool train, Rng& rng,
                       Matrix& mask);

// ---- optimizer -------------------------------------------------------------

// AdamW with decoupled weight decay applied only to Params flagged `decay`.
class AdamW {
 public:
  AdamW(std::vector<Param*> params, Real learning_rate, Real weight_decay,
        Real beta1 = 0.9, Real beta2 = 0.999, Real epsilon = 1e-8);

  void zero_grad();
  // Global-norm gradient clipping, then one update.
  void step(Real clip_norm);

 private:
  std::vector<Param*> params_;
  std::vector<Matrix> m_, v_;
  Real lr_, wd_, beta1_, beta2_, eps_;
  long t_ = 0;
};

}  // namespace patmine
