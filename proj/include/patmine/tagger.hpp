#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "patmine/crf.hpp"
#include "patmine/iob.hpp"
#include "patmine/layers.hpp"
#include "patmine/ner_data.hpp"

namespace patmine {

struct TaggerConfig {
  int word_dim = 300;
  int char_dim = 25;         // per direction of the character encoder
  bool use_char = false;
  bool use_conv = false;
  bool use_attention = false;
  int conv_width = 3;
  int conv_filters = 128;
  int attention_heads = 4;
  int hidden_size = 128;     // per direction
  Real dropout = 0.5;
  Real learning_rate = 1e-3;
  Real weight_decay = 1e-2;
  int patience = 20;
  int max_epochs = 200;
  int batch_size = 32;
  Real clip_norm = 5.0;
  bool strict_decode = false;  // mask IOB2-illegal transitions at decode time
  std::uint64_t seed = 42;
};

struct EncoderTrace {
  std::vector<int> word_ids;
  std::vector<std::vector<int>> char_ids;
  std::vector<Matrix> char_emb;          // per token, chars x char_dim
  std::vector<LstmTrace> char_fwd, char_bwd;
  Matrix embedded;
  Matrix drop1_mask;
  Matrix drop1_out;
  Conv1dTrace conv;
  AttentionTrace attn;
  Matrix pre_recurrent;  // input to the BiLSTM; probed by locality tests
  LstmTrace enc_fwd, enc_bwd;
  Matrix bilstm_out;
  Matrix drop2_mask;
  Matrix drop2_out;
};

// Word embeddings (optionally + char-BiLSTM features) -> dropout ->
// optional Conv1D -> optional multi-head self-attention -> BiLSTM ->
// dropout -> affine emission scores, plus a CRF transition matrix.
class TaggerModel {
 public:
  TaggerModel() : labels_(LabelSet::pharma()) {}

  static TaggerModel build(const TaggerConfig& config, const LabelSet& labels,
                           const std::vector<std::string>& words,
                           const std::vector<char32_t>& chars, Rng& rng);

  const TaggerConfig& config() const { return config_; }
  const LabelSet& labels() const { return labels_; }
  const std::vector<std::string>& words() const { return words_; }
  Param& word_embeddings() { return word_emb_; }
  const Matrix& transitions() const { return transitions_.value; }

  int word_id(const std::string& token) const;
  std::vector<int> char_id_seq(const std::string& token) const;

  // T x num_labels emission scores.  rng drives dropout and is required in
  // train mode with dropout > 0.
  Matrix encode(const std::vector<std::string>& tokens, bool train_mode,
                Rng* rng, EncoderTrace* trace) const;
  void encode_backward(const EncoderTrace& trace, const Matrix& demissions);

  std::vector<Param*> parameters();

  void save_json(const std::string& path) const;
  static TaggerModel load_json(const std::string& path);

 private:
  TaggerConfig config_;
  LabelSet labels_;
  std::vector<std::string> words_;  // row i+1 of the embedding table; 0 = OOV
  std::unordered_map<std::string, int> word_index_;
  std::vector<char32_t> chars_;     // row i+1 of the char table; 0 = unknown
  std::unordered_map<char32_t, int> char_index_;

  Param word_emb_;
  Param char_emb_;
  LstmCell char_fwd_, char_bwd_;
  Conv1d conv_;
  MultiHeadAttention attn_;
  LstmCell enc_fwd_, enc_bwd_;
  Linear proj_;
  Param transitions_;  // (L+2) x (L+2)

  friend Matrix encode(const TaggerModel&, const std::vector<std::string>&,
                       bool);
};

Matrix encode(const TaggerModel& model, const std::vector<std::string>& tokens,
              bool train_mode = false);

std::vector<int> tag(const TaggerModel& model,
                     const std::vector<std::string>& tokens);

struct EpochStats {
  int epoch = 0;
  Real mean_loss = 0;
  Real dev_f1 = 0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  Real best_dev_f1 = 0;
};

struct TrainResult {
  TaggerModel model;
  TrainHistory history;
  std::optional<Real> embedding_coverage;  // set when a vector file was used
};

// Minimizes mean CRF negative log-likelihood with AdamW; evaluates dev token
// micro-F1 (O excluded) after every epoch, stops after `patience` epochs
// without improvement, and returns the best-dev checkpoint.
TrainResult train_tagger(const std::vector<AnnotatedSentence>& train,
                         const std::vector<AnnotatedSentence>& dev,
                         const TaggerConfig& config, const LabelSet& labels,
                         const std::string& embeddings_path = "");

// The confirmatory architecture ladder: base BiLSTM, +Conv, +Attention,
// +Attention+Conv, and +Conv+CE at dropout 0.3/0.5/0.7.
std::vector<std::pair<std::string, TaggerConfig>> architecture_grid(
    const TaggerConfig& base);

}  // namespace patmine
