#include "patmine/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "patmine/corpus.hpp"
#include "patmine/embeddings.hpp"
#include "patmine/error.hpp"
#include "patmine/io_util.hpp"
#include "patmine/metrics.hpp"

namespace patmine {
namespace {

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

TaggerModel TaggerModel::build(const TaggerConfig& config,
                               const LabelSet& labels,
                               const std::vector<std::string>& words,
                               const std::vector<char32_t>& chars, Rng& rng) {
  if (config.word_dim < 1 || config.hidden_size < 1) {
    throw std::invalid_argument("dimensions must be positive");
  }
  if (config.dropout < 0 || config.dropout >= 1) {
    throw std::invalid_argument("dropout must be in [0, 1)");
  }
  TaggerModel model;
  model.config_ = config;
  model.labels_ = labels;
  model.words_ = words;
  model.chars_ = chars;
  for (std::size_t i = 0; i < words.size(); ++i) {
    model.word_index_[words[i]] = static_cast<int>(i) + 1;
  }
  for (std::size_t i = 0; i < chars.size(); ++i) {
    model.char_index_[chars[i]] = static_cast<int>(i) + 1;
  }

  model.word_emb_ =
      Param{"word_emb",
            Matrix(static_cast<Index>(words.size()) + 1, config.word_dim),
            Matrix(), false};
  gaussian_init(model.word_emb_, rng, 0.1);

  Index feature_dim = config.word_dim;
  if (config.use_char) {
    model.char_emb_ =
        Param{"char_emb",
              Matrix(static_cast<Index>(chars.size()) + 1, config.char_dim),
              Matrix(), false};
    gaussian_init(model.char_emb_, rng, 0.1);
    model.char_fwd_.init("char_fwd", config.char_dim, config.char_dim, rng);
    model.char_bwd_.init("char_bwd", config.char_dim, config.char_dim, rng);
    feature_dim += 2 * config.char_dim;
  }
  Index encoder_in = feature_dim;
  if (config.use_conv) {
    model.conv_.init("conv", feature_dim, config.conv_filters,
                     config.conv_width, rng);
    encoder_in = config.conv_filters;
  }
  if (config.use_attention) {
    model.attn_.init("attn", encoder_in, config.attention_heads, rng);
  }
  model.enc_fwd_.init("enc_fwd", encoder_in, config.hidden_size, rng);
  model.enc_bwd_.init("enc_bwd", encoder_in, config.hidden_size, rng);
  model.proj_.init("proj", 2 * config.hidden_size, labels.num_labels(), rng);
  const Index states = labels.num_labels() + 2;
  model.transitions_ =
      Param{"transitions", Matrix::Zero(states, states), Matrix(), false};
  model.transitions_.zero_grad();
  return model;
}

int TaggerModel::word_id(const std::string& token) const {
  const auto it = word_index_.find(ascii_lower(token));
  return it == word_index_.end() ? 0 : it->second;
}

std::vector<int> TaggerModel::char_id_seq(const std::string& token) const {
  std::vector<int> ids;
  for (const char32_t c : utf8_codepoints(token)) {
    const auto it = char_index_.find(c);
    ids.push_back(it == char_index_.end() ? 0 : it->second);
  }
  if (ids.empty()) ids.push_back(0);
  return ids;
}

Matrix TaggerModel::encode(const std::vector<std::string>& tokens,
                           bool train_mode, Rng* rng,
                           EncoderTrace* trace) const {
  if (tokens.empty()) throw std::invalid_argument("empty sentence");
  const Index T = static_cast<Index>(tokens.size());
  EncoderTrace local;
  EncoderTrace& tr = trace != nullptr ? *trace : local;
  Rng fallback(config_.seed);
  Rng& drop_rng = rng != nullptr ? *rng : fallback;

  Index feature_dim = config_.word_dim;
  if (config_.use_char) feature_dim += 2 * config_.char_dim;
  tr.embedded.resize(T, feature_dim);
  tr.word_ids.resize(tokens.size());
  if (config_.use_char) {
    tr.char_ids.resize(tokens.size());
    tr.char_emb.resize(tokens.size());
    tr.char_fwd.resize(tokens.size());
    tr.char_bwd.resize(tokens.size());
  }
  for (Index t = 0; t < T; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    tr.word_ids[ti] = word_id(tokens[ti]);
    tr.embedded.row(t).head(config_.word_dim) =
        word_emb_.value.row(tr.word_ids[ti]);
    if (config_.use_char) {
      tr.char_ids[ti] = char_id_seq(tokens[ti]);
      const Index m = static_cast<Index>(tr.char_ids[ti].size());
      Matrix emb(m, config_.char_dim);
      for (Index c = 0; c < m; ++c) {
        emb.row(c) =
            char_emb_.value.row(tr.char_ids[ti][static_cast<std::size_t>(c)]);
      }
      const Matrix fwd = char_fwd_.forward(emb, &tr.char_fwd[ti]);
      const Matrix bwd =
          char_bwd_.forward(reverse_rows(emb), &tr.char_bwd[ti]);
      tr.embedded.row(t).segment(config_.word_dim, config_.char_dim) =
          fwd.row(m - 1);
      tr.embedded.row(t).tail(config_.char_dim) = bwd.row(m - 1);
      tr.char_emb[ti] = std::move(emb);
    }
  }

  tr.drop1_out = dropout_forward(tr.embedded, config_.dropout, train_mode,
                                 drop_rng, tr.drop1_mask);
  Matrix cur = tr.drop1_out;
  if (config_.use_conv) cur = conv_.forward(cur, &tr.conv);
  if (config_.use_attention) cur = attn_.forward(cur, &tr.attn);
  tr.pre_recurrent = cur;

  const Matrix fwd = enc_fwd_.forward(cur, &tr.enc_fwd);
  const Matrix bwd =
      reverse_rows(enc_bwd_.forward(reverse_rows(cur), &tr.enc_bwd));
  tr.bilstm_out.resize(T, 2 * config_.hidden_size);
  tr.bilstm_out << fwd, bwd;

  tr.drop2_out = dropout_forward(tr.bilstm_out, config_.dropout, train_mode,
                                 drop_rng, tr.drop2_mask);
  return proj_.forward(tr.drop2_out);
}

void TaggerModel::encode_backward(const EncoderTrace& trace,
                                  const Matrix& demissions) {
  const Index T = demissions.rows();
  const Index H = config_.hidden_size;
  Matrix dcur = proj_.backward(trace.drop2_out, demissions);
  dcur = dcur.cwiseProduct(trace.drop2_mask);

  const Matrix dfwd = dcur.leftCols(H);
  const Matrix dbwd = dcur.rightCols(H);
  Matrix dpre = enc_fwd_.backward(trace.enc_fwd, dfwd);
  dpre += reverse_rows(enc_bwd_.backward(trace.enc_bwd, reverse_rows(dbwd)));

  if (config_.use_attention) dpre = attn_.backward(trace.attn, dpre);
  if (config_.use_conv) dpre = conv_.backward(trace.conv, dpre);
  dpre = dpre.cwiseProduct(trace.drop1_mask);

  for (Index t = 0; t < T; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    word_emb_.grad.row(trace.word_ids[ti]) +=
        dpre.row(t).head(config_.word_dim);
    if (!config_.use_char) continue;
    const Index m = static_cast<Index>(trace.char_ids[ti].size());
    Matrix dh_f = Matrix::Zero(m, config_.char_dim);
    dh_f.row(m - 1) = dpre.row(t).segment(config_.word_dim, config_.char_dim);
    Matrix dh_b = Matrix::Zero(m, config_.char_dim);
    dh_b.row(m - 1) = dpre.row(t).tail(config_.char_dim);
    Matrix demb = char_fwd_.backward(trace.char_fwd[ti], dh_f);
    demb += reverse_rows(char_bwd_.backward(trace.char_bwd[ti], dh_b));
    for (Index c = 0; c < m; ++c) {
      char_emb_.grad.row(trace.char_ids[ti][static_cast<std::size_t>(c)]) +=
          demb.row(c);
    }
  }
}

std::vector<Param*> TaggerModel::parameters() {
  std::vector<Param*> out{&word_emb_};
  if (config_.use_char) {
    out.push_back(&char_emb_);
    for (Param* p : char_fwd_.params()) out.push_back(p);
    for (Param* p : char_bwd_.params()) out.push_back(p);
  }
  if (config_.use_conv) {
    for (Param* p : conv_.params()) out.push_back(p);
  }
  if (config_.use_attention) {
    for (Param* p : attn_.params()) out.push_back(p);
  }
  for (Param* p : enc_fwd_.params()) out.push_back(p);
  for (Param* p : enc_bwd_.params()) out.push_back(p);
  for (Param* p : proj_.params()) out.push_back(p);
  out.push_back(&transitions_);
  return out;
}

Matrix encode(const TaggerModel& model, const std::vector<std::string>& tokens,
              bool train_mode) {
  Rng rng(model.config().seed);
  return model.encode(tokens, train_mode, &rng, nullptr);
}

std::vector<int> tag(const TaggerModel& model,
                     const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("empty sentence");
  const Matrix emissions = model.encode(tokens, false, nullptr, nullptr);
  if (model.config().strict_decode) {
    const Matrix masked =
        model.transitions() + model.labels().strict_transition_mask();
    return crf_viterbi(emissions, masked).first;
  }
  return crf_viterbi(emissions, model.transitions()).first;
}

namespace {

Real dev_micro_f1(const TaggerModel& model,
                  const std::vector<AnnotatedSentence>& dev) {
  std::vector<std::vector<int>> pred, gold;
  pred.reserve(dev.size());
  gold.reserve(dev.size());
  for (const auto& sentence : dev) {
    pred.push_back(tag(model, sentence.tokens));
    gold.push_back(sentence.labels);
  }
  return token_prf(pred, gold, model.labels()).report.micro.f1;
}

}  // namespace

TrainResult train_tagger(const std::vector<AnnotatedSentence>& train,
                         const std::vector<AnnotatedSentence>& dev,
                         const TaggerConfig& config, const LabelSet& labels,
                         const std::string& embeddings_path) {
  if (train.empty() || dev.empty()) {
    throw std::invalid_argument("training and dev splits must be non-empty");
  }
  // Vocabulary from the training split, sorted for determinism.
  std::set<std::string> word_set;
  std::set<char32_t> char_set;
  for (const auto& sentence : train) {
    for (const auto& token : sentence.tokens) {
      word_set.insert(ascii_lower(token));
      if (config.use_char) {
        for (const char32_t c : utf8_codepoints(token)) char_set.insert(c);
      }
    }
  }
  const std::vector<std::string> words(word_set.begin(), word_set.end());
  const std::vector<char32_t> chars(char_set.begin(), char_set.end());

  Rng rng(config.seed);
  TrainResult result;
  result.model = TaggerModel::build(config, labels, words, chars, rng);
  if (!embeddings_path.empty()) {
    const EmbeddingTable table =
        load_embeddings(embeddings_path, words, config.word_dim, config.seed);
    result.model.word_embeddings().value = table.vectors;
    result.embedding_coverage = table.coverage;
  }

  AdamW optimizer(result.model.parameters(), config.learning_rate,
                  config.weight_decay);
  std::vector<Param*> params = result.model.parameters();
  Param* transitions = params.back();

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Matrix> best_values;
  TrainHistory& history = result.history;
  history.best_dev_f1 = -1;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    fisher_yates(order, rng);
    Real loss_sum = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t batch_end = std::min(
          order.size(), pos + static_cast<std::size_t>(config.batch_size));
      const auto batch_count = static_cast<Real>(batch_end - pos);
      optimizer.zero_grad();
      for (; pos < batch_end; ++pos) {
        const AnnotatedSentence& sentence = train[order[pos]];
        EncoderTrace trace;
        const Matrix emissions =
            result.model.encode(sentence.tokens, true, &rng, &trace);
        Matrix demissions, dtransitions;
        const Real loss =
            crf_nll_with_gradients(emissions, transitions->value,
                                   sentence.labels, demissions, dtransitions);
        if (!std::isfinite(loss)) {
          throw DataError("training diverged (non-finite loss) at epoch " +
                          std::to_string(epoch));
        }
        loss_sum += loss;
        result.model.encode_backward(trace, demissions);
        transitions->grad += dtransitions;
      }
      for (Param* p : params) p->grad /= batch_count;
      optimizer.step(config.clip_norm);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<Real>(train.size());
    stats.dev_f1 = dev_micro_f1(result.model, dev);
    history.epochs.push_back(stats);

    if (stats.dev_f1 > history.best_dev_f1) {
      history.best_dev_f1 = stats.dev_f1;
      history.best_epoch = epoch;
      best_values.clear();
      for (const Param* p : params) best_values.push_back(p->value);
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= config.patience) break;
    }
  }

  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i]->value = best_values[i];
    }
  }
  return result;
}

std::vector<std::pair<std::string, TaggerConfig>> architecture_grid(
    const TaggerConfig& base) {
  std::vector<std::pair<std::string, TaggerConfig>> grid;
  const auto variant = [&](const std::string& name, bool conv, bool attn,
                           bool ce, Real dropout) {
    TaggerConfig cfg = base;
    cfg.use_conv = conv;
    cfg.use_attention = attn;
    cfg.use_char = ce;
    cfg.dropout = dropout;
    grid.emplace_back(name, cfg);
  };
  variant("BiLSTM", false, false, false, base.dropout);
  variant("BiLSTM + Conv1D", true, false, false, base.dropout);
  variant("BiLSTM + Attention", false, true, false, base.dropout);
  variant("BiLSTM + Attention + Conv1D", true, true, false, base.dropout);
  variant("BiLSTM + Conv1D + CE + Dropout (0.3)", true, false, true, 0.3);
  variant("BiLSTM + Conv1D + CE + Dropout (0.5)", true, false, true, 0.5);
  variant("BiLSTM + Conv1D + CE + Dropout (0.7)", true, false, true, 0.7);
  return grid;
}

// ---- checkpoint I/O ---------------------------------------------------------

void TaggerModel::save_json(const std::string& path) const {
  nlohmann::json obj;
  obj["format"] = "patmine-ner-1";
  nlohmann::json cfg;
  cfg["word_dim"] = config_.word_dim;
  cfg["char_dim"] = config_.char_dim;
  cfg["use_char"] = config_.use_char;
  cfg["use_conv"] = config_.use_conv;
  cfg["use_attention"] = config_.use_attention;
  cfg["conv_width"] = config_.conv_width;
  cfg["conv_filters"] = config_.conv_filters;
  cfg["attention_heads"] = config_.attention_heads;
  cfg["hidden_size"] = config_.hidden_size;
  cfg["dropout"] = config_.dropout;
  cfg["learning_rate"] = config_.learning_rate;
  cfg["weight_decay"] = config_.weight_decay;
  cfg["patience"] = config_.patience;
  cfg["max_epochs"] = config_.max_epochs;
  cfg["batch_size"] = config_.batch_size;
  cfg["clip_norm"] = config_.clip_norm;
  cfg["strict_decode"] = config_.strict_decode;
  cfg["seed"] = config_.seed;
  obj["config"] = cfg;
  obj["classes"] = labels_.class_names();
  obj["words"] = words_;
  std::vector<std::uint32_t> chars;
  chars.reserve(chars_.size());
  for (const char32_t c : chars_) chars.push_back(c);
  obj["chars"] = chars;
  obj["vocab_hash"] = hash_strings(words_);

  nlohmann::json tensors = nlohmann::json::object();
  for (const Param* p : const_cast<TaggerModel*>(this)->parameters()) {
    nlohmann::json tensor;
    tensor["rows"] = p->value.rows();
    tensor["cols"] = p->value.cols();
    std::vector<Real> data;
    data.reserve(static_cast<std::size_t>(p->value.size()));
    for (Index i = 0; i < p->value.rows(); ++i) {
      for (Index j = 0; j < p->value.cols(); ++j) data.push_back(p->value(i, j));
    }
    tensor["data"] = std::move(data);
    tensors[p->name] = std::move(tensor);
  }
  obj["params"] = std::move(tensors);
  write_text(path, obj.dump() + "\n");
}

TaggerModel TaggerModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  nlohmann::json obj = nlohmann::json::parse(in, nullptr, false);
  if (obj.is_discarded() || obj.value("format", "") != "patmine-ner-1") {
    throw DataError(path + ": not a tagger checkpoint");
  }
  const auto& cfg = obj.at("config");
  TaggerConfig config;
  config.word_dim = cfg.at("word_dim").get<int>();
  config.char_dim = cfg.at("char_dim").get<int>();
  config.use_char = cfg.at("use_char").get<bool>();
  config.use_conv = cfg.at("use_conv").get<bool>();
  config.use_attention = cfg.at("use_attention").get<bool>();
  config.conv_width = cfg.at("conv_width").get<int>();
  config.conv_filters = cfg.at("conv_filters").get<int>();
  config.attention_heads = cfg.at("attention_heads").get<int>();
  config.hidden_size = cfg.at("hidden_size").get<int>();
  config.dropout = cfg.at("dropout").get<Real>();
  config.learning_rate = cfg.at("learning_rate").get<Real>();
  config.weight_decay = cfg.at("weight_decay").get<Real>();
  config.patience = cfg.at("patience").get<int>();
  config.max_epochs = cfg.at("max_epochs").get<int>();
  config.batch_size = cfg.at("batch_size").get<int>();
  config.clip_norm = cfg.at("clip_norm").get<Real>();
  config.strict_decode = cfg.at("strict_decode").get<bool>();
  config.seed = cfg.at("seed").get<std::uint64_t>();

  const LabelSet labels(obj.at("classes").get<std::vector<std::string>>());
  const auto words = obj.at("words").get<std::vector<std::string>>();
  std::vector<char32_t> chars;
  for (const auto& c : obj.at("chars")) {
    chars.push_back(static_cast<char32_t>(c.get<std::uint32_t>()));
  }
  Rng rng(config.seed);
  TaggerModel model = build(config, labels, words, chars, rng);
  const auto& tensors = obj.at("params");
  for (Param* p : model.parameters()) {
    if (!tensors.contains(p->name)) {
      throw DataError(path + ": checkpoint missing tensor " + p->name);
    }
    const auto& tensor = tensors.at(p->name);
    const Index rows = tensor.at("rows").get<Index>();
    const Index cols = tensor.at("cols").get<Index>();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw DataError(path + ": tensor shape mismatch for " + p->name);
    }
    const auto data = tensor.at("data").get<std::vector<Real>>();
    std::size_t pos = 0;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) p->value(i, j) = data[pos++];
    }
  }
  return model;
}

}  // namespace patmine
