#include "patmine/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"
#include "patmine/math.hpp"
#include "patmine/rng.hpp"

namespace patmine {
namespace {

constexpr Real kPhiFloor = 1e-100;

void unpack(const BowVector& bow, Index vocab_size, std::vector<Index>& ids,
            Vector& counts) {
  ids.clear();
  ids.reserve(bow.counts.size());
  counts.resize(static_cast<Index>(bow.counts.size()));
  Index w = 0;
  for (const auto& [idx, n] : bow.counts) {
    if (idx < 0 || idx >= vocab_size) {
      throw std::invalid_argument("bow index out of vocabulary range");
    }
    ids.push_back(idx);
    counts[w++] = static_cast<Real>(n);
  }
}

Matrix expected_log_topics(const Matrix& lambda) {
  Matrix elog(lambda.rows(), lambda.cols());
  for (Index k = 0; k < lambda.rows(); ++k) {
    const Real total = digamma(lambda.row(k).sum());
    for (Index v = 0; v < lambda.cols(); ++v) {
      elog(k, v) = digamma(lambda(k, v)) - total;
    }
  }
  return elog;
}

// Document bound at gamma with optimal phi folded in via log-sum-exp:
//   sum_w n_w log(sum_k expElogTheta_k exp(logTopics_kw))
//   + (alpha - gamma).ElogTheta + sum lgamma(gamma) - lgamma(sum gamma)
//   + lgamma(sum alpha) - sum lgamma(alpha)
Real document_bound(const Vector& alpha, const Matrix& topics_at_ids,
                    const Vector& counts, const Vector& gamma) {
  const Vector elog_theta = dirichlet_expect_log(gamma);
  const Vector exp_elog_theta = elog_theta.array().exp();
  Real bound = 0;
  for (Index w = 0; w < counts.size(); ++w) {
    const Real phinorm = exp_elog_theta.dot(topics_at_ids.col(w)) + kPhiFloor;
    bound += counts[w] * std::log(phinorm);
  }
  bound += (alpha - gamma).dot(elog_theta);
  for (Index k = 0; k < gamma.size(); ++k) {
    bound += std::lgamma(gamma[k]) - std::lgamma(alpha[k]);
  }
  bound += std::lgamma(alpha.sum()) - std::lgamma(gamma.sum());
  return bound;
}

// Shared gamma ascent; `topics_at_ids` is the (K x n_ids) slice of either
// exp E[log beta] (training) or the point-estimate topics (scoring).
Vector optimize_gamma(const Vector& alpha, const Matrix& topics_at_ids,
                      const Vector& counts, int max_iterations, Real tol,
                      const std::function<void(const Vector&)>& on_iterate) {
  const Index num_topics = alpha.size();
  Vector gamma = Vector::Ones(num_topics);
  Vector exp_elog_theta = dirichlet_expect_log(gamma).array().exp();
  for (int it = 0; it < std::max(1, max_iterations); ++it) {
    Vector weighted = Vector::Zero(num_topics);
    for (Index w = 0; w < counts.size(); ++w) {
      const Real phinorm =
          exp_elog_theta.dot(topics_at_ids.col(w)) + kPhiFloor;
      weighted += (counts[w] / phinorm) * topics_at_ids.col(w);
    }
    const Vector gamma_new =
        alpha.array() + exp_elog_theta.array() * weighted.array();
    const Real mean_change =
        (gamma_new - gamma).cwiseAbs().sum() / static_cast<Real>(num_topics);
    gamma = gamma_new;
    exp_elog_theta = dirichlet_expect_log(gamma).array().exp();
    if (on_iterate) on_iterate(gamma);
    if (mean_change < tol) break;
  }
  return gamma;
}

}  // namespace

Vector LdaConfig::resolved_alpha() const {
  if (alpha.size() > 0) {
    if (alpha.size() != num_topics) {
      throw std::invalid_argument("alpha size does not match num_topics");
    }
    if ((alpha.array() <= 0).any()) {
      throw std::invalid_argument("alpha entries must be positive");
    }
    return alpha;
  }
  Vector a(num_topics);
  const Real root = std::sqrt(static_cast<Real>(num_topics));
  for (int k = 0; k < num_topics; ++k) {
    a[k] = Real(1) / (static_cast<Real>(k) + root);
  }
  return a;
}

Real LdaConfig::resolved_eta() const {
  return eta > 0 ? eta : Real(1) / static_cast<Real>(num_topics);
}

Matrix LdaModel::topic_word_distribution() const {
  Matrix phi = lambda;
  for (Index k = 0; k < phi.rows(); ++k) {
    phi.row(k) /= phi.row(k).sum();
  }
  return phi;
}

LdaModel train_lda(const std::vector<BowVector>& corpus,
                   const LdaConfig& config, Index vocab_size,
                   std::uint64_t vocab_hash) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  if (config.num_topics < 1) throw std::invalid_argument("num_topics < 1");
  if (vocab_size < 1) throw std::invalid_argument("vocab_size < 1");
  const Index num_topics = config.num_topics;
  const Vector alpha = config.resolved_alpha();
  const Real eta = config.resolved_eta();
  const std::size_t chunk_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(config.chunk_size));
  const auto num_docs = static_cast<Real>(corpus.size());

  Rng rng(config.seed);
  Matrix lambda(num_topics, vocab_size);
  for (Index k = 0; k < num_topics; ++k) {
    for (Index v = 0; v < vocab_size; ++v) {
      lambda(k, v) = gamma_sample(rng, 100.0, 0.01);
    }
  }

  std::vector<Index> ids;
  Vector counts;
  long update = 0;
  for (int pass = 0; pass < config.passes; ++pass) {
    for (std::size_t chunk_begin = 0; chunk_begin < corpus.size();
         chunk_begin += chunk_size) {
      const std::size_t chunk_end =
          std::min(corpus.size(), chunk_begin + chunk_size);
      const Matrix elog_beta = expected_log_topics(lambda);
      const Matrix exp_elog_beta = elog_beta.array().exp();
      Matrix sstats = Matrix::Zero(num_topics, vocab_size);

      for (std::size_t d = chunk_begin; d < chunk_end; ++d) {
        unpack(corpus[d], vocab_size, ids, counts);
        if (ids.empty()) continue;
        Matrix topics_at_ids(num_topics, static_cast<Index>(ids.size()));
        for (std::size_t w = 0; w < ids.size(); ++w) {
          topics_at_ids.col(static_cast<Index>(w)) =
              exp_elog_beta.col(ids[w]);
        }
        const Vector gamma =
            optimize_gamma(alpha, topics_at_ids, counts,
                           config.inner_iterations, config.gamma_tol, {});
        const Vector exp_elog_theta =
            dirichlet_expect_log(gamma).array().exp();
        for (std::size_t w = 0; w < ids.size(); ++w) {
          const Real phinorm =
              exp_elog_theta.dot(topics_at_ids.col(static_cast<Index>(w))) +
              kPhiFloor;
          sstats.col(ids[w]) += (counts[w] / phinorm) * exp_elog_theta;
        }
      }
      sstats.array() *= exp_elog_beta.array();

      const Real rho =
          std::pow(config.tau0 + static_cast<Real>(update), -config.decay);
      const Real scale = num_docs / static_cast<Real>(chunk_end - chunk_begin);
      lambda = (1 - rho) * lambda +
               rho * (Matrix::Constant(num_topics, vocab_size, eta) +
                      scale * sstats);
      ++update;
    }
  }

  LdaModel model;
  model.lambda = std::move(lambda);
  model.config = config;
  model.vocab_size = vocab_size;
  model.vocab_hash = vocab_hash;
  return model;
}

Vector lda_e_step_document(const Vector& alpha, const Matrix& log_topics,
                           const std::vector<Index>& ids,
                           const Vector& counts, int max_iterations, Real tol,
                           std::vector<Real>* bound_trace) {
  Matrix topics_at_ids(log_topics.rows(), static_cast<Index>(ids.size()));
  for (std::size_t w = 0; w < ids.size(); ++w) {
    topics_at_ids.col(static_cast<Index>(w)) =
        log_topics.col(ids[w]).array().exp();
  }
  std::function<void(const Vector&)> recorder;
  if (bound_trace != nullptr) {
    recorder = [&](const Vector& gamma) {
      bound_trace->push_back(
          document_bound(alpha, topics_at_ids, counts, gamma));
    };
  }
  return optimize_gamma(alpha, topics_at_ids, counts, max_iterations, tol,
                        recorder);
}

DocTopics infer_doc_topics(const LdaModel& model, const BowVector& bow) {
  std::vector<Index> ids;
  Vector counts;
  unpack(bow, model.vocab_size, ids, counts);
  const Vector alpha = model.config.resolved_alpha();
  const Matrix log_phi =
      model.topic_word_distribution().array().max(kPhiFloor).log();
  DocTopics dt;
  dt.section_id = bow.section_id;
  dt.gamma = lda_e_step_document(alpha, log_phi, ids, counts,
                                 model.config.inner_iterations,
                                 model.config.gamma_tol);
  dt.theta = dt.gamma / dt.gamma.sum();
  return dt;
}

PerplexityReport perplexity(const LdaModel& model,
                            const std::vector<BowVector>& heldout) {
  if (heldout.empty()) throw std::invalid_argument("empty held-out set");
  const Vector alpha = model.config.resolved_alpha();
  const Matrix phi = model.topic_word_distribution();
  const Matrix log_phi = phi.array().max(kPhiFloor).log();

  PerplexityReport report;
  std::vector<Index> ids;
  Vector counts;
  for (const auto& bow : heldout) {
    unpack(bow, model.vocab_size, ids, counts);
    ++report.num_docs;
    if (ids.empty()) continue;
    Matrix topics_at_ids(phi.rows(), static_cast<Index>(ids.size()));
    for (std::size_t w = 0; w < ids.size(); ++w) {
      topics_at_ids.col(static_cast<Index>(w)) = phi.col(ids[w]);
    }
    const Vector gamma =
        optimize_gamma(alpha, topics_at_ids, counts,
                       model.config.inner_iterations, model.config.gamma_tol,
                       {});
    report.total_log_likelihood +=
        document_bound(alpha, topics_at_ids, counts, gamma);
    report.total_words += static_cast<long>(counts.sum());
  }
  if (report.total_words == 0) {
    throw std::invalid_argument("held-out set has zero total words");
  }
  report.perplexity = std::exp(-report.total_log_likelihood /
                               static_cast<Real>(report.total_words));
  return report;
}

std::vector<std::pair<std::string, Real>> top_keywords(const LdaModel& model,
                                                       const Vocabulary& vocab,
                                                       int topic, int n) {
  if (topic < 0 || topic >= model.num_topics()) {
    throw std::invalid_argument("topic index out of range");
  }
  const Vector row =
      model.lambda.row(topic) / model.lambda.row(topic).sum();
  std::vector<Index> order(row.size());
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });
  const int take = std::min<int>(n, static_cast<int>(row.size()));
  std::vector<std::pair<std::string, Real>> out;
  out.reserve(take);
  for (int i = 0; i < take; ++i) {
    out.emplace_back(vocab.terms.at(order[i]), row[order[i]]);
  }
  return out;
}

TopicSweepResult sweep_topics(const std::vector<BowVector>& corpus,
                              const std::vector<int>& grid,
                              const LdaConfig& base, Index vocab_size,
                              std::uint64_t vocab_hash) {
  if (grid.empty()) throw std::invalid_argument("empty topic grid");
  auto parts = split_shuffle(corpus, {0.9, 0.1}, base.seed);
  const auto& train = parts[0];
  const auto& test = parts[1].empty() ? parts[0] : parts[1];

  TopicSweepResult result;
  Real best_perplexity = std::numeric_limits<Real>::infinity();
  for (const int k : grid) {
    LdaConfig config = base;
    config.num_topics = k;
    config.alpha = Vector();  // re-derive the asymmetric prior per K
    LdaModel model = train_lda(train, config, vocab_size, vocab_hash);
    const PerplexityReport report = perplexity(model, test);
    result.rows.push_back({k, report.perplexity});
    if (report.perplexity < best_perplexity) {
      best_perplexity = report.perplexity;
      result.best_num_topics = k;
      result.best_model = std::move(model);
    }
  }
  return result;
}

void LdaModel::save_json(const std::string& path) const {
  nlohmann::json obj;
  obj["format"] = "patmine-lda-1";
  obj["vocab_size"] = vocab_size;
  obj["vocab_hash"] = vocab_hash;
  nlohmann::json cfg;
  cfg["num_topics"] = config.num_topics;
  cfg["alpha"] = std::vector<Real>(config.resolved_alpha().begin(),
                                   config.resolved_alpha().end());
  cfg["eta"] = config.resolved_eta();
  cfg["passes"] = config.passes;
  cfg["inner_iterations"] = config.inner_iterations;
  cfg["gamma_tol"] = config.gamma_tol;
  cfg["chunk_size"] = config.chunk_size;
  cfg["tau0"] = config.tau0;
  cfg["decay"] = config.decay;
  cfg["seed"] = config.seed;
  obj["config"] = cfg;
  nlohmann::json rows = nlohmann::json::array();
  for (Index k = 0; k < lambda.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (Index v = 0; v < lambda.cols(); ++v) row.push_back(lambda(k, v));
    rows.push_back(std::move(row));
  }
  obj["lambda"] = std::move(rows);
  write_text(path, obj.dump() + "\n");
}

LdaModel LdaModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  nlohmann::json obj = nlohmann::json::parse(in, nullptr, false);
  if (obj.is_discarded() || obj.value("format", "") != "patmine-lda-1") {
    throw DataError(path + ": not a topic model file");
  }
  LdaModel model;
  model.vocab_size = obj.at("vocab_size").get<Index>();
  model.vocab_hash = obj.at("vocab_hash").get<std::uint64_t>();
  const auto& cfg = obj.at("config");
  model.config.num_topics = cfg.at("num_topics").get<int>();
  const auto alpha = cfg.at("alpha").get<std::vector<Real>>();
  model.config.alpha =
      Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
  model.config.eta = cfg.at("eta").get<Real>();
  model.config.passes = cfg.at("passes").get<int>();
  model.config.inner_iterations = cfg.at("inner_iterations").get<int>();
  model.config.gamma_tol = cfg.at("gamma_tol").get<Real>();
  model.config.chunk_size = cfg.at("chunk_size").get<int>();
  model.config.tau0 = cfg.at("tau0").get<Real>();
  model.config.decay = cfg.at("decay").get<Real>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  const auto& rows = obj.at("lambda");
  model.lambda.resize(model.config.num_topics, model.vocab_size);
  for (Index k = 0; k < model.lambda.rows(); ++k) {
    const auto& row = rows.at(static_cast<std::size_t>(k));
    for (Index v = 0; v < model.lambda.cols(); ++v) {
      model.lambda(k, v) = row.at(static_cast<std::size_t>(v)).get<Real>();
    }
  }
  return model;
}

}  // namespace patmine
