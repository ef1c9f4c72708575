#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patmine/types.hpp"
#include "patmine/vectorize.hpp"

namespace patmine {

struct LdaConfig {
  int num_topics = 10;
  Vector alpha;              // empty -> asymmetric default 1/(k + sqrt(K))
  Real eta = -1;             // < 0 -> 1/K
  int passes = 1;
  int inner_iterations = 50;
  Real gamma_tol = 1e-3;     // mean |dgamma| convergence threshold
  int chunk_size = 4096;
  Real tau0 = 1.0;           // learning-rate offset
  Real decay = 0.5;          // learning-rate exponent (rho_t = (tau0+t)^-decay)
  std::uint64_t seed = 42;

  Vector resolved_alpha() const;
  Real resolved_eta() const;
};

// Topic-word variational parameters lambda (K x V).  Rows of
// topic_word_distribution() are the normalized topics phi_k.
struct LdaModel {
  Matrix lambda;
  LdaConfig config;
  Index vocab_size = 0;
  std::uint64_t vocab_hash = 0;

  Index num_topics() const { return lambda.rows(); }
  Matrix topic_word_distribution() const;

  void save_json(const std::string& path) const;
  static LdaModel load_json(const std::string& path);
};

struct DocTopics {
  std::string section_id;
  Vector gamma;  // variational Dirichlet parameters
  Vector theta;  // gamma / sum(gamma)
};

struct PerplexityReport {
  Index num_docs = 0;
  long total_words = 0;
  Real total_log_likelihood = 0;  // sum of per-document variational bounds
  Real perplexity = 0;            // exp(-LL / total_words)
};

struct TopicSweepRow {
  int num_topics;
  Real perplexity;
};

struct TopicSweepResult {
  std::vector<TopicSweepRow> rows;
  int best_num_topics = 0;
  LdaModel best_model;
};

// Online variational Bayes: per chunk, an E-step optimizes per-document
// gamma/phi against the current expected log topics; the M-step blends the
// chunk's sufficient statistics into lambda with rate (tau0 + t)^-decay.
// Deterministic given seed and input order.
LdaModel train_lda(const std::vector<BowVector>& corpus,
                   const LdaConfig& config, Index vocab_size,
                   std::uint64_t vocab_hash = 0);

// E-step to convergence for one document against point-estimate topics.
DocTopics infer_doc_topics(const LdaModel& model, const BowVector& bow);

// Per-document variational lower bound on log p(w_d) with the topics held
// at their point estimates; perplexity = exp(-sum LL / sum words).
PerplexityReport perplexity(const LdaModel& model,
                            const std::vector<BowVector>& heldout);

// Top-n probability terms of one topic, ties broken by term index.
std::vector<std::pair<std::string, Real>> top_keywords(
    const LdaModel& model, const Vocabulary& vocab, int topic, int n = 10);

// Trains one model per grid entry on a 90% split (shuffled), scores the 10%
// split, and keeps the argmin-perplexity model.
TopicSweepResult sweep_topics(const std::vector<BowVector>& corpus,
                              const std::vector<int>& grid,
                              const LdaConfig& base, Index vocab_size,
                              std::uint64_t vocab_hash = 0);

// Internal E-step exposed for the bound-monotonicity property tests:
// optimizes gamma for one document and optionally records the per-iteration
// value of the document bound it ascends.
Vector lda_e_step_document(const Vector& alpha, const Matrix& log_topics,
                           const std::vector<Index>& ids,
                           const Vector& counts, int max_iterations,
                           Real tol, std::vector<Real>* bound_trace = nullptr);

}  // namespace patmine
