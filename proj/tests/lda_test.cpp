#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patmine/lda.hpp"
#include "patmine/math.hpp"
#include "support/synthetic.hpp"

using namespace patmine;
namespace ts = patmine::testsupport;

namespace {

BowVector bow_of(const std::string& id,
                 std::initializer_list<std::pair<Index, int>> counts) {
  BowVector bow;
  bow.section_id = id;
  for (const auto& [idx, n] : counts) {
    bow.counts[idx] = n;
    bow.total += n;
  }
  return bow;
}

// Hand-built model with point topics, for degenerate-case checks.
LdaModel model_from_phi(const Matrix& phi, Real alpha_value = 0.1) {
  LdaModel model;
  model.lambda = phi * 1e6;  // normalized rows reproduce phi
  model.lambda.array() += 1e-12;
  model.config.num_topics = static_cast<int>(phi.rows());
  model.config.alpha = Vector::Constant(phi.rows(), alpha_value);
  model.vocab_size = phi.cols();
  return model;
}

Real best_match_cosine(const Matrix& learned, const Matrix& truth) {
  // All permutations of up to 4 topics.
  const int k = static_cast<int>(truth.rows());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Real best = -1;
  do {
    Real worst_row = 2;
    for (int i = 0; i < k; ++i) {
      const auto a = learned.row(perm[i]);
      const auto b = truth.row(i);
      worst_row = std::min(worst_row, a.dot(b) / (a.norm() * b.norm()));
    }
    best = std::max(best, worst_row);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("digamma matches known values") {
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
  CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214235).epsilon(1e-12));
  CHECK(digamma(10.0) == doctest::Approx(2.251752589066721).epsilon(1e-12));
}

TEST_CASE("train_lda input validation") {
  LdaConfig cfg;
  CHECK_THROWS_AS(train_lda({}, cfg, 10), std::invalid_argument);
  CHECK_THROWS_AS(train_lda({bow_of("d", {{12, 1}})}, cfg, 10),
                  std::invalid_argument);
}

TEST_CASE("K=1 training recovers the smoothed unigram distribution") {
  std::vector<BowVector> corpus = {bow_of("a", {{0, 4}, {1, 1}}),
                                   bow_of("b", {{1, 3}, {2, 2}})};
  LdaConfig cfg;
  cfg.num_topics = 1;
  cfg.eta = 0.5;
  cfg.chunk_size = 16;  // single chunk: the first update replaces lambda
  cfg.passes = 1;
  const LdaModel model = train_lda(corpus, cfg, 3);
  // With one topic every word belongs to it, so lambda = eta + counts.
  Vector expected(3);
  expected << 0.5 + 4, 0.5 + 4, 0.5 + 2;
  expected /= expected.sum();
  const Matrix phi = model.topic_word_distribution();
  for (Index v = 0; v < 3; ++v) {
    CHECK(phi(0, v) == doctest::Approx(expected[v]).epsilon(1e-9));
  }
}

TEST_CASE("phi rows and theta are normalized") {
  const auto corpus = ts::make_topic_corpus(200, 60, 3, 40, 5);
  LdaConfig cfg;
  cfg.num_topics = 4;
  cfg.passes = 2;
  cfg.chunk_size = 64;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size);
  const Matrix phi = model.topic_word_distribution();
  for (Index k = 0; k < phi.rows(); ++k) {
    CHECK(phi.row(k).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(phi.row(k).minCoeff() >= 0);
  }
  for (int d = 0; d < 20; ++d) {
    const DocTopics dt = infer_doc_topics(model, corpus.bows[d]);
    CHECK(dt.theta.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dt.theta.minCoeff() >= 0);
  }
}

TEST_CASE("empty document posterior is the normalized prior") {
  Matrix phi(2, 4);
  phi << 0.25, 0.25, 0.25, 0.25, 0.1, 0.2, 0.3, 0.4;
  LdaModel model = model_from_phi(phi);
  model.config.alpha = Vector(2);
  model.config.alpha << 0.3, 0.9;
  BowVector empty;
  empty.section_id = "e";
  const DocTopics dt = infer_doc_topics(model, empty);
  CHECK(dt.theta[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(dt.theta[1] == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("document of planted-topic words concentrates on that topic") {
  Matrix phi = Matrix::Zero(3, 9);
  for (int k = 0; k < 3; ++k) {
    for (int v = 0; v < 3; ++v) phi(k, 3 * k + v) = 1.0 / 3.0;
  }
  const LdaModel model = model_from_phi(phi);
  const DocTopics dt = infer_doc_topics(model, bow_of("d", {{6, 3}, {7, 2}}));
  Index argmax;
  dt.theta.maxCoeff(&argmax);
  CHECK(argmax == 2);
}

TEST_CASE("perplexity of uniform single topic equals vocabulary size") {
  const Index V = 50;
  const Matrix phi = Matrix::Constant(1, V, 1.0 / static_cast<Real>(V));
  const LdaModel model = model_from_phi(phi, 0.7);
  const auto report =
      perplexity(model, {bow_of("a", {{0, 3}, {7, 2}}),
                         bow_of("b", {{12, 1}, {33, 4}})});
  CHECK(report.perplexity == doctest::Approx(static_cast<Real>(V)).epsilon(1e-9));
  CHECK(report.num_docs == 2);
  CHECK(report.total_words == 10);
}

TEST_CASE("perplexity report is self consistent and errors on empty input") {
  const auto corpus = ts::make_topic_corpus(100, 30, 2, 30, 9);
  LdaConfig cfg;
  cfg.num_topics = 2;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size);
  const auto report = perplexity(model, corpus.bows);
  CHECK(report.perplexity ==
        doctest::Approx(std::exp(-report.total_log_likelihood /
                                 static_cast<Real>(report.total_words))));
  CHECK(report.perplexity >= 1.0);
  CHECK_THROWS_AS(perplexity(model, {}), std::invalid_argument);
  BowVector empty;
  empty.section_id = "e";
  CHECK_THROWS_AS(perplexity(model, {empty}), std::invalid_argument);
}

TEST_CASE("document bound is non-decreasing across E-step iterations") {
  const auto corpus = ts::make_topic_corpus(50, 30, 3, 40, 13);
  LdaConfig cfg;
  cfg.num_topics = 3;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size);
  const Matrix log_phi =
      model.topic_word_distribution().array().max(1e-100).log();
  const Vector alpha = model.config.resolved_alpha();
  for (int d = 0; d < 20; ++d) {
    std::vector<Index> ids;
    Vector counts(static_cast<Index>(corpus.bows[d].counts.size()));
    Index w = 0;
    for (const auto& [idx, n] : corpus.bows[d].counts) {
      ids.push_back(idx);
      counts[w++] = n;
    }
    std::vector<Real> trace;
    lda_e_step_document(alpha, log_phi, ids, counts, 50, 0.0, &trace);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] >= trace[i - 1] - 1e-8);
    }
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto corpus = ts::make_topic_corpus(150, 40, 3, 30, 17);
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.seed = 123;
  const LdaModel a = train_lda(corpus.bows, cfg, corpus.vocab_size);
  const LdaModel b = train_lda(corpus.bows, cfg, corpus.vocab_size);
  CHECK((a.lambda - b.lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("top_keywords ranks by probability with index tie-break") {
  Matrix phi = Matrix::Zero(2, 5);
  phi(0, 3) = 1.0;                      // delta topic
  phi.row(1).setConstant(1.0 / 5.0);    // uniform topic
  const LdaModel model = model_from_phi(phi);
  Vocabulary vocab;
  vocab.terms = {"a", "b", "c", "d", "e"};
  for (Index i = 0; i < 5; ++i) vocab.index[vocab.terms[i]] = i;
  vocab.doc_freq.assign(5, 1);

  const auto delta = top_keywords(model, vocab, 0, 2);
  CHECK(delta[0].first == "d");
  CHECK(delta[0].second == doctest::Approx(1.0).epsilon(1e-6));

  const auto uniform = top_keywords(model, vocab, 1, 3);
  CHECK(uniform[0].first == "a");
  CHECK(uniform[1].first == "b");
  CHECK(uniform[2].first == "c");
  CHECK(uniform[0].second == doctest::Approx(0.2).epsilon(1e-6));

  CHECK_THROWS_AS(top_keywords(model, vocab, 5, 2), std::invalid_argument);
}

TEST_CASE("planted keywords stay within the planted support") {
  const auto corpus = ts::make_topic_corpus(600, 90, 3, 50, 21);
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.passes = 3;
  cfg.chunk_size = 128;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size);
  Vocabulary vocab;
  for (Index v = 0; v < corpus.vocab_size; ++v) {
    vocab.terms.push_back("w" + std::to_string(v));
    vocab.index[vocab.terms.back()] = v;
  }
  vocab.doc_freq.assign(static_cast<std::size_t>(corpus.vocab_size), 1);

  // Match each learned topic to a planted one, then check keyword support.
  const Matrix phi = model.topic_word_distribution();
  for (int k = 0; k < 3; ++k) {
    Real best = -1;
    int planted = 0;
    for (int t = 0; t < 3; ++t) {
      const Real cos = phi.row(k).dot(corpus.true_topics.row(t)) /
                       (phi.row(k).norm() * corpus.true_topics.row(t).norm());
      if (cos > best) {
        best = cos;
        planted = t;
      }
    }
    const Index support = corpus.vocab_size / 3;
    for (const auto& [term, prob] : top_keywords(model, vocab, k, 10)) {
      const Index idx = vocab.lookup(term);
      CHECK(idx >= planted * support);
      CHECK(idx < (planted + 1) * support);
    }
  }
}

TEST_CASE("synthetic topic recovery and sweep selection") {
  const auto corpus = ts::make_topic_corpus(800, 90, 3, 50, 23);
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.passes = 3;
  cfg.chunk_size = 256;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size);
  CHECK(best_match_cosine(model.topic_word_distribution(),
                          corpus.true_topics) > 0.9);

  cfg.passes = 2;
  const auto sweep = sweep_topics(corpus.bows, {3}, cfg, corpus.vocab_size);
  CHECK(sweep.best_num_topics == 3);  // single-element grid
  CHECK(sweep.rows.size() == 1);
}

TEST_CASE("shuffled training beats order-biased training on held out data") {
  // Documents sorted by topic make late chunks overwrite early topics.
  auto corpus = ts::make_topic_corpus(600, 60, 3, 40, 29);
  std::stable_sort(corpus.bows.begin(), corpus.bows.end(),
                   [](const BowVector& a, const BowVector& b) {
                     return a.counts.begin()->first < b.counts.begin()->first;
                   });
  const auto heldout = ts::make_topic_corpus(150, 60, 3, 40, 31).bows;
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.chunk_size = 64;
  cfg.passes = 1;
  const LdaModel ordered = train_lda(corpus.bows, cfg, 60);

  auto shuffled = corpus.bows;
  Rng rng(7);
  fisher_yates(shuffled, rng);
  const LdaModel shuffled_model = train_lda(shuffled, cfg, 60);

  CHECK(perplexity(shuffled_model, heldout).perplexity <=
        perplexity(ordered, heldout).perplexity);
}

TEST_CASE("model JSON round trip") {
  const auto corpus = ts::make_topic_corpus(80, 25, 2, 25, 37);
  LdaConfig cfg;
  cfg.num_topics = 2;
  const LdaModel model = train_lda(corpus.bows, cfg, corpus.vocab_size, 777);
  const std::string path = "/tmp/patmine_lda_test.json";
  model.save_json(path);
  const LdaModel loaded = LdaModel::load_json(path);
  CHECK(loaded.vocab_hash == 777);
  CHECK(loaded.vocab_size == model.vocab_size);
  CHECK((loaded.lambda - model.lambda).cwiseAbs().maxCoeff() == 0.0);
  const auto a = perplexity(model, corpus.bows);
  const auto b = perplexity(loaded, corpus.bows);
  CHECK(a.perplexity == b.perplexity);
}
