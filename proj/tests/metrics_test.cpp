#include <doctest.h>

#include "patmine/metrics.hpp"
#include "patmine/rng.hpp"

using namespace patmine;

namespace {

// A compact two-class label set keeps the examples readable.
LabelSet ab_labels() { return LabelSet({"ALPHA", "BETA"}); }

}  // namespace

TEST_CASE("token_prf perfect prediction scores one") {
  const LabelSet labels = ab_labels();
  const std::vector<std::vector<int>> gold = {
      {labels.begin_label(0), labels.inside_label(0), 0},
      {0, labels.begin_label(1)}};
  const auto result = token_prf(gold, gold, labels);
  CHECK(result.report.micro.f1 == doctest::Approx(1.0));
  CHECK(result.report.micro.precision == doctest::Approx(1.0));
  CHECK(result.report.micro.support == 3);
}

TEST_CASE("token_prf total miss scores zero") {
  const LabelSet labels = ab_labels();
  const std::vector<std::vector<int>> gold = {{labels.begin_label(0), 0}};
  const std::vector<std::vector<int>> pred = {{0, 0}};
  const auto result = token_prf(pred, gold, labels);
  CHECK(result.report.per_class[0].recall == doctest::Approx(0.0));
  CHECK(result.report.micro.f1 == doctest::Approx(0.0));
}

TEST_CASE("token_prf matches hand-pooled counts on a constructed case") {
  const LabelSet labels = ab_labels();
  const int bA = labels.begin_label(0), iA = labels.inside_label(0);
  const int bB = labels.begin_label(1), iB = labels.inside_label(1);
  // 20 tokens; gold: 6 ALPHA, 6 BETA, 8 O.
  const std::vector<std::vector<int>> gold = {
      {bA, iA, iA, 0, 0, bB, iB, iB, 0, 0},
      {bA, iA, iA, 0, 0, bB, iB, iB, 0, 0}};
  // Predictions: ALPHA tokens 4 correct, 2 called O.
  //              BETA tokens 4 correct, 2 called ALPHA.
  //              O tokens: 6 correct, 2 called BETA.
  const std::vector<std::vector<int>> pred = {
      {bA, iA, 0, 0, 0, bB, iB, bA, 0, bB},
      {bA, iA, 0, 0, 0, bB, iB, bA, 0, bB}};
  const auto result = token_prf(pred, gold, labels);
  // ALPHA: TP 4, FP 2, FN 2 -> P = R = 2/3.
  CHECK(result.report.per_class[0].precision == doctest::Approx(4.0 / 6.0));
  CHECK(result.report.per_class[0].recall == doctest::Approx(4.0 / 6.0));
  CHECK(result.report.per_class[0].support == 6);
  // BETA: TP 4, FP 2, FN 2.
  CHECK(result.report.per_class[1].precision == doctest::Approx(4.0 / 6.0));
  // Micro: TP 8, FP 4, FN 4 -> P = R = F1 = 2/3.
  CHECK(result.report.micro.precision == doctest::Approx(2.0 / 3.0));
  CHECK(result.report.micro.recall == doctest::Approx(2.0 / 3.0));
  CHECK(result.report.micro.f1 == doctest::Approx(2.0 / 3.0));

  // Confusion matrix row/column sums equal gold/pred class counts.
  const auto& cm = result.confusion;
  REQUIRE(cm.axis.size() == 3);  // ALPHA, BETA, O
  CHECK(cm.counts.sum() == 20);
  CHECK(cm.counts.row(0).sum() == 6);
  CHECK(cm.counts.row(1).sum() == 6);
  CHECK(cm.counts.row(2).sum() == 8);
  CHECK(cm.counts.col(0).sum() == 6);  // predicted ALPHA
  CHECK(cm.counts.col(1).sum() == 6);
  CHECK(cm.counts.col(2).sum() == 8);
  CHECK(cm.counts(0, 2) == 2);  // ALPHA -> O errors
}

TEST_CASE("micro P equals R when all errors are class substitutions") {
  const LabelSet labels = ab_labels();
  const int bA = labels.begin_label(0);
  const int bB = labels.begin_label(1);
  const std::vector<std::vector<int>> gold = {{bA, bA, bB, bB, 0}};
  const std::vector<std::vector<int>> pred = {{bA, bB, bB, bA, 0}};
  const auto result = token_prf(pred, gold, labels);
  CHECK(result.report.micro.precision == result.report.micro.recall);
  CHECK(result.report.micro.precision == result.report.micro.f1);
}

TEST_CASE("token_prf validates alignment") {
  const LabelSet labels = ab_labels();
  CHECK_THROWS_AS(token_prf({{0}}, {{0, 0}}, labels), std::invalid_argument);
  CHECK_THROWS_AS(token_prf({{0}}, {}, labels), std::invalid_argument);
}

TEST_CASE("label_confusion covers the whole IOB space") {
  const LabelSet labels = LabelSet::pharma();
  const std::vector<std::vector<int>> gold = {{0, 1, 2}};
  const std::vector<std::vector<int>> pred = {{0, 1, 5}};
  const auto cm = label_confusion(pred, gold, labels);
  CHECK(cm.axis.size() == 33);
  CHECK(cm.counts.rows() == 33);
  CHECK(cm.counts.sum() == 3);
  CHECK(cm.counts(2, 5) == 1);
}

TEST_CASE("entity_prf strict matching") {
  const LabelSet labels = ab_labels();
  const std::vector<EntitySpan> g = {{0, 0, 2, "a b"}, {1, 4, 5, "x"}};

  SUBCASE("identical sets score one") {
    const auto report = entity_prf({g}, {g}, labels);
    CHECK(report.micro.f1 == doctest::Approx(1.0));
    CHECK(report.micro.support == 2);
  }

  SUBCASE("a boundary shift counts as FP and FN") {
    const std::vector<EntitySpan> p = {{0, 0, 3, "a b c"}, {1, 4, 5, "x"}};
    const auto report = entity_prf({p}, {g}, labels);
    CHECK(report.micro.precision == doctest::Approx(0.5));
    CHECK(report.micro.recall == doctest::Approx(0.5));
  }

  SUBCASE("random sets agree with set-intersection accounting") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<EntitySpan> gold, pred;
      long tp = 0;
      for (std::size_t s = 0; s < 6; ++s) {
        const bool in_gold = uniform_below(rng, 2) == 0;
        const bool in_pred = uniform_below(rng, 2) == 0;
        EntitySpan span{static_cast<int>(uniform_below(rng, 2)), 2 * s,
                        2 * s + 1, "t"};
        if (in_gold) gold.push_back(span);
        if (in_pred) pred.push_back(span);
        if (in_gold && in_pred) ++tp;
      }
      const auto report = entity_prf({pred}, {gold}, labels);
      const Real expect_p =
          pred.empty() ? 0.0 : static_cast<Real>(tp) / pred.size();
      const Real expect_r =
          gold.empty() ? 0.0 : static_cast<Real>(tp) / gold.size();
      CHECK(report.micro.precision == doctest::Approx(expect_p));
      CHECK(report.micro.recall == doctest::Approx(expect_r));
    }
  }
}

TEST_CASE("cohens_kappa closed forms") {
  CHECK(cohens_kappa({1, 0, 1, 0}, {1, 0, 1, 0}) == doctest::Approx(1.0));
  CHECK(cohens_kappa({1, 1, 0, 0}, {1, 0, 0, 1}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // 2x2 table rows (20, 5 / 10, 15): p_o = 0.7, p_e = 0.5, kappa = 0.4.
  std::vector<int> a, b;
  for (int i = 0; i < 20; ++i) { a.push_back(1); b.push_back(1); }
  for (int i = 0; i < 5; ++i) { a.push_back(1); b.push_back(0); }
  for (int i = 0; i < 10; ++i) { a.push_back(0); b.push_back(1); }
  for (int i = 0; i < 15; ++i) { a.push_back(0); b.push_back(0); }
  CHECK(cohens_kappa(a, b) == doctest::Approx(0.4).epsilon(1e-12));

  CHECK_THROWS_AS(cohens_kappa({1}, {1, 0}), std::invalid_argument);
  CHECK(cohens_kappa({1, 1}, {1, 1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cohens_kappa({1, 1, 1, 1}, {1, 1, 1, 0}),
                  std::invalid_argument);  // p_e = 1 with disagreement
}

TEST_CASE("kappa never exceeds observed agreement") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(20), b(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = static_cast<int>(uniform_below(rng, 3));
      b[i] = static_cast<int>(uniform_below(rng, 3));
    }
    long agree = 0;
    for (int i = 0; i < 20; ++i) agree += a[i] == b[i] ? 1 : 0;
    const Real p_o = agree / 20.0;
    try {
      CHECK(cohens_kappa(a, b) <= p_o + 1e-12);
    } catch (const std::invalid_argument&) {
      // degenerate marginals; acceptable
    }
  }
}

TEST_CASE("percentage_agreement worst and best cases") {
  const auto [worst, best] = percentage_agreement({1, 1, 0.5, 0});
  CHECK(worst == doctest::Approx(0.5));
  CHECK(best == doctest::Approx(0.75));

  CHECK(percentage_agreement({0.5, 0.5}) ==
        std::pair<Real, Real>{0.0, 1.0});
  CHECK(percentage_agreement({1, 1, 1}) == std::pair<Real, Real>{1.0, 1.0});
  CHECK_THROWS_AS(percentage_agreement({}), std::invalid_argument);
  CHECK_THROWS_AS(percentage_agreement({0.3}), std::invalid_argument);

  // worst <= mean(raw) <= best on random score lists.
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Real> scores;
    Real mean = 0;
    const std::size_t n = 1 + uniform_below(rng, 20);
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(0.5 * static_cast<Real>(uniform_below(rng, 3)));
      mean += scores.back();
    }
    mean /= static_cast<Real>(n);
    const auto [w, b] = percentage_agreement(scores);
    CHECK(w <= mean + 1e-12);
    CHECK(mean <= b + 1e-12);
  }
}
