#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patmine/iob.hpp"
#include "patmine/types.hpp"

namespace patmine {

enum class PrfMode { Token, Entity };

struct ClassPrf {
  Real precision = 0;
  Real recall = 0;
  Real f1 = 0;
  long support = 0;
};

struct PrfReport {
  PrfMode mode = PrfMode::Token;
  std::vector<std::string> class_names;
  std::vector<ClassPrf> per_class;
  ClassPrf micro;  // pooled TP/FP/FN over classes, O excluded
};

struct ConfusionMatrix {
  std::vector<std::string> axis;  // row = gold, column = predicted
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> counts;
};

struct TokenEvalResult {
  PrfReport report;
  ConfusionMatrix confusion;  // merged entity classes + "O" (last axis entry)
};

// Token-level scores: the class of a token is the entity class of its IOB
// label (B/I merged); O is excluded from micro pooling but appears in the
// confusion matrix.
TokenEvalResult token_prf(const std::vector<std::vector<int>>& pred,
                          const std::vector<std::vector<int>>& gold,
                          const LabelSet& labels);

// Confusion over the raw IOB label space (2C+1 axes including O).
ConfusionMatrix label_confusion(const std::vector<std::vector<int>>& pred,
                                const std::vector<std::vector<int>>& gold,
                                const LabelSet& labels);

// Strict span match: a true positive iff (class, start, end) all agree.
PrfReport entity_prf(const std::vector<std::vector<EntitySpan>>& pred,
                     const std::vector<std::vector<EntitySpan>>& gold,
                     const LabelSet& labels);

// kappa = (p_o - p_e) / (1 - p_e) with p_e from the marginal products.
Real cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

// Scores in {0, 0.5, 1}: worst case rounds 0.5 down, best case rounds up.
std::pair<Real, Real> percentage_agreement(const std::vector<Real>& scores);

struct AgreementReport {
  Real kappa = 0;
  Real pct_agreement_worst = 0;
  Real pct_agreement_best = 0;
};

void save_prf_tsv(const std::string& path, const PrfReport& report);
void save_confusion_tsv(const std::string& path, const ConfusionMatrix& cm);

}  // namespace patmine
