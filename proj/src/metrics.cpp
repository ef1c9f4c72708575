#include "patmine/metrics.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "patmine/io_util.hpp"

namespace patmine {
namespace {

ClassPrf make_prf(long tp, long fp, long fn, long support) {
  ClassPrf out;
  out.support = support;
  out.precision = tp + fp > 0 ? static_cast<Real>(tp) / static_cast<Real>(tp + fp) : 0;
  out.recall = tp + fn > 0 ? static_cast<Real>(tp) / static_cast<Real>(tp + fn) : 0;
  out.f1 = out.precision + out.recall > 0
               ? 2 * out.precision * out.recall / (out.precision + out.recall)
               : 0;
  return out;
}

void check_aligned(const std::vector<std::vector<int>>& pred,
                   const std::vector<std::vector<int>>& gold) {
  if (pred.size() != gold.size()) {
    throw std::invalid_argument("prediction and gold sentence counts differ");
  }
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (pred[s].size() != gold[s].size()) {
      throw std::invalid_argument("sentence " + std::to_string(s) +
                                  ": label sequences differ in length");
    }
  }
}

}  // namespace

TokenEvalResult token_prf(const std::vector<std::vector<int>>& pred,
                          const std::vector<std::vector<int>>& gold,
                          const LabelSet& labels) {
  check_aligned(pred, gold);
  const int C = labels.num_classes();
  const int o_axis = C;  // "O" is the final axis entry

  TokenEvalResult result;
  result.confusion.axis = labels.class_names();
  result.confusion.axis.push_back("O");
  result.confusion.counts =
      Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Zero(C + 1, C + 1);

  std::vector<long> tp(C, 0), fp(C, 0), fn(C, 0), support(C, 0);
  for (std::size_t s = 0; s < pred.size(); ++s) {
    for (std::size_t t = 0; t < pred[s].size(); ++t) {
      const int pc = LabelSet::class_of(pred[s][t]);
      const int gc = LabelSet::class_of(gold[s][t]);
      const int prow = pc < 0 ? o_axis : pc;
      const int grow = gc < 0 ? o_axis : gc;
      ++result.confusion.counts(grow, prow);
      if (gc >= 0) ++support[gc];
      if (pc == gc) {
        if (pc >= 0) ++tp[pc];
      } else {
        if (pc >= 0) ++fp[pc];
        if (gc >= 0) ++fn[gc];
      }
    }
  }

  result.report.mode = PrfMode::Token;
  result.report.class_names = labels.class_names();
  long tp_all = 0, fp_all = 0, fn_all = 0, support_all = 0;
  for (int c = 0; c < C; ++c) {
    result.report.per_class.push_back(make_prf(tp[c], fp[c], fn[c], support[c]));
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
    support_all += support[c];
  }
  result.report.micro = make_prf(tp_all, fp_all, fn_all, support_all);
  return result;
}

ConfusionMatrix label_confusion(const std::vector<std::vector<int>>& pred,
                                const std::vector<std::vector<int>>& gold,
                                const LabelSet& labels) {
  check_aligned(pred, gold);
  ConfusionMatrix cm;
  const int L = labels.num_labels();
  cm.axis.reserve(L);
  for (int i = 0; i < L; ++i) cm.axis.push_back(labels.label_name(i));
  cm.counts = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Zero(L, L);
  for (std::size_t s = 0; s < pred.size(); ++s) {
    for (std::size_t t = 0; t < pred[s].size(); ++t) {
      ++cm.counts(gold[s][t], pred[s][t]);
    }
  }
  return cm;
}

PrfReport entity_prf(const std::vector<std::vector<EntitySpan>>& pred,
                     const std::vector<std::vector<EntitySpan>>& gold,
                     const LabelSet& labels) {
  if (pred.size() != gold.size()) {
    throw std::invalid_argument("prediction and gold sentence counts differ");
  }
  const int C = labels.num_classes();
  std::vector<long> tp(C, 0), fp(C, 0), fn(C, 0), support(C, 0);
  for (std::size_t s = 0; s < pred.size(); ++s) {
    std::set<std::tuple<int, std::size_t, std::size_t>> gold_set;
    for (const auto& span : gold[s]) {
      gold_set.emplace(span.cls, span.start, span.end);
      ++support[span.cls];
    }
    for (const auto& span : pred[s]) {
      const auto key = std::make_tuple(span.cls, span.start, span.end);
      if (gold_set.erase(key) > 0) {
        ++tp[span.cls];
      } else {
        ++fp[span.cls];
      }
    }
    for (const auto& missed : gold_set) ++fn[std::get<0>(missed)];
  }
  PrfReport report;
  report.mode = PrfMode::Entity;
  report.class_names = labels.class_names();
  long tp_all = 0, fp_all = 0, fn_all = 0, support_all = 0;
  for (int c = 0; c < C; ++c) {
    report.per_class.push_back(make_prf(tp[c], fp[c], fn[c], support[c]));
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
    support_all += support[c];
  }
  report.micro = make_prf(tp_all, fp_all, fn_all, support_all);
  return report;
}

Real cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("rating lists differ in length");
  }
  if (a.empty()) throw std::invalid_argument("empty rating lists");
  const auto n = static_cast<Real>(a.size());
  std::map<int, long> count_a, count_b;
  long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  const Real p_o = static_cast<Real>(agree) / n;
  Real p_e = 0;
  for (const auto& [category, ca] : count_a) {
    const auto it = count_b.find(category);
    if (it == count_b.end()) continue;
    p_e += (static_cast<Real>(ca) / n) * (static_cast<Real>(it->second) / n);
  }
  if (p_e >= 1.0) {
    if (p_o >= 1.0) return 1.0;
    throw std::invalid_argument(
        "degenerate marginals (p_e = 1) with disagreement");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

std::pair<Real, Real> percentage_agreement(const std::vector<Real>& scores) {
  if (scores.empty()) throw std::invalid_argument("empty score list");
  Real worst = 0, best = 0;
  for (const Real s : scores) {
    if (s != 0 && s != 0.5 && s != 1) {
      throw std::invalid_argument("scores must be 0, 0.5, or 1");
    }
    worst += s == 1 ? 1 : 0;
    best += s >= 0.5 ? 1 : 0;
  }
  const auto n = static_cast<Real>(scores.size());
  return {worst / n, best / n};
}

void save_prf_tsv(const std::string& path, const PrfReport& report) {
  std::ostringstream out;
  out << "class\tprecision\trecall\tf1\tsupport\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    const auto& prf = report.per_class[c];
    out << report.class_names[c] << '\t' << format_fixed(prf.precision, 6)
        << '\t' << format_fixed(prf.recall, 6) << '\t'
        << format_fixed(prf.f1, 6) << '\t' << prf.support << '\n';
  }
  out << "micro avg\t" << format_fixed(report.micro.precision, 6) << '\t'
      << format_fixed(report.micro.recall, 6) << '\t'
      << format_fixed(report.micro.f1, 6) << '\t' << report.micro.support
      << '\n';
  write_text(path, out.str());
}

void save_confusion_tsv(const std::string& path, const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& name : cm.axis) out << '\t' << name;
  out << '\n';
  for (Index r = 0; r < cm.counts.rows(); ++r) {
    out << cm.axis[static_cast<std::size_t>(r)];
    for (Index c = 0; c < cm.counts.cols(); ++c) out << '\t' << cm.counts(r, c);
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace patmine
