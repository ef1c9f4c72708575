// patmine: a two-stage pipeline for mining manufacturing information from
// patent description text.  Stage one filters sections by topic (LDA +
// mini-batch k-Means with human cluster labeling); stage two extracts typed
// entities with a neural CRF tagger.  Stages hand data off through files so
// the labeling step can happen between runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "patmine/cluster_labels.hpp"
#include "patmine/cluster_quality.hpp"
#include "patmine/corpus.hpp"
#include "patmine/embeddings.hpp"
#include "patmine/error.hpp"
#include "patmine/io_util.hpp"
#include "patmine/kmeans.hpp"
#include "patmine/lda.hpp"
#include "patmine/metrics.hpp"
#include "patmine/ner_data.hpp"
#include "patmine/pipeline_config.hpp"
#include "patmine/tagger.hpp"
#include "patmine/vectorize.hpp"

namespace pm = patmine;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 42;
  bool seed_given = false;
  int threads = 1;
  std::string out_dir;
  bool json_summary = false;
  pm::PipelineConfig config;

  std::uint64_t resolved_seed() const {
    return seed_given ? seed : config.get_seed(seed);
  }
  std::string in_out_dir(const std::string& path) const {
    if (out_dir.empty() || path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute() || p.has_parent_path()) return path;
    return (std::filesystem::path(out_dir) / p).string();
  }
};

void print_summary(const GlobalOpts& g, const std::string& command,
                   const json& fields, const std::string& text) {
  if (g.json_summary) {
    json obj = fields;
    obj["command"] = command;
    std::cout << obj.dump() << '\n';
  } else {
    std::cout << command << ": " << text << '\n';
  }
}

struct SectionRecord {
  std::string section_id;
  std::string heading;
  std::vector<std::string> tokens;
};

std::vector<SectionRecord> load_sections(const std::string& path) {
  std::vector<SectionRecord> sections;
  pm::for_each_jsonl(path, [&](const json& obj, std::size_t) {
    SectionRecord rec;
    rec.section_id = obj.at("section_id").get<std::string>();
    rec.heading = obj.value("heading", "");
    rec.tokens = obj.at("tokens").get<std::vector<std::string>>();
    sections.push_back(std::move(rec));
  });
  return sections;
}

std::vector<pm::TokenizedSection> to_tokenized(
    const std::vector<SectionRecord>& sections) {
  std::vector<pm::TokenizedSection> out;
  out.reserve(sections.size());
  for (const auto& rec : sections) {
    out.push_back({rec.section_id, rec.tokens, rec.tokens.size()});
  }
  return out;
}

// Per-document topic mixtures, transformed for clustering.
pm::Matrix transformed_thetas(const pm::LdaModel& model,
                              const std::vector<pm::BowVector>& bows,
                              pm::Transform transform) {
  pm::Matrix points(static_cast<pm::Index>(bows.size()), model.num_topics());
  for (std::size_t i = 0; i < bows.size(); ++i) {
    const pm::DocTopics dt = infer_doc_topics(model, bows[i]);
    points.row(static_cast<pm::Index>(i)) =
        apply_transform(dt.theta, transform).transpose();
  }
  return points;
}

void check_vocab_hash(const std::string& model_path, std::uint64_t model_hash,
                      const pm::Vocabulary& vocab) {
  if (model_hash != 0 && model_hash != vocab.hash()) {
    throw pm::DataError(model_path +
                        ": vocabulary hash mismatch; the model was trained "
                        "against a different vocabulary file");
  }
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stoi(item));
  }
  return grid;
}

// ---- subcommand bodies ------------------------------------------------------

struct IngestOpts {
  std::string in, out, raw_out, stopwords, lemmas;
  bool include_headings = false;
};

void run_ingest(const GlobalOpts& g, const IngestOpts& o) {
  pm::require_file(o.in);
  const std::string stopword_path =
      !o.stopwords.empty()
          ? o.stopwords
          : g.config.get("corpus.stopwords", "data/stopwords_en.txt");
  const std::string lemma_path =
      !o.lemmas.empty() ? o.lemmas
                        : g.config.get("corpus.lemmas", "data/lemma_en.tsv");
  pm::require_file(stopword_path);
  pm::require_file(lemma_path);
  const pm::NormResources resources =
      pm::NormResources::load(stopword_path, lemma_path);

  pm::HeadingConfig heading_cfg;
  heading_cfg.include_heading_tokens =
      o.include_headings || g.config.get_bool("corpus.include_headings", false);
  const std::string extra = g.config.get("corpus.heading_patterns", "");
  if (!extra.empty()) {
    std::stringstream ss(extra);
    std::string pattern;
    while (std::getline(ss, pattern, ';')) {
      if (!pattern.empty()) heading_cfg.patterns.push_back(pattern);
    }
  }

  const std::string out_path = g.in_out_dir(o.out);
  const std::string raw_path = g.in_out_dir(o.raw_out);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pm::DataError("cannot write: " + out_path);
  std::ofstream raw;
  if (!raw_path.empty()) {
    raw.open(raw_path, std::ios::binary);
    if (!raw) throw pm::DataError("cannot write: " + raw_path);
  }

  std::size_t docs = 0, section_count = 0, token_count = 0;
  pm::for_each_jsonl(o.in, [&](const json& obj, std::size_t lineno) {
    pm::RawDocument doc;
    doc.doc_id = obj.at("doc_id").get<std::string>();
    doc.body = obj.at("body").get<std::string>();
    if (doc.doc_id.empty()) {
      throw pm::DataError(o.in + ":" + std::to_string(lineno) +
                          ": empty doc_id");
    }
    ++docs;
    for (const auto& section : segment_sections(doc, heading_cfg)) {
      std::string text = section.body;
      if (heading_cfg.include_heading_tokens && !section.heading.empty()) {
        text = section.heading + "\n" + text;
      }
      const auto tokens = pm::normalize(pm::tokenize(text), resources);
      token_count += tokens.size();
      ++section_count;
      json record;
      record["section_id"] = section.section_id;
      record["heading"] = section.heading;
      record["tokens"] = tokens;
      out << record.dump() << '\n';
      if (raw.is_open()) {
        raw << json{{"section_id", section.section_id},
                    {"heading", section.heading},
                    {"body", section.body}}
                   .dump()
            << '\n';
      }
    }
  });
  print_summary(g, "ingest",
                {{"documents", docs},
                 {"sections", section_count},
                 {"tokens", token_count},
                 {"out", out_path}},
                std::to_string(docs) + " documents -> " +
                    std::to_string(section_count) + " sections (" +
                    std::to_string(token_count) + " tokens)");
}

struct VocabOpts {
  std::string in, out;
  long min_doc_freq = -1;
  double max_doc_fraction = -1;
  long min_chars = -1;
};

void run_build_vocab(const GlobalOpts& g, const VocabOpts& o) {
  pm::require_file(o.in);
  pm::VocabCriteria criteria;
  criteria.min_doc_freq = static_cast<std::size_t>(
      o.min_doc_freq >= 0 ? o.min_doc_freq
                          : g.config.get_int("vocab.min_doc_freq", 200));
  criteria.max_doc_fraction =
      o.max_doc_fraction >= 0
          ? o.max_doc_fraction
          : g.config.get_real("vocab.max_doc_fraction", 0.70);
  criteria.min_chars = static_cast<std::size_t>(
      o.min_chars >= 0 ? o.min_chars : g.config.get_int("vocab.min_chars", 3));

  const auto sections = to_tokenized(load_sections(o.in));
  const pm::Vocabulary vocab = build_vocabulary(sections, criteria);
  const std::string out_path = g.in_out_dir(o.out);
  vocab.save_tsv(out_path);
  print_summary(g, "build-vocab",
                {{"terms", vocab.size()},
                 {"sections", sections.size()},
                 {"out", out_path}},
                std::to_string(vocab.size()) + " terms from " +
                    std::to_string(sections.size()) + " sections");
}

struct VectorizeOpts {
  std::string in, vocab, out, policy_out;
  bool no_truncate = false;
};

void run_vectorize(const GlobalOpts& g, const VectorizeOpts& o) {
  pm::require_file(o.in);
  pm::require_file(o.vocab);
  const pm::Vocabulary vocab = pm::Vocabulary::load_tsv(o.vocab);
  const auto sections = to_tokenized(load_sections(o.in));
  if (sections.empty()) throw pm::DataError(o.in + ": no sections");

  pm::TruncationPolicy policy;
  const bool truncate =
      !o.no_truncate && g.config.get_bool("vectorize.truncate", true);
  if (truncate) {
    std::vector<std::size_t> lengths;
    lengths.reserve(sections.size());
    for (const auto& sec : sections) lengths.push_back(sec.tokens.size());
    policy = pm::compute_truncation(lengths);
  }

  std::vector<pm::BowVector> bows;
  bows.reserve(sections.size());
  long total = 0;
  for (const auto& sec : sections) {
    bows.push_back(vectorize(sec, vocab, truncate ? &policy : nullptr));
    total += bows.back().total;
  }
  const std::string out_path = g.in_out_dir(o.out);
  save_bow_jsonl(out_path, bows);
  if (!o.policy_out.empty()) {
    std::ostringstream ps;
    ps << "q1\tq3\tq_trunc\n"
       << pm::format_real(policy.q1) << '\t' << pm::format_real(policy.q3)
       << '\t' << pm::format_real(policy.q_trunc) << '\n';
    pm::write_text(g.in_out_dir(o.policy_out), ps.str());
  }
  std::ostringstream text;
  text << bows.size() << " vectors, " << total << " counted tokens";
  if (truncate) text << ", q_trunc=" << policy.q_trunc;
  print_summary(g, "vectorize",
                {{"vectors", bows.size()},
                 {"tokens", total},
                 {"q_trunc", truncate ? policy.q_trunc : -1.0},
                 {"out", out_path}},
                text.str());
}

pm::LdaConfig lda_config_from(const GlobalOpts& g) {
  pm::LdaConfig cfg;
  cfg.num_topics = static_cast<int>(g.config.get_int("lda.num_topics", 10));
  cfg.eta = g.config.get_real("lda.eta", -1);
  cfg.passes = static_cast<int>(g.config.get_int("lda.passes", 1));
  cfg.inner_iterations =
      static_cast<int>(g.config.get_int("lda.inner_iterations", 50));
  cfg.chunk_size = static_cast<int>(g.config.get_int("lda.chunk_size", 4096));
  cfg.tau0 = g.config.get_real("lda.tau0", 1.0);
  cfg.decay = g.config.get_real("lda.decay", 0.5);
  cfg.gamma_tol = g.config.get_real("lda.gamma_tol", 1e-3);
  cfg.seed = g.resolved_seed();
  return cfg;
}

struct TrainLdaOpts {
  std::string bow, vocab, out;
  int num_topics = -1;
  int passes = -1;
  int chunk_size = -1;
};

void run_train_lda(const GlobalOpts& g, const TrainLdaOpts& o) {
  pm::require_file(o.bow);
  pm::require_file(o.vocab);
  const pm::Vocabulary vocab = pm::Vocabulary::load_tsv(o.vocab);
  const auto bows = pm::load_bow_jsonl(o.bow);
  pm::LdaConfig cfg = lda_config_from(g);
  if (o.num_topics > 0) cfg.num_topics = o.num_topics;
  if (o.passes > 0) cfg.passes = o.passes;
  if (o.chunk_size > 0) cfg.chunk_size = o.chunk_size;
  const pm::LdaModel model = train_lda(bows, cfg, vocab.size(), vocab.hash());
  const std::string out_path = g.in_out_dir(o.out);
  model.save_json(out_path);
  print_summary(g, "train-lda",
                {{"num_topics", cfg.num_topics},
                 {"documents", bows.size()},
                 {"vocab_size", vocab.size()},
                 {"out", out_path}},
                "K=" + std::to_string(cfg.num_topics) + " on " +
                    std::to_string(bows.size()) + " documents");
}

struct SweepTopicsOpts {
  std::string bow, vocab, grid, out, best_out;
};

void run_sweep_topics(const GlobalOpts& g, const SweepTopicsOpts& o) {
  pm::require_file(o.bow);
  pm::require_file(o.vocab);
  const pm::Vocabulary vocab = pm::Vocabulary::load_tsv(o.vocab);
  const auto bows = pm::load_bow_jsonl(o.bow);
  const std::string grid_text =
      !o.grid.empty()
          ? o.grid
          : g.config.get("lda.grid", "5,10,15,20,25,30,35,40,50,60,70,80,90,100");
  const auto grid = parse_grid(grid_text);
  if (grid.empty()) throw pm::UsageError("empty --grid");
  const pm::LdaConfig base = lda_config_from(g);
  const pm::TopicSweepResult result =
      sweep_topics(bows, grid, base, vocab.size(), vocab.hash());

  std::ostringstream table;
  table << "num_topics\tperplexity\n";
  for (const auto& row : result.rows) {
    table << row.num_topics << '\t' << pm::format_real(row.perplexity) << '\n';
  }
  const std::string out_path = g.in_out_dir(o.out);
  pm::write_text(out_path, table.str());
  if (!o.best_out.empty()) {
    result.best_model.save_json(g.in_out_dir(o.best_out));
  }
  print_summary(g, "sweep-topics",
                {{"grid_size", grid.size()},
                 {"best_num_topics", result.best_num_topics},
                 {"out", out_path}},
                "best K = " + std::to_string(result.best_num_topics) +
                    " over " + std::to_string(grid.size()) + " models");
}

struct KeywordsOpts {
  std::string model, vocab, out;
  int top = 10;
};

void run_keywords(const GlobalOpts& g, const KeywordsOpts& o) {
  pm::require_file(o.model);
  pm::require_file(o.vocab);
  const pm::LdaModel model = pm::LdaModel::load_json(o.model);
  const pm::Vocabulary vocab = pm::Vocabulary::load_tsv(o.vocab);
  check_vocab_hash(o.model, model.vocab_hash, vocab);
  std::ostringstream out;
  out << "topic\trank\tterm\tprob\n";
  for (int k = 0; k < model.num_topics(); ++k) {
    const auto keywords = top_keywords(model, vocab, k, o.top);
    for (std::size_t r = 0; r < keywords.size(); ++r) {
      out << k << '\t' << (r + 1) << '\t' << keywords[r].first << '\t'
          << pm::format_real(keywords[r].second) << '\n';
    }
  }
  const std::string out_path = g.in_out_dir(o.out);
  pm::write_text(out_path, out.str());
  print_summary(g, "keywords",
                {{"topics", model.num_topics()}, {"out", out_path}},
                std::to_string(model.num_topics()) + " topics -> " + out_path);
}

pm::MiniBatchKMeansOptions kmeans_options_from(const GlobalOpts& g) {
  pm::MiniBatchKMeansOptions opts;
  opts.batch_size =
      static_cast<int>(g.config.get_int("kmeans.batch_size", 4096));
  opts.max_iters = static_cast<int>(g.config.get_int("kmeans.max_iters", 100));
  opts.tol = g.config.get_real("kmeans.tol", 1e-4);
  opts.seed = g.resolved_seed();
  return opts;
}

struct TrainKmeansOpts {
  std::string model, bow, out, transform;
  int k = -1;
};

void run_train_kmeans(const GlobalOpts& g, const TrainKmeansOpts& o) {
  pm::require_file(o.model);
  pm::require_file(o.bow);
  const pm::LdaModel model = pm::LdaModel::load_json(o.model);
  const auto bows = pm::load_bow_jsonl(o.bow);
  if (bows.empty()) throw pm::DataError(o.bow + ": no documents");
  const pm::Transform transform = pm::transform_from_string(
      !o.transform.empty() ? o.transform
                           : g.config.get("kmeans.transform", "l2"));
  const int k =
      o.k > 0 ? o.k : static_cast<int>(g.config.get_int("kmeans.k", 60));
  const pm::Matrix points = transformed_thetas(model, bows, transform);
  const pm::ClusterModel cluster_model =
      train_minibatch_kmeans(points, k, kmeans_options_from(g), transform);
  const std::string out_path = g.in_out_dir(o.out);
  cluster_model.save_json(out_path);
  print_summary(g, "train-kmeans",
                {{"k", k}, {"points", bows.size()}, {"out", out_path}},
                "k=" + std::to_string(k) + " on " +
                    std::to_string(bows.size()) + " documents");
}

struct SweepClustersOpts {
  std::string model, bow, out, best_out, grid, transform, select_by;
  int k_min = 5, k_max = 60, k_step = 1;
  long sample_size = -1;
  int replicates = -1;
};

void run_sweep_clusters(const GlobalOpts& g, const SweepClustersOpts& o) {
  pm::require_file(o.model);
  pm::require_file(o.bow);
  const pm::LdaModel model = pm::LdaModel::load_json(o.model);
  const auto bows = pm::load_bow_jsonl(o.bow);
  if (bows.empty()) throw pm::DataError(o.bow + ": no documents");
  const pm::Transform transform = pm::transform_from_string(
      !o.transform.empty() ? o.transform
                           : g.config.get("kmeans.transform", "l2"));
  std::vector<int> grid;
  if (!o.grid.empty()) {
    grid = parse_grid(o.grid);
  } else {
    for (int k = o.k_min; k <= o.k_max; k += o.k_step) grid.push_back(k);
  }
  if (grid.empty()) throw pm::UsageError("empty cluster grid");

  pm::ClusterSweepOptions sweep_opts;
  sweep_opts.kmeans = kmeans_options_from(g);
  sweep_opts.sample_size = static_cast<std::size_t>(
      o.sample_size > 0 ? o.sample_size
                        : g.config.get_int("kmeans.sample_size", 10000));
  sweep_opts.replicates =
      o.replicates > 0
          ? o.replicates
          : static_cast<int>(g.config.get_int("kmeans.replicates", 6));
  const std::string select =
      !o.select_by.empty() ? o.select_by : g.config.get("kmeans.select_by", "db");
  if (select == "silhouette") {
    sweep_opts.select_by = pm::ClusterSelection::Silhouette;
  } else if (select == "db") {
    sweep_opts.select_by = pm::ClusterSelection::DaviesBouldin;
  } else {
    throw pm::UsageError("--select-by must be db or silhouette");
  }

  const pm::Matrix points = transformed_thetas(model, bows, transform);
  const pm::ClusterSweepResult result =
      sweep_clusters(points, grid, sweep_opts, transform);

  std::ostringstream table;
  table << "k\tdavies_bouldin\tsilhouette_mean\tsilhouette_std\n";
  for (const auto& report : result.reports) {
    table << report.k << '\t' << pm::format_real(report.davies_bouldin) << '\t'
          << pm::format_real(report.silhouette_mean) << '\t'
          << pm::format_real(report.silhouette_std) << '\n';
  }
  const std::string out_path = g.in_out_dir(o.out);
  pm::write_text(out_path, table.str());
  if (!o.best_out.empty()) {
    result.best_model.save_json(g.in_out_dir(o.best_out));
  }
  print_summary(g, "sweep-clusters",
                {{"grid_size", grid.size()},
                 {"selected_k", result.selected_k},
                 {"out", out_path}},
                "selected k = " + std::to_string(result.selected_k) + " by " +
                    select);
}

struct AssignOpts {
  std::string kmeans, model, bow, out, theta_out;
};

void run_assign(const GlobalOpts& g, const AssignOpts& o) {
  pm::require_file(o.kmeans);
  pm::require_file(o.model);
  pm::require_file(o.bow);
  const pm::ClusterModel cluster_model = pm::ClusterModel::load_json(o.kmeans);
  const pm::LdaModel model = pm::LdaModel::load_json(o.model);
  const auto bows = pm::load_bow_jsonl(o.bow);

  std::vector<std::pair<std::string, int>> assignments;
  assignments.reserve(bows.size());
  std::ostringstream thetas;
  for (const auto& bow : bows) {
    const pm::DocTopics dt = infer_doc_topics(model, bow);
    const pm::Vector point = apply_transform(dt.theta, cluster_model.transform);
    assignments.emplace_back(bow.section_id, assign(cluster_model, point));
    if (!o.theta_out.empty()) {
      thetas << bow.section_id;
      for (pm::Index k = 0; k < dt.theta.size(); ++k) {
        thetas << '\t' << pm::format_real(dt.theta[k]);
      }
      thetas << '\n';
    }
  }
  const std::string out_path = g.in_out_dir(o.out);
  pm::save_assignments_tsv(out_path, assignments);
  if (!o.theta_out.empty()) {
    pm::write_text(g.in_out_dir(o.theta_out), thetas.str());
  }
  print_summary(g, "assign",
                {{"documents", bows.size()}, {"out", out_path}},
                std::to_string(bows.size()) + " documents assigned");
}

struct LabelTemplateOpts {
  std::string kmeans, model, vocab, out;
  int top = 10;
};

void run_label_template(const GlobalOpts& g, const LabelTemplateOpts& o) {
  pm::require_file(o.kmeans);
  pm::require_file(o.model);
  pm::require_file(o.vocab);
  const pm::ClusterModel cluster_model = pm::ClusterModel::load_json(o.kmeans);
  const pm::LdaModel model = pm::LdaModel::load_json(o.model);
  const pm::Vocabulary vocab = pm::Vocabulary::load_tsv(o.vocab);
  check_vocab_hash(o.model, model.vocab_hash, vocab);

  std::vector<pm::ClusterLabel> labels;
  std::map<int, std::string> comments;
  for (int c = 0; c < cluster_model.k; ++c) {
    pm::ClusterLabel label;
    label.cluster_id = c;
    label.dominant_topic = dominant_topic(cluster_model, c);
    label.label_text = "topic-" + std::to_string(label.dominant_topic);
    label.relevant = false;
    std::ostringstream comment;
    comment << "cluster " << c << " keywords:";
    for (const auto& [term, prob] :
         top_keywords(model, vocab, label.dominant_topic, o.top)) {
      comment << ' ' << term;
    }
    comments[c] = comment.str();
    labels.push_back(std::move(label));
  }
  const std::string out_path = g.in_out_dir(o.out);
  save_labels_tsv(out_path, labels, comments);
  print_summary(g, "label-template",
                {{"clusters", cluster_model.k}, {"out", out_path}},
                std::to_string(cluster_model.k) +
                    " clusters written for labeling -> " + out_path);
}

struct FilterOpts {
  std::string sections, assignments, labels, out, counts_out;
};

void run_filter_sections(const GlobalOpts& g, const FilterOpts& o) {
  pm::require_file(o.sections);
  pm::require_file(o.assignments);
  pm::require_file(o.labels);
  const auto assignments = pm::load_assignments_tsv(o.assignments);
  const auto labels = pm::load_labels_tsv(o.labels);
  const pm::RelevanceFilterResult result = filter_relevant(assignments, labels);
  const std::set<std::string> keep(result.relevant_ids.begin(),
                                   result.relevant_ids.end());

  // Pass matching lines through untouched so any section schema works.
  const std::string out_path = g.in_out_dir(o.out);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pm::DataError("cannot write: " + out_path);
  std::size_t total = 0, kept = 0;
  std::ifstream in(o.sections);
  if (!in) throw pm::DataError("cannot open: " + o.sections);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++total;
    const json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("section_id")) {
      throw pm::DataError(o.sections + ": line without section_id");
    }
    if (keep.count(obj.at("section_id").get<std::string>()) > 0) {
      out << line << '\n';
      ++kept;
    }
  }
  if (!o.counts_out.empty()) {
    std::ostringstream counts;
    counts << "cluster_id\tsections\n";
    for (const auto& [cluster, n] : result.counts_per_cluster) {
      counts << cluster << '\t' << n << '\n';
    }
    pm::write_text(g.in_out_dir(o.counts_out), counts.str());
  }
  print_summary(g, "filter-sections",
                {{"total", total}, {"kept", kept}, {"out", out_path}},
                std::to_string(kept) + " of " + std::to_string(total) +
                    " sections kept");
}

pm::TaggerConfig tagger_config_from(const GlobalOpts& g) {
  pm::TaggerConfig cfg;
  cfg.word_dim = static_cast<int>(g.config.get_int("ner.word_dim", 300));
  cfg.char_dim = static_cast<int>(g.config.get_int("ner.char_dim", 25));
  cfg.use_char = g.config.get_bool("ner.use_char", false);
  cfg.use_conv = g.config.get_bool("ner.use_conv", false);
  cfg.use_attention = g.config.get_bool("ner.use_attention", false);
  cfg.conv_width = static_cast<int>(g.config.get_int("ner.conv_width", 3));
  cfg.conv_filters =
      static_cast<int>(g.config.get_int("ner.conv_filters", 128));
  cfg.attention_heads =
      static_cast<int>(g.config.get_int("ner.attention_heads", 4));
  cfg.hidden_size = static_cast<int>(g.config.get_int("ner.hidden_size", 128));
  cfg.dropout = g.config.get_real("ner.dropout", 0.5);
  cfg.learning_rate = g.config.get_real("ner.learning_rate", 1e-3);
  cfg.weight_decay = g.config.get_real("ner.weight_decay", 1e-2);
  cfg.patience = static_cast<int>(g.config.get_int("ner.patience", 20));
  cfg.max_epochs = static_cast<int>(g.config.get_int("ner.max_epochs", 200));
  cfg.batch_size = static_cast<int>(g.config.get_int("ner.batch_size", 32));
  cfg.clip_norm = g.config.get_real("ner.clip_norm", 5.0);
  cfg.strict_decode = g.config.get_bool("ner.strict_decode", false);
  cfg.seed = g.resolved_seed();
  return cfg;
}

pm::LabelSet label_set_from(const GlobalOpts& g, const std::string& classes) {
  const std::string text =
      !classes.empty() ? classes : g.config.get("ner.classes", "");
  if (text.empty()) return pm::LabelSet::pharma();
  std::vector<std::string> names;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return pm::LabelSet(names);
}

struct NerTrainOpts {
  std::string train, dev, out, history_out, embeddings, classes;
  double dev_fraction = 0.1;
  int word_dim = -1, char_dim = -1, hidden_size = -1, conv_filters = -1;
  int conv_width = -1, attention_heads = -1, patience = -1, max_epochs = -1;
  int batch_size = -1;
  double dropout = -1, learning_rate = -1, weight_decay = -1;
  bool use_char = false, use_conv = false, use_attention = false;
  bool strict_decode = false;
};

void run_ner_train(const GlobalOpts& g, const NerTrainOpts& o,
                   const CLI::App* cmd) {
  pm::require_file(o.train);
  pm::TaggerConfig cfg = tagger_config_from(g);
  if (o.word_dim > 0) cfg.word_dim = o.word_dim;
  if (o.char_dim > 0) cfg.char_dim = o.char_dim;
  if (o.hidden_size > 0) cfg.hidden_size = o.hidden_size;
  if (o.conv_filters > 0) cfg.conv_filters = o.conv_filters;
  if (o.conv_width > 0) cfg.conv_width = o.conv_width;
  if (o.attention_heads > 0) cfg.attention_heads = o.attention_heads;
  if (o.patience > 0) cfg.patience = o.patience;
  if (o.max_epochs > 0) cfg.max_epochs = o.max_epochs;
  if (o.batch_size > 0) cfg.batch_size = o.batch_size;
  if (o.dropout >= 0) cfg.dropout = o.dropout;
  if (o.learning_rate > 0) cfg.learning_rate = o.learning_rate;
  if (o.weight_decay >= 0) cfg.weight_decay = o.weight_decay;
  if (cmd->count("--use-char") > 0) cfg.use_char = o.use_char;
  if (cmd->count("--use-conv") > 0) cfg.use_conv = o.use_conv;
  if (cmd->count("--use-attention") > 0) cfg.use_attention = o.use_attention;
  if (cmd->count("--strict-decode") > 0) cfg.strict_decode = o.strict_decode;

  const pm::LabelSet labels = label_set_from(g, o.classes);
  pm::AnnotationLoadStats stats;
  auto sentences = load_annotations(o.train, labels, &stats);
  std::vector<pm::AnnotatedSentence> train, dev;
  if (!o.dev.empty()) {
    pm::require_file(o.dev);
    train = std::move(sentences);
    dev = load_annotations(o.dev, labels);
  } else {
    auto parts = pm::split_shuffle(
        sentences, {1.0 - o.dev_fraction, o.dev_fraction}, cfg.seed);
    train = std::move(parts[0]);
    dev = std::move(parts[1]);
  }

  const pm::TrainResult result =
      train_tagger(train, dev, cfg, labels, o.embeddings);
  const std::string out_path = g.in_out_dir(o.out);
  result.model.save_json(out_path);
  if (!o.history_out.empty()) {
    std::ostringstream hist;
    hist << "epoch\tmean_loss\tdev_f1\n";
    for (const auto& e : result.history.epochs) {
      hist << e.epoch << '\t' << pm::format_real(e.mean_loss) << '\t'
           << pm::format_real(e.dev_f1) << '\n';
    }
    pm::write_text(g.in_out_dir(o.history_out), hist.str());
  }
  json fields{{"train_sentences", train.size()},
              {"dev_sentences", dev.size()},
              {"repaired_labels", stats.repaired_labels},
              {"best_epoch", result.history.best_epoch},
              {"best_dev_f1", result.history.best_dev_f1},
              {"out", out_path}};
  std::ostringstream text;
  text << train.size() << " train / " << dev.size() << " dev sentences"
       << ", best dev F1 " << pm::format_fixed(result.history.best_dev_f1, 4)
       << " at epoch " << result.history.best_epoch;
  if (result.embedding_coverage) {
    fields["embedding_coverage"] = *result.embedding_coverage;
    text << ", embedding coverage "
         << pm::format_fixed(*result.embedding_coverage, 3);
  }
  print_summary(g, "ner-train", fields, text.str());
}

struct NerTagOpts {
  std::string model, in, out;
};

void run_ner_tag(const GlobalOpts& g, const NerTagOpts& o) {
  pm::require_file(o.model);
  pm::require_file(o.in);
  const pm::TaggerModel model = pm::TaggerModel::load_json(o.model);
  const std::string out_path = g.in_out_dir(o.out);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pm::DataError("cannot write: " + out_path);

  std::size_t sentences = 0, entities = 0;
  const auto emit = [&](const std::string& section_id,
                        const std::vector<std::string>& tokens) {
    if (tokens.empty()) return;
    const std::vector<int> labels = tag(model, tokens);
    std::vector<std::string> label_names;
    label_names.reserve(labels.size());
    for (const int l : labels) {
      label_names.push_back(model.labels().label_name(l));
    }
    const auto spans = decode_entities(tokens, labels, model.labels());
    json ents = json::array();
    for (const auto& span : spans) {
      ents.push_back({{"class", model.labels().class_name(span.cls)},
                      {"start", span.start},
                      {"end", span.end},
                      {"text", span.text}});
    }
    out << json{{"section_id", section_id},
                {"tokens", tokens},
                {"labels", label_names},
                {"entities", ents}}
               .dump()
        << '\n';
    ++sentences;
    entities += spans.size();
  };

  pm::for_each_jsonl(o.in, [&](const json& obj, std::size_t) {
    const std::string section_id = obj.value("section_id", "");
    if (obj.contains("body")) {
      for (const auto& sentence :
           pm::split_sentences(obj.at("body").get<std::string>())) {
        emit(section_id, pm::tokenize(sentence));
      }
    } else if (obj.contains("tokens")) {
      emit(section_id, obj.at("tokens").get<std::vector<std::string>>());
    } else {
      throw pm::DataError(o.in + ": objects need a body or tokens field");
    }
  });
  print_summary(g, "ner-tag",
                {{"sentences", sentences},
                 {"entities", entities},
                 {"out", out_path}},
                std::to_string(sentences) + " sentences, " +
                    std::to_string(entities) + " entities");
}

struct NerEvalOpts {
  std::string model, annotations, report_out, entity_report_out;
  std::string confusion_out, label_confusion_out;
};

void run_ner_eval(const GlobalOpts& g, const NerEvalOpts& o) {
  pm::require_file(o.model);
  pm::require_file(o.annotations);
  const pm::TaggerModel model = pm::TaggerModel::load_json(o.model);
  const auto sentences = load_annotations(o.annotations, model.labels());
  if (sentences.empty()) throw pm::DataError(o.annotations + ": no sentences");

  std::vector<std::vector<int>> pred, gold;
  std::vector<std::vector<pm::EntitySpan>> pred_spans, gold_spans;
  for (const auto& sentence : sentences) {
    pred.push_back(tag(model, sentence.tokens));
    gold.push_back(sentence.labels);
    pred_spans.push_back(
        decode_entities(sentence.tokens, pred.back(), model.labels()));
    gold_spans.push_back(
        decode_entities(sentence.tokens, sentence.labels, model.labels()));
  }
  const pm::TokenEvalResult token_result = token_prf(pred, gold, model.labels());
  const std::string report_path = g.in_out_dir(o.report_out);
  save_prf_tsv(report_path, token_result.report);
  if (!o.confusion_out.empty()) {
    save_confusion_tsv(g.in_out_dir(o.confusion_out), token_result.confusion);
  }
  if (!o.label_confusion_out.empty()) {
    save_confusion_tsv(g.in_out_dir(o.label_confusion_out),
                       label_confusion(pred, gold, model.labels()));
  }
  if (!o.entity_report_out.empty()) {
    save_prf_tsv(g.in_out_dir(o.entity_report_out),
                 entity_prf(pred_spans, gold_spans, model.labels()));
  }
  const auto& micro = token_result.report.micro;
  print_summary(g, "ner-eval",
                {{"sentences", sentences.size()},
                 {"token_micro_precision", micro.precision},
                 {"token_micro_recall", micro.recall},
                 {"token_micro_f1", micro.f1},
                 {"out", report_path}},
                "token micro P/R/F1 = " + pm::format_fixed(micro.precision, 4) +
                    "/" + pm::format_fixed(micro.recall, 4) + "/" +
                    pm::format_fixed(micro.f1, 4) + " on " +
                    std::to_string(sentences.size()) + " sentences");
}

struct AgreementOpts {
  std::string in, out;
};

void run_agreement(const GlobalOpts& g, const AgreementOpts& o) {
  pm::require_file(o.in);
  std::vector<pm::Real> label_scores;
  std::vector<int> manual_flags, model_flags;
  std::size_t lineno = 0;
  for (const auto& line : pm::read_lines(o.in)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = pm::split_tab(line);
    if (fields.size() != 4) {
      throw pm::DataError(
          o.in + ":" + std::to_string(lineno) +
          ": expected section_id<TAB>label_score<TAB>manual<TAB>model");
    }
    label_scores.push_back(std::stod(fields[1]));
    manual_flags.push_back(std::stoi(fields[2]));
    model_flags.push_back(std::stoi(fields[3]));
  }
  if (label_scores.empty()) throw pm::DataError(o.in + ": no review rows");

  pm::AgreementReport report;
  report.kappa = pm::cohens_kappa(manual_flags, model_flags);
  std::tie(report.pct_agreement_worst, report.pct_agreement_best) =
      pm::percentage_agreement(label_scores);
  if (!o.out.empty()) {
    std::ostringstream out;
    out << "metric\tvalue\n"
        << "cohens_kappa\t" << pm::format_real(report.kappa) << '\n'
        << "pct_agreement_worst\t"
        << pm::format_real(report.pct_agreement_worst) << '\n'
        << "pct_agreement_best\t" << pm::format_real(report.pct_agreement_best)
        << '\n';
    pm::write_text(g.in_out_dir(o.out), out.str());
  }
  print_summary(g, "agreement",
                {{"rows", label_scores.size()},
                 {"kappa", report.kappa},
                 {"pct_worst", report.pct_agreement_worst},
                 {"pct_best", report.pct_agreement_best}},
                "kappa=" + pm::format_fixed(report.kappa, 4) +
                    ", agreement worst/best = " +
                    pm::format_fixed(report.pct_agreement_worst, 4) + "/" +
                    pm::format_fixed(report.pct_agreement_best, 4));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patmine: patent manufacturing text mining pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  auto* seed_opt = app.add_option("--seed", g.seed, "global random seed");
  app.add_option("--threads", g.threads, "worker threads hint");
  app.add_option("--out-dir", g.out_dir,
                 "directory prefix for bare output paths");
  app.add_flag("--json-summary", g.json_summary,
               "emit a JSON summary line instead of text");

  IngestOpts ingest_opts;
  auto* ingest =
      app.add_subcommand("ingest", "segment and normalize documents");
  ingest->add_option("--in", ingest_opts.in, "corpus JSONL {doc_id, body}")
      ->required();
  ingest->add_option("--out", ingest_opts.out, "sections JSONL")->required();
  ingest->add_option("--raw-out", ingest_opts.raw_out,
                     "also write raw section bodies");
  ingest->add_option("--stopwords", ingest_opts.stopwords, "stopword file");
  ingest->add_option("--lemmas", ingest_opts.lemmas, "lemma TSV");
  ingest->add_flag("--include-headings", ingest_opts.include_headings,
                   "include heading tokens in the section token stream");

  VocabOpts vocab_opts;
  auto* build_vocab =
      app.add_subcommand("build-vocab", "build the filtered vocabulary");
  build_vocab->add_option("--in", vocab_opts.in, "sections JSONL")->required();
  build_vocab->add_option("--out", vocab_opts.out, "vocabulary TSV")
      ->required();
  build_vocab->add_option("--min-doc-freq", vocab_opts.min_doc_freq);
  build_vocab->add_option("--max-doc-fraction", vocab_opts.max_doc_fraction);
  build_vocab->add_option("--min-chars", vocab_opts.min_chars);

  VectorizeOpts vec_opts;
  auto* vectorize_cmd = app.add_subcommand(
      "vectorize", "bag-of-words vectors with IQR truncation");
  vectorize_cmd->add_option("--in", vec_opts.in, "sections JSONL")->required();
  vectorize_cmd->add_option("--vocab", vec_opts.vocab, "vocabulary TSV")
      ->required();
  vectorize_cmd->add_option("--out", vec_opts.out, "BoW JSONL")->required();
  vectorize_cmd->add_option("--policy-out", vec_opts.policy_out,
                            "write q1/q3/q_trunc TSV");
  vectorize_cmd->add_flag("--no-truncate", vec_opts.no_truncate);

  TrainLdaOpts lda_opts;
  auto* train_lda_cmd =
      app.add_subcommand("train-lda", "train the topic model");
  train_lda_cmd->add_option("--bow", lda_opts.bow, "BoW JSONL")->required();
  train_lda_cmd->add_option("--vocab", lda_opts.vocab, "vocabulary TSV")
      ->required();
  train_lda_cmd->add_option("--out", lda_opts.out, "model JSON")->required();
  train_lda_cmd->add_option("--num-topics", lda_opts.num_topics);
  train_lda_cmd->add_option("--passes", lda_opts.passes);
  train_lda_cmd->add_option("--chunk-size", lda_opts.chunk_size);

  SweepTopicsOpts sweep_topic_opts;
  auto* sweep_topics_cmd =
      app.add_subcommand("sweep-topics", "pick K by held-out perplexity");
  sweep_topics_cmd->add_option("--bow", sweep_topic_opts.bow)->required();
  sweep_topics_cmd->add_option("--vocab", sweep_topic_opts.vocab)->required();
  sweep_topics_cmd->add_option("--grid", sweep_topic_opts.grid,
                               "comma-separated topic counts");
  sweep_topics_cmd->add_option("--out", sweep_topic_opts.out, "table TSV")
      ->required();
  sweep_topics_cmd->add_option("--best-out", sweep_topic_opts.best_out,
                               "save the winning model");

  KeywordsOpts kw_opts;
  auto* keywords_cmd = app.add_subcommand("keywords", "top terms per topic");
  keywords_cmd->add_option("--model", kw_opts.model)->required();
  keywords_cmd->add_option("--vocab", kw_opts.vocab)->required();
  keywords_cmd->add_option("--out", kw_opts.out)->required();
  keywords_cmd->add_option("--top", kw_opts.top);

  TrainKmeansOpts km_opts;
  auto* train_kmeans_cmd =
      app.add_subcommand("train-kmeans", "cluster document topic mixtures");
  train_kmeans_cmd->add_option("--model", km_opts.model, "LDA model JSON")
      ->required();
  train_kmeans_cmd->add_option("--bow", km_opts.bow)->required();
  train_kmeans_cmd->add_option("--out", km_opts.out)->required();
  train_kmeans_cmd->add_option("--k", km_opts.k);
  train_kmeans_cmd->add_option("--transform", km_opts.transform,
                               "l2, sqrt, or none");

  SweepClustersOpts sc_opts;
  auto* sweep_clusters_cmd = app.add_subcommand(
      "sweep-clusters", "pick k by Davies-Bouldin / silhouette");
  sweep_clusters_cmd->add_option("--model", sc_opts.model)->required();
  sweep_clusters_cmd->add_option("--bow", sc_opts.bow)->required();
  sweep_clusters_cmd->add_option("--out", sc_opts.out)->required();
  sweep_clusters_cmd->add_option("--best-out", sc_opts.best_out);
  sweep_clusters_cmd->add_option("--grid", sc_opts.grid);
  sweep_clusters_cmd->add_option("--k-min", sc_opts.k_min);
  sweep_clusters_cmd->add_option("--k-max", sc_opts.k_max);
  sweep_clusters_cmd->add_option("--k-step", sc_opts.k_step);
  sweep_clusters_cmd->add_option("--sample-size", sc_opts.sample_size);
  sweep_clusters_cmd->add_option("--replicates", sc_opts.replicates);
  sweep_clusters_cmd->add_option("--transform", sc_opts.transform);
  sweep_clusters_cmd->add_option("--select-by", sc_opts.select_by,
                                 "db or silhouette");

  AssignOpts assign_opts;
  auto* assign_cmd =
      app.add_subcommand("assign", "assign documents to clusters");
  assign_cmd->add_option("--kmeans", assign_opts.kmeans)->required();
  assign_cmd->add_option("--model", assign_opts.model)->required();
  assign_cmd->add_option("--bow", assign_opts.bow)->required();
  assign_cmd->add_option("--out", assign_opts.out)->required();
  assign_cmd->add_option("--theta-out", assign_opts.theta_out,
                         "write topic mixtures TSV (for external plots)");

  LabelTemplateOpts lt_opts;
  auto* label_template_cmd =
      app.add_subcommand("label-template", "editable cluster label TSV");
  label_template_cmd->add_option("--kmeans", lt_opts.kmeans)->required();
  label_template_cmd->add_option("--model", lt_opts.model)->required();
  label_template_cmd->add_option("--vocab", lt_opts.vocab)->required();
  label_template_cmd->add_option("--out", lt_opts.out)->required();
  label_template_cmd->add_option("--top", lt_opts.top);

  FilterOpts filter_opts;
  auto* filter_cmd = app.add_subcommand("filter-sections",
                                        "keep sections in relevant clusters");
  filter_cmd->add_option("--sections", filter_opts.sections)->required();
  filter_cmd->add_option("--assignments", filter_opts.assignments)->required();
  filter_cmd->add_option("--labels", filter_opts.labels)->required();
  filter_cmd->add_option("--out", filter_opts.out)->required();
  filter_cmd->add_option("--counts-out", filter_opts.counts_out);

  NerTrainOpts nt_opts;
  auto* ner_train_cmd =
      app.add_subcommand("ner-train", "train the entity tagger");
  ner_train_cmd->add_option("--train", nt_opts.train, "annotations TSV")
      ->required();
  ner_train_cmd->add_option("--dev", nt_opts.dev, "dev annotations TSV");
  ner_train_cmd->add_option("--dev-fraction", nt_opts.dev_fraction);
  ner_train_cmd->add_option("--out", nt_opts.out, "checkpoint JSON")
      ->required();
  ner_train_cmd->add_option("--history-out", nt_opts.history_out);
  ner_train_cmd->add_option("--embeddings", nt_opts.embeddings,
                            "pretrained word vectors (text format)");
  ner_train_cmd->add_option("--classes", nt_opts.classes,
                            "comma-separated entity classes");
  ner_train_cmd->add_option("--word-dim", nt_opts.word_dim);
  ner_train_cmd->add_option("--char-dim", nt_opts.char_dim);
  ner_train_cmd->add_option("--hidden-size", nt_opts.hidden_size);
  ner_train_cmd->add_option("--conv-filters", nt_opts.conv_filters);
  ner_train_cmd->add_option("--conv-width", nt_opts.conv_width);
  ner_train_cmd->add_option("--attention-heads", nt_opts.attention_heads);
  ner_train_cmd->add_option("--patience", nt_opts.patience);
  ner_train_cmd->add_option("--max-epochs", nt_opts.max_epochs);
  ner_train_cmd->add_option("--batch-size", nt_opts.batch_size);
  ner_train_cmd->add_option("--dropout", nt_opts.dropout);
  ner_train_cmd->add_option("--learning-rate", nt_opts.learning_rate);
  ner_train_cmd->add_option("--weight-decay", nt_opts.weight_decay);
  ner_train_cmd->add_flag("--use-char", nt_opts.use_char);
  ner_train_cmd->add_flag("--use-conv", nt_opts.use_conv);
  ner_train_cmd->add_flag("--use-attention", nt_opts.use_attention);
  ner_train_cmd->add_flag("--strict-decode", nt_opts.strict_decode);

  NerTagOpts ntag_opts;
  auto* ner_tag_cmd =
      app.add_subcommand("ner-tag", "tag sections or token lists");
  ner_tag_cmd->add_option("--model", ntag_opts.model)->required();
  ner_tag_cmd
      ->add_option("--in", ntag_opts.in, "JSONL with body (raw) or tokens")
      ->required();
  ner_tag_cmd->add_option("--out", ntag_opts.out)->required();

  NerEvalOpts ne_opts;
  auto* ner_eval_cmd =
      app.add_subcommand("ner-eval", "score the tagger on gold annotations");
  ner_eval_cmd->add_option("--model", ne_opts.model)->required();
  ner_eval_cmd->add_option("--annotations", ne_opts.annotations)->required();
  ner_eval_cmd->add_option("--report-out", ne_opts.report_out)->required();
  ner_eval_cmd->add_option("--entity-report-out", ne_opts.entity_report_out);
  ner_eval_cmd->add_option("--confusion-out", ne_opts.confusion_out);
  ner_eval_cmd->add_option("--label-confusion-out",
                           ne_opts.label_confusion_out);

  AgreementOpts ag_opts;
  auto* agreement_cmd = app.add_subcommand(
      "agreement", "kappa + percentage agreement from a review file");
  agreement_cmd->add_option("--in", ag_opts.in, "review TSV")->required();
  agreement_cmd->add_option("--out", ag_opts.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    if (!g.config_path.empty()) {
      pm::require_file(g.config_path);
      g.config = pm::PipelineConfig::load(g.config_path);
    }
    g.seed_given = seed_opt->count() > 0;
    if (!g.out_dir.empty()) {
      std::filesystem::create_directories(g.out_dir);
    }

    if (ingest->parsed()) run_ingest(g, ingest_opts);
    else if (build_vocab->parsed()) run_build_vocab(g, vocab_opts);
    else if (vectorize_cmd->parsed()) run_vectorize(g, vec_opts);
    else if (train_lda_cmd->parsed()) run_train_lda(g, lda_opts);
    else if (sweep_topics_cmd->parsed()) run_sweep_topics(g, sweep_topic_opts);
    else if (keywords_cmd->parsed()) run_keywords(g, kw_opts);
    else if (train_kmeans_cmd->parsed()) run_train_kmeans(g, km_opts);
    else if (sweep_clusters_cmd->parsed()) run_sweep_clusters(g, sc_opts);
    else if (assign_cmd->parsed()) run_assign(g, assign_opts);
    else if (label_template_cmd->parsed()) run_label_template(g, lt_opts);
    else if (filter_cmd->parsed()) run_filter_sections(g, filter_opts);
    else if (ner_train_cmd->parsed()) run_ner_train(g, nt_opts, ner_train_cmd);
    else if (ner_tag_cmd->parsed()) run_ner_tag(g, ntag_opts);
    else if (ner_eval_cmd->parsed()) run_ner_eval(g, ne_opts);
    else if (agreement_cmd->parsed()) run_agreement(g, ag_opts);
  } catch (const pm::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
