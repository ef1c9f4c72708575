#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "patmine/io_util.hpp"
#include "patmine/ner_data.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
namespace pm = patmine;
namespace ts = patmine::testsupport;
using nlohmann::json;

namespace {

const std::string kCli = PATMINE_CLI_PATH;
const std::string kData = PATMINE_DATA_DIR;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("patmine_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) {
  return (work_dir() / name).string();
}

void write_corpus_fixture(const std::string& path, std::size_t docs) {
  std::ofstream out(path);
  for (const auto& doc : ts::make_patent_fixture(docs, 303)) {
    json obj;
    obj["doc_id"] = doc.doc_id;
    obj["body"] = doc.body;
    out << obj.dump() << '\n';
  }
}

std::size_t count_lines(const std::string& path) {
  std::size_t n = 0;
  for (const auto& line : pm::read_lines(path)) {
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("ingest --help") == 0);
  CHECK(run_cli("no-such-command") == 1);
  CHECK(run_cli("ingest") == 1);                       // missing required flags
  CHECK(run_cli("ingest --in x --out y --bogus") == 1);
}

TEST_CASE("missing inputs exit 2") {
  CHECK(run_cli("ingest --in /nonexistent/corpus.jsonl --out " +
                path_of("x.jsonl") + " --stopwords " + kData +
                "/stopwords_en.txt --lemmas " + kData + "/lemma_en.tsv") == 2);
  CHECK(run_cli("build-vocab --in /nonexistent.jsonl --out " +
                path_of("v.tsv")) == 2);
}

TEST_CASE("stage one pipeline runs end to end") {
  write_corpus_fixture(path_of("corpus.jsonl"), 40);
  const std::string common =
      " --stopwords " + kData + "/stopwords_en.txt --lemmas " + kData +
      "/lemma_en.tsv";

  REQUIRE(run_cli("ingest --in " + path_of("corpus.jsonl") + " --out " +
                  path_of("sections.jsonl") + " --raw-out " +
                  path_of("raw_sections.jsonl") + common) == 0);
  REQUIRE(fs::exists(path_of("sections.jsonl")));
  const auto first_line = pm::read_lines(path_of("sections.jsonl")).at(0);
  const json section = json::parse(first_line);
  CHECK(section.contains("section_id"));
  CHECK(section.contains("heading"));
  CHECK(section.at("tokens").is_array());

  REQUIRE(run_cli("build-vocab --in " + path_of("sections.jsonl") + " --out " +
                  path_of("vocab.tsv") +
                  " --min-doc-freq 3 --max-doc-fraction 0.95") == 0);
  CHECK(count_lines(path_of("vocab.tsv")) > 10);

  REQUIRE(run_cli("vectorize --in " + path_of("sections.jsonl") + " --vocab " +
                  path_of("vocab.tsv") + " --out " + path_of("bow.jsonl") +
                  " --policy-out " + path_of("policy.tsv")) == 0);
  CHECK(count_lines(path_of("bow.jsonl")) == count_lines(path_of("sections.jsonl")));

  REQUIRE(run_cli("--seed 7 train-lda --bow " + path_of("bow.jsonl") +
                  " --vocab " + path_of("vocab.tsv") + " --out " +
                  path_of("lda.json") + " --num-topics 3 --passes 2") == 0);

  REQUIRE(run_cli("--seed 7 sweep-topics --bow " + path_of("bow.jsonl") +
                  " --vocab " + path_of("vocab.tsv") + " --grid 2,3 --out " +
                  path_of("topic_sweep.tsv")) == 0);
  CHECK(count_lines(path_of("topic_sweep.tsv")) == 3);  // header + 2 rows

  REQUIRE(run_cli("keywords --model " + path_of("lda.json") + " --vocab " +
                  path_of("vocab.tsv") + " --out " + path_of("keywords.tsv") +
                  " --top 5") == 0);
  const auto keyword_lines = pm::read_lines(path_of("keywords.tsv"));
  CHECK(keyword_lines.at(0) == "topic\trank\tterm\tprob");
  CHECK(count_lines(path_of("keywords.tsv")) == 1 + 3 * 5);

  REQUIRE(run_cli("--seed 7 train-kmeans --model " + path_of("lda.json") +
                  " --bow " + path_of("bow.jsonl") + " --out " +
                  path_of("kmeans.json") + " --k 3 --transform l2") == 0);

  REQUIRE(run_cli("--seed 7 sweep-clusters --model " + path_of("lda.json") +
                  " --bow " + path_of("bow.jsonl") + " --grid 2,3 --out " +
                  path_of("cluster_quality.tsv") + " --sample-size 200" +
                  " --replicates 2 --best-out " + path_of("kmeans_best.json")) ==
          0);
  CHECK(count_lines(path_of("cluster_quality.tsv")) == 3);

  REQUIRE(run_cli("assign --kmeans " + path_of("kmeans.json") + " --model " +
                  path_of("lda.json") + " --bow " + path_of("bow.jsonl") +
                  " --out " + path_of("assignments.tsv") + " --theta-out " +
                  path_of("theta.tsv")) == 0);
  CHECK(count_lines(path_of("assignments.tsv")) ==
        count_lines(path_of("bow.jsonl")));

  REQUIRE(run_cli("label-template --kmeans " + path_of("kmeans.json") +
                  " --model " + path_of("lda.json") + " --vocab " +
                  path_of("vocab.tsv") + " --out " + path_of("labels.tsv")) ==
          0);

  // The human step: mark every cluster relevant.
  std::ostringstream edited;
  for (const auto& line : pm::read_lines(path_of("labels.tsv"))) {
    if (line.empty() || line[0] == '#') {
      edited << line << '\n';
      continue;
    }
    std::string flipped = line;
    flipped.back() = '1';
    edited << flipped << '\n';
  }
  pm::write_text(path_of("labels_edited.tsv"), edited.str());

  REQUIRE(run_cli("filter-sections --sections " + path_of("sections.jsonl") +
                  " --assignments " + path_of("assignments.tsv") +
                  " --labels " + path_of("labels_edited.tsv") + " --out " +
                  path_of("relevant.jsonl") + " --counts-out " +
                  path_of("cluster_counts.tsv")) == 0);
  // All clusters relevant -> everything passes through.
  CHECK(count_lines(path_of("relevant.jsonl")) ==
        count_lines(path_of("sections.jsonl")));

  // Missing label rows are a data error.
  pm::write_text(path_of("labels_missing.tsv"), "0\t0\tonly-cluster-zero\t1\n");
  CHECK(run_cli("filter-sections --sections " + path_of("sections.jsonl") +
                " --assignments " + path_of("assignments.tsv") + " --labels " +
                path_of("labels_missing.tsv") + " --out " +
                path_of("relevant2.jsonl")) == 2);
}

TEST_CASE("stage two pipeline: train, tag, eval, agreement") {
  const auto labels = pm::LabelSet::pharma();
  const auto sentences = ts::make_ner_corpus(60, 909);
  pm::save_annotations(path_of("annotations.tsv"),
                       {sentences.begin(), sentences.begin() + 50}, labels);
  pm::save_annotations(path_of("annotations_test.tsv"),
                       {sentences.begin() + 50, sentences.end()}, labels);

  REQUIRE(run_cli("--seed 5 ner-train --train " + path_of("annotations.tsv") +
                  " --out " + path_of("ner.json") + " --history-out " +
                  path_of("history.tsv") +
                  " --word-dim 16 --hidden-size 12 --max-epochs 8"
                  " --batch-size 8 --dropout 0.1 --dev-fraction 0.2") == 0);
  REQUIRE(fs::exists(path_of("ner.json")));
  CHECK(count_lines(path_of("history.tsv")) >= 2);

  REQUIRE(run_cli("ner-tag --model " + path_of("ner.json") + " --in " +
                  path_of("relevant.jsonl") + " --out " +
                  path_of("tagged.jsonl")) == 0);
  CHECK(count_lines(path_of("tagged.jsonl")) > 0);
  const json tagged = json::parse(pm::read_lines(path_of("tagged.jsonl")).at(0));
  CHECK(tagged.contains("tokens"));
  CHECK(tagged.contains("labels"));
  CHECK(tagged.contains("entities"));
  CHECK(tagged.at("tokens").size() == tagged.at("labels").size());

  // Tagging raw bodies exercises the sentence splitter.
  REQUIRE(run_cli("ner-tag --model " + path_of("ner.json") + " --in " +
                  path_of("raw_sections.jsonl") + " --out " +
                  path_of("tagged_raw.jsonl")) == 0);
  CHECK(count_lines(path_of("tagged_raw.jsonl")) > 0);

  REQUIRE(run_cli("ner-eval --model " + path_of("ner.json") +
                  " --annotations " + path_of("annotations_test.tsv") +
                  " --report-out " + path_of("ner_report.tsv") +
                  " --entity-report-out " + path_of("ner_entity_report.tsv") +
                  " --confusion-out " + path_of("confusion.tsv") +
                  " --label-confusion-out " + path_of("label_confusion.tsv")) ==
          0);
  const auto report_lines = pm::read_lines(path_of("ner_report.tsv"));
  CHECK(report_lines.at(0) == "class\tprecision\trecall\tf1\tsupport");
  CHECK(report_lines.back().rfind("micro avg", 0) == 0);
  // Confusion matrix: 17 axis rows + header; label confusion: 33 + header.
  CHECK(count_lines(path_of("confusion.tsv")) == 18);
  CHECK(count_lines(path_of("label_confusion.tsv")) == 34);

  pm::write_text(path_of("review.tsv"),
                 "# section\tlabel_score\tmanual\tmodel\n"
                 "s0\t1\t1\t1\n"
                 "s1\t0.5\t0\t1\n"
                 "s2\t1\t1\t1\n"
                 "s3\t0\t0\t0\n");
  REQUIRE(run_cli("agreement --in " + path_of("review.tsv") + " --out " +
                  path_of("agreement.tsv")) == 0);
  const auto agreement_lines = pm::read_lines(path_of("agreement.tsv"));
  CHECK(agreement_lines.at(0) == "metric\tvalue");
  CHECK(count_lines(path_of("agreement.tsv")) == 4);
}

TEST_CASE("json summary mode emits parseable lines") {
  write_corpus_fixture(path_of("corpus2.jsonl"), 5);
  const std::string cmd =
      kCli + " --json-summary ingest --in " + path_of("corpus2.jsonl") +
      " --out " + path_of("sections2.jsonl") + " --stopwords " + kData +
      "/stopwords_en.txt --lemmas " + kData + "/lemma_en.tsv > " +
      path_of("summary.json") + " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const json summary =
      json::parse(pm::read_lines(path_of("summary.json")).at(0));
  CHECK(summary.at("command") == "ingest");
  CHECK(summary.at("documents").get<int>() == 5);
}

TEST_CASE("config file values are used and flags override them") {
  pm::write_text(path_of("pipeline.conf"),
                 "# pipeline configuration\n"
                 "vocab.min_doc_freq = 2\n"
                 "vocab.min_chars = 4\n"
                 "seed = 11\n");
  REQUIRE(run_cli("--config " + path_of("pipeline.conf") + " build-vocab --in " +
                  path_of("sections.jsonl") + " --out " +
                  path_of("vocab_cfg.tsv")) == 0);
  for (const auto& line : pm::read_lines(path_of("vocab_cfg.tsv"))) {
    if (line.empty()) continue;
    const auto term = line.substr(0, line.find('\t'));
    CHECK(term.size() >= 4);
  }
  // Flag overrides config: min_chars 6 prunes more.
  REQUIRE(run_cli("--config " + path_of("pipeline.conf") + " build-vocab --in " +
                  path_of("sections.jsonl") + " --out " +
                  path_of("vocab_cfg6.tsv") + " --min-chars 6") == 0);
  CHECK(count_lines(path_of("vocab_cfg6.tsv")) <
        count_lines(path_of("vocab_cfg.tsv")));
}

TEST_CASE("rerunning a stage leaves identical outputs") {
  REQUIRE(run_cli("--seed 7 train-lda --bow " + path_of("bow.jsonl") +
                  " --vocab " + path_of("vocab.tsv") + " --out " +
                  path_of("lda_rerun.json") + " --num-topics 3 --passes 2") ==
          0);
  std::ifstream a(path_of("lda.json"), std::ios::binary);
  std::ifstream b(path_of("lda_rerun.json"), std::ios::binary);
  const std::string content_a((std::istreambuf_iterator<char>(a)),
                              std::istreambuf_iterator<char>());
  const std::string content_b((std::istreambuf_iterator<char>(b)),
                              std::istreambuf_iterator<char>());
  CHECK(content_a == content_b);
}
