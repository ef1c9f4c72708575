#pragma once

#include <map>
#include <string>
#include <vector>

#include "patmine/kmeans.hpp"

namespace patmine {

// Human-editable cluster annotation: dominant topic plus an assigned label
// and a relevance flag, maintained in a TSV between pipeline stages.
struct ClusterLabel {
  int cluster_id = 0;
  int dominant_topic = 0;
  std::string label_text;
  bool relevant = false;
};

struct RelevanceFilterResult {
  std::vector<std::string> relevant_ids;       // input order preserved
  std::map<int, long> counts_per_cluster;      // all clusters seen
};

// Argmax over centroid coordinates; invariant under both transforms (L2 is a
// positive scaling, sqrt(x/2) is monotone), so transformed space is fine.
int dominant_topic(const ClusterModel& model, int cluster_id);

// Keeps sections whose cluster is flagged relevant.  Every cluster present in
// `assignments` must have a label entry; missing ones raise a DataError that
// lists the offending cluster ids.
RelevanceFilterResult filter_relevant(
    const std::vector<std::pair<std::string, int>>& assignments,
    const std::vector<ClusterLabel>& labels);

// TSV "cluster_id<TAB>dominant_topic<TAB>label<TAB>relevant(0/1)";
// '#' comment lines are preserved on write via the template writer and
// skipped on read.
void save_labels_tsv(const std::string& path,
                     const std::vector<ClusterLabel>& labels,
                     const std::map<int, std::string>& comments = {});
std::vector<ClusterLabel> load_labels_tsv(const std::string& path);

void save_assignments_tsv(
    const std::string& path,
    const std::vector<std::pair<std::string, int>>& assignments);
std::vector<std::pair<std::string, int>> load_assignments_tsv(
    const std::string& path);

}  // namespace patmine
