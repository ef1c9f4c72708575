#include "patmine/cluster_labels.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"

namespace patmine {

int dominant_topic(const ClusterModel& model, int cluster_id) {
  if (cluster_id < 0 || cluster_id >= model.k) {
    throw std::invalid_argument("cluster id out of range");
  }
  const auto row = model.centroids.row(cluster_id);
  int best = 0;
  for (Index j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = static_cast<int>(j);
  }
  return best;
}

RelevanceFilterResult filter_relevant(
    const std::vector<std::pair<std::string, int>>& assignments,
    const std::vector<ClusterLabel>& labels) {
  std::map<int, const ClusterLabel*> by_id;
  for (const auto& label : labels) by_id[label.cluster_id] = &label;

  std::set<int> missing;
  RelevanceFilterResult result;
  for (const auto& [section_id, cluster] : assignments) {
    ++result.counts_per_cluster[cluster];
    const auto it = by_id.find(cluster);
    if (it == by_id.end()) {
      missing.insert(cluster);
      continue;
    }
    if (it->second->relevant) result.relevant_ids.push_back(section_id);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "clusters without a label entry:";
    for (const int c : missing) msg << ' ' << c;
    throw DataError(msg.str());
  }
  return result;
}

void save_labels_tsv(const std::string& path,
                     const std::vector<ClusterLabel>& labels,
                     const std::map<int, std::string>& comments) {
  std::ostringstream out;
  out << "# cluster_id\tdominant_topic\tlabel\trelevant\n";
  for (const auto& label : labels) {
    const auto comment = comments.find(label.cluster_id);
    if (comment != comments.end()) out << "# " << comment->second << '\n';
    out << label.cluster_id << '\t' << label.dominant_topic << '\t'
        << label.label_text << '\t' << (label.relevant ? 1 : 0) << '\n';
  }
  write_text(path, out.str());
}

std::vector<ClusterLabel> load_labels_tsv(const std::string& path) {
  std::vector<ClusterLabel> labels;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tab(line);
    if (fields.size() != 4) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected cluster_id<TAB>dominant_topic<TAB>label<TAB>relevant");
    }
    ClusterLabel label;
    label.cluster_id = std::stoi(fields[0]);
    label.dominant_topic = std::stoi(fields[1]);
    label.label_text = fields[2];
    if (fields[3] != "0" && fields[3] != "1") {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": relevant flag must be 0 or 1");
    }
    label.relevant = fields[3] == "1";
    labels.push_back(std::move(label));
  }
  return labels;
}

void save_assignments_tsv(
    const std::string& path,
    const std::vector<std::pair<std::string, int>>& assignments) {
  std::ostringstream out;
  for (const auto& [section_id, cluster] : assignments) {
    out << section_id << '\t' << cluster << '\n';
  }
  write_text(path, out.str());
}

std::vector<std::pair<std::string, int>> load_assignments_tsv(
    const std::string& path) {
  std::vector<std::pair<std::string, int>> assignments;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tab(line);
    if (fields.size() != 2) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected section_id<TAB>cluster_id");
    }
    assignments.emplace_back(fields[0], std::stoi(fields[1]));
  }
  return assignments;
}

}  // namespace patmine
