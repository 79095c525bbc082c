#include "archnet/evaluation.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "archnet/errors.hpp"
#include "archnet/text.hpp"

namespace archnet {

namespace {

// Surfaces the dictionary has never seen stay as they are; resolve() alone
// cannot tell them apart from canonical members, so membership is checked
// against the cluster lists.
std::set<std::string> known_surfaces(const AliasDictionary& aliases) {
  std::set<std::string> known;
  for (const auto& cluster : aliases.clusters)
    known.insert(cluster.members.begin(), cluster.members.end());
  return known;
}

std::set<LabelPair> canonical_edges(const WeightedGraph& graph,
                                    const AliasDictionary* aliases,
                                    const std::set<std::string>* known,
                                    std::set<std::string>& warned) {
  std::set<LabelPair> edges;
  for (const auto& edge : graph.edges()) {
    std::string u = edge.u;
    std::string v = edge.v;
    if (aliases != nullptr) {
      for (std::string* label : {&u, &v}) {
        if (known->count(*label) == 0 && warned.insert(*label).second)
          log_warning("label \"" + *label +
                      "\" is not in the alias dictionary; kept verbatim");
        *label = aliases->resolve(*label);
      }
    }
    if (u == v) {
      log_warning("edge (" + edge.u + ", " + edge.v +
                  ") collapses to one actor after alias resolution; dropped");
      continue;
    }
    if (v < u) std::swap(u, v);
    edges.insert({u, v});
  }
  return edges;
}

// Draw from [0, n) without modulo bias; rejection keeps the sequence
// platform-independent, unlike std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t residue = (rng.max() % n + 1) % n;  // 2^64 mod n
  const std::uint64_t cutoff = rng.max() - residue;
  std::uint64_t draw = rng();
  while (draw > cutoff) draw = rng();
  return draw % n;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, sep))
    if (!part.empty()) parts.push_back(part);
  return parts;
}

std::string join_with(const std::vector<std::string>& parts, char sep) {
  std::string joined;
  for (const auto& part : parts) {
    if (!joined.empty()) joined += sep;
    joined += part;
  }
  return joined;
}

std::string row_context(const char* side, std::size_t index,
                        const AnnotationRecord& row) {
  return std::string(side) + " worksheet row " + std::to_string(index + 1) +
         " (" + row.edge_u + ", " + row.edge_v + ")";
}

double ratio_of(long long part, long long whole) {
  return whole > 0 ? static_cast<double>(part) / static_cast<double>(whole)
                   : 0.0;
}

}  // namespace

NetworkDiff diff_networks(const WeightedGraph& automatic,
                          const WeightedGraph& manual,
                          const AliasDictionary* aliases) {
  std::set<std::string> known;
  if (aliases != nullptr) known = known_surfaces(*aliases);
  std::set<std::string> warned;
  const auto auto_edges = canonical_edges(automatic, aliases, &known, warned);
  const auto manual_edges = canonical_edges(manual, aliases, &known, warned);

  NetworkDiff diff;
  std::set_difference(manual_edges.begin(), manual_edges.end(),
                      auto_edges.begin(), auto_edges.end(),
                      std::back_inserter(diff.missing_edges));
  std::set_difference(auto_edges.begin(), auto_edges.end(),
                      manual_edges.begin(), manual_edges.end(),
                      std::back_inserter(diff.extra_edges));
  std::set_intersection(auto_edges.begin(), auto_edges.end(),
                        manual_edges.begin(), manual_edges.end(),
                        std::back_inserter(diff.shared_edges));
  return diff;
}

json diff_to_json(const NetworkDiff& diff) {
  auto pairs = [](const std::vector<LabelPair>& edges) {
    json list = json::array();
    for (const auto& [u, v] : edges) list.push_back({u, v});
    return list;
  };
  return json{{"missing", pairs(diff.missing_edges)},
              {"extra", pairs(diff.extra_edges)},
              {"shared", pairs(diff.shared_edges)}};
}

std::string to_string(MissingCategory category) {
  switch (category) {
    case MissingCategory::NotDetectableInText: return "NotDetectableInText";
    case MissingCategory::CorruptedByTextRecognition:
      return "CorruptedByTextRecognition";
    case MissingCategory::NotDetectedByNER: return "NotDetectedByNER";
    case MissingCategory::NotLinkableToCorrectVariant:
      return "NotLinkableToCorrectVariant";
    case MissingCategory::FailedToLinkToCorrectVariant:
      return "FailedToLinkToCorrectVariant";
    case MissingCategory::Correct: return "Correct";
  }
  return "";
}

std::string to_string(ExtraCategory category) {
  switch (category) {
    case ExtraCategory::DirectConnectionFound: return "DirectConnectionFound";
    case ExtraCategory::PossibleIndirectConnection:
      return "PossibleIndirectConnection";
    case ExtraCategory::NoEvidenceOfConnection:
      return "NoEvidenceOfConnection";
    case ExtraCategory::Error: return "Error";
  }
  return "";
}

std::string to_string(KbLinkVerdict verdict) {
  switch (verdict) {
    case KbLinkVerdict::Correct: return "Correct";
    case KbLinkVerdict::Wrong: return "Wrong";
    case KbLinkVerdict::NotApplicable: return "NotApplicable";
  }
  return "";
}

MissingCategory parse_missing_category(const std::string& text) {
  for (auto category :
       {MissingCategory::NotDetectableInText,
        MissingCategory::CorruptedByTextRecognition,
        MissingCategory::NotDetectedByNER,
        MissingCategory::NotLinkableToCorrectVariant,
        MissingCategory::FailedToLinkToCorrectVariant,
        MissingCategory::Correct})
    if (text == to_string(category)) return category;
  throw ValidationError("unknown missing-side category \"" + text + "\"");
}

ExtraCategory parse_extra_category(const std::string& text) {
  for (auto category : {ExtraCategory::DirectConnectionFound,
                        ExtraCategory::PossibleIndirectConnection,
                        ExtraCategory::NoEvidenceOfConnection,
                        ExtraCategory::Error})
    if (text == to_string(category)) return category;
  throw ValidationError("unknown extra-side category \"" + text + "\"");
}

KbLinkVerdict parse_kb_link_verdict(const std::string& text) {
  for (auto verdict : {KbLinkVerdict::Correct, KbLinkVerdict::Wrong,
                       KbLinkVerdict::NotApplicable})
    if (text == to_string(verdict)) return verdict;
  throw ValidationError("unknown link verdict \"" + text + "\"");
}

std::vector<AnnotationRecord> sample_connections(
    const std::vector<LabelPair>& edges, std::size_t k, std::uint64_t seed,
    const WitnessMap* witnesses) {
  if (k > edges.size())
    throw ValidationError("cannot sample " + std::to_string(k) +
                          " connections from a set of " +
                          std::to_string(edges.size()));
  std::vector<LabelPair> pool = edges;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (k > pool.size())
    throw ValidationError("cannot sample " + std::to_string(k) +
                          " connections from a set of " +
                          std::to_string(pool.size()));

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(
                                  bounded(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }

  std::vector<AnnotationRecord> rows;
  rows.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    AnnotationRecord row;
    row.edge_u = pool[i].first;
    row.edge_v = pool[i].second;
    if (witnesses != nullptr) {
      auto hit = witnesses->find(pool[i]);
      if (hit == witnesses->end())
        hit = witnesses->find({pool[i].second, pool[i].first});
      if (hit != witnesses->end()) row.witness_docs = hit->second;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_worksheet(const std::string& path,
                    const std::vector<AnnotationRecord>& rows) {
  std::string out = "edge_u,edge_v,witness_docs,category,kb_link_verdict,note\n";
  for (const auto& row : rows) {
    const std::string verdict = row.kb_link_verdict == KbLinkVerdict::NotApplicable
                                    ? ""
                                    : to_string(row.kb_link_verdict);
    out += csv_join({row.edge_u, row.edge_v, join_with(row.witness_docs, ';'),
                     row.category, verdict, row.note});
    out += '\n';
  }
  write_file(path, out);
}

std::vector<AnnotationRecord> load_worksheet(const std::string& path) {
  std::vector<AnnotationRecord> rows;
  for_each_csv_row(
      path,
      {"edge_u", "edge_v", "witness_docs", "category", "kb_link_verdict",
       "note"},
      [&](const std::vector<std::string>& fields, std::size_t rowno) {
        AnnotationRecord row;
        row.edge_u = trim(fields[0]);
        row.edge_v = trim(fields[1]);
        row.witness_docs = split_on(trim(fields[2]), ';');
        row.category = trim(fields[3]);
        const std::string verdict = trim(fields[4]);
        if (!verdict.empty()) {
          try {
            row.kb_link_verdict = parse_kb_link_verdict(verdict);
          } catch (const ValidationError& error) {
            throw ParseError(path, rowno, error.what());
          }
        }
        row.note = fields[5];
        rows.push_back(std::move(row));
      });
  return rows;
}

AnnotationCounts tally_annotations(
    const std::vector<AnnotationRecord>& missing_rows,
    const std::vector<AnnotationRecord>& extra_rows) {
  AnnotationCounts counts;

  counts.sampled_entities = static_cast<long long>(missing_rows.size());
  for (std::size_t i = 0; i < missing_rows.size(); ++i) {
    const auto& row = missing_rows[i];
    if (row.category.empty())
      throw ValidationError(row_context("missing", i, row) +
                            ": uncategorized");
    MissingCategory category;
    try {
      category = parse_missing_category(row.category);
    } catch (const ValidationError& error) {
      throw ValidationError(row_context("missing", i, row) + ": " +
                            error.what());
    }
    switch (category) {
      case MissingCategory::NotDetectableInText: ++counts.not_detectable; break;
      case MissingCategory::CorruptedByTextRecognition:
        ++counts.corrupted;
        break;
      case MissingCategory::NotDetectedByNER:
        ++counts.not_detected_by_ner;
        break;
      case MissingCategory::NotLinkableToCorrectVariant:
        ++counts.not_linkable;
        break;
      case MissingCategory::FailedToLinkToCorrectVariant:
        ++counts.failed_to_link;
        break;
      case MissingCategory::Correct: ++counts.correct; break;
    }
    if (row.kb_link_verdict == KbLinkVerdict::Correct) ++counts.kb_correct;
    if (row.kb_link_verdict == KbLinkVerdict::Wrong) ++counts.kb_wrong;
  }

  std::map<LabelPair, ExtraCategory> edge_category;
  std::set<std::string> names;
  for (std::size_t i = 0; i < extra_rows.size(); ++i) {
    const auto& row = extra_rows[i];
    if (row.category.empty())
      throw ValidationError(row_context("extra", i, row) + ": uncategorized");
    ExtraCategory category;
    try {
      category = parse_extra_category(row.category);
    } catch (const ValidationError& error) {
      throw ValidationError(row_context("extra", i, row) + ": " +
                            error.what());
    }
    LabelPair edge{row.edge_u, row.edge_v};
    if (edge.second < edge.first) std::swap(edge.first, edge.second);
    const auto [slot, inserted] = edge_category.emplace(edge, category);
    if (!inserted && slot->second != category)
      throw ValidationError(row_context("extra", i, row) +
                            ": rows disagree on the category of this edge");
    names.insert(row.edge_u);
    names.insert(row.edge_v);
    if (row.kb_link_verdict == KbLinkVerdict::Correct) ++counts.kb_correct;
    if (row.kb_link_verdict == KbLinkVerdict::Wrong) ++counts.kb_wrong;
  }
  counts.extra_connections = static_cast<long long>(edge_category.size());
  counts.names_checked = static_cast<long long>(names.size());
  for (const auto& [edge, category] : edge_category) {
    switch (category) {
      case ExtraCategory::DirectConnectionFound: ++counts.direct; break;
      case ExtraCategory::PossibleIndirectConnection:
        ++counts.possible_indirect;
        break;
      case ExtraCategory::NoEvidenceOfConnection: ++counts.no_evidence; break;
      case ExtraCategory::Error:
        ++counts.error;
        ++counts.names_mislinked;  // one wrongly linked name per error
        break;
    }
  }
  return counts;
}

EvaluationSummary summarize_annotations(const AnnotationCounts& counts) {
  const long long missing_sum = counts.not_detectable + counts.corrupted +
                                counts.not_detected_by_ner +
                                counts.not_linkable + counts.failed_to_link +
                                counts.correct;
  if (missing_sum != counts.sampled_entities)
    throw ValidationError(
        "missing-side categories sum to " + std::to_string(missing_sum) +
        " but " + std::to_string(counts.sampled_entities) +
        " entities were sampled");
  const long long extra_sum = counts.direct + counts.possible_indirect +
                              counts.no_evidence + counts.error;
  if (extra_sum != counts.extra_connections)
    throw ValidationError(
        "extra-side categories sum to " + std::to_string(extra_sum) + " but " +
        std::to_string(counts.extra_connections) +
        " connections were sampled");

  EvaluationSummary summary;
  summary.counts = counts;
  summary.entering_evaluation = counts.sampled_entities - counts.not_detectable;
  const long long text_pass = summary.entering_evaluation - counts.corrupted;
  const long long ner_pass = text_pass - counts.not_detected_by_ner;
  const long long linkage_entering = ner_pass - counts.not_linkable;

  summary.overall_accuracy =
      ratio_of(counts.correct, summary.entering_evaluation);
  summary.text_recognition_accuracy =
      ratio_of(text_pass, summary.entering_evaluation);
  summary.ner_accuracy = ratio_of(ner_pass, text_pass);
  summary.record_linkage_accuracy = ratio_of(counts.correct, linkage_entering);
  summary.kb_link_accuracy =
      ratio_of(counts.kb_correct, counts.kb_correct + counts.kb_wrong);
  summary.record_linkage_check_accuracy = ratio_of(
      counts.names_checked - counts.names_mislinked, counts.names_checked);
  summary.meaningful_lower = ratio_of(counts.direct, counts.extra_connections);
  summary.meaningful_upper = ratio_of(counts.direct + counts.possible_indirect,
                                      counts.extra_connections);
  summary.stage_flow = {
      {"not detectable in text", counts.not_detectable},
      {"lost at text recognition", counts.corrupted},
      {"lost at named entity recognition", counts.not_detected_by_ner},
      {"correct variant not linkable", counts.not_linkable},
      {"lost at record linkage", counts.failed_to_link},
      {"processed correctly", counts.correct},
  };
  return summary;
}

EvaluationSummary summarize_annotations(
    const std::vector<AnnotationRecord>& missing_rows,
    const std::vector<AnnotationRecord>& extra_rows) {
  return summarize_annotations(tally_annotations(missing_rows, extra_rows));
}

json summary_to_json(const EvaluationSummary& summary) {
  const auto& counts = summary.counts;
  json flow = json::array();
  for (const auto& row : summary.stage_flow)
    flow.push_back({{"label", row.label}, {"count", row.count}});
  return json{
      {"counts",
       {{"sampled_entities", counts.sampled_entities},
        {"not_detectable", counts.not_detectable},
        {"corrupted", counts.corrupted},
        {"not_detected_by_ner", counts.not_detected_by_ner},
        {"not_linkable", counts.not_linkable},
        {"failed_to_link", counts.failed_to_link},
        {"correct", counts.correct},
        {"extra_connections", counts.extra_connections},
        {"direct", counts.direct},
        {"possible_indirect", counts.possible_indirect},
        {"no_evidence", counts.no_evidence},
        {"error", counts.error},
        {"kb_correct", counts.kb_correct},
        {"kb_wrong", counts.kb_wrong},
        {"names_checked", counts.names_checked},
        {"names_mislinked", counts.names_mislinked}}},
      {"entering_evaluation", summary.entering_evaluation},
      {"accuracy",
       {{"overall", summary.overall_accuracy},
        {"text_recognition", summary.text_recognition_accuracy},
        {"ner", summary.ner_accuracy},
        {"record_linkage", summary.record_linkage_accuracy},
        {"kb_link", summary.kb_link_accuracy},
        {"record_linkage_check", summary.record_linkage_check_accuracy}}},
      {"meaningful_connection_rate",
       {{"lower", summary.meaningful_lower},
        {"upper", summary.meaningful_upper}}},
      {"stage_flow", flow}};
}

}  // namespace archnet
