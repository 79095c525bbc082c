#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "archnet/io.hpp"
#include "archnet/linkage.hpp"
#include "archnet/network.hpp"

namespace archnet {

// Canonical node pair, first < second.
using LabelPair = std::pair<std::string, std::string>;

// Edge-set comparison after alias resolution on both sides.  The three
// lists are pairwise disjoint; missing ∪ shared is the manual edge set and
// extra ∪ shared is the automatic edge set (as canonical pairs).
struct NetworkDiff {
  std::vector<LabelPair> missing_edges;  // manual only
  std::vector<LabelPair> extra_edges;    // automatic only
  std::vector<LabelPair> shared_edges;   // both
};

// Labels absent from the dictionary are kept verbatim (with a warning);
// edges whose endpoints collapse to one actor are dropped with a warning.
NetworkDiff diff_networks(const WeightedGraph& automatic,
                          const WeightedGraph& manual,
                          const AliasDictionary* aliases = nullptr);

json diff_to_json(const NetworkDiff& diff);

// Why a missing-side entity never made it into the automatic network.
enum class MissingCategory {
  NotDetectableInText,
  CorruptedByTextRecognition,
  NotDetectedByNER,
  NotLinkableToCorrectVariant,
  FailedToLinkToCorrectVariant,
  Correct,
};

// Expert judgment of a connection absent from the manual network.
enum class ExtraCategory {
  DirectConnectionFound,
  PossibleIndirectConnection,
  NoEvidenceOfConnection,
  Error,
};

enum class KbLinkVerdict { Correct, Wrong, NotApplicable };

std::string to_string(MissingCategory category);
std::string to_string(ExtraCategory category);
std::string to_string(KbLinkVerdict verdict);
MissingCategory parse_missing_category(const std::string& text);
ExtraCategory parse_extra_category(const std::string& text);
KbLinkVerdict parse_kb_link_verdict(const std::string& text);

// One worksheet row.  sample_connections leaves the annotation fields
// empty; the annotator fills them in.  A missing-side worksheet carries one
// row per edge endpoint once annotated (the edge columns repeat), an
// extra-side worksheet one row per connection, with duplicate rows of the
// same edge allowed so each unique name can carry its own link verdict.
struct AnnotationRecord {
  std::string edge_u;
  std::string edge_v;
  std::vector<std::string> witness_docs;
  std::string category;  // empty until annotated
  KbLinkVerdict kb_link_verdict = KbLinkVerdict::NotApplicable;
  std::string note;

  bool operator==(const AnnotationRecord&) const = default;
};

using WitnessMap = std::map<LabelPair, std::vector<std::string>>;

// Uniform sample without replacement, reproducible from the seed; rows come
// back in sampled order with empty annotation fields.
std::vector<AnnotationRecord> sample_connections(
    const std::vector<LabelPair>& edges, std::size_t k, std::uint64_t seed,
    const WitnessMap* witnesses = nullptr);

// CSV with columns edge_u, edge_v, witness_docs, category, kb_link_verdict,
// note.  witness_docs cells are ';'-joined; a blank verdict reads back as
// NotApplicable.
void save_worksheet(const std::string& path,
                    const std::vector<AnnotationRecord>& rows);
std::vector<AnnotationRecord> load_worksheet(const std::string& path);

// Raw tallies from the annotated worksheets.  Missing-side rows count one
// entity each; extra-side categories count one per distinct edge.
struct AnnotationCounts {
  long long sampled_entities = 0;  // missing-side rows
  long long not_detectable = 0;
  long long corrupted = 0;
  long long not_detected_by_ner = 0;
  long long not_linkable = 0;
  long long failed_to_link = 0;
  long long correct = 0;

  long long extra_connections = 0;  // distinct extra-side edges
  long long direct = 0;
  long long possible_indirect = 0;
  long long no_evidence = 0;
  long long error = 0;

  long long kb_correct = 0;  // link verdicts, one per applicable row
  long long kb_wrong = 0;

  long long names_checked = 0;  // unique names across extra-side edges
  long long names_mislinked = 0;  // one per Error connection
};

AnnotationCounts tally_annotations(
    const std::vector<AnnotationRecord>& missing_rows,
    const std::vector<AnnotationRecord>& extra_rows);

struct FlowRow {
  std::string label;
  long long count = 0;
};

// All rates are fractions in [0, 1]; a zero denominator yields 0.
struct EvaluationSummary {
  AnnotationCounts counts;
  long long entering_evaluation = 0;  // sampled_entities - not_detectable
  double overall_accuracy = 0.0;
  double text_recognition_accuracy = 0.0;
  double ner_accuracy = 0.0;
  double record_linkage_accuracy = 0.0;
  double kb_link_accuracy = 0.0;
  double record_linkage_check_accuracy = 0.0;
  double meaningful_lower = 0.0;  // direct / extra connections
  double meaningful_upper = 0.0;  // (direct + possible indirect) / extra
  std::vector<FlowRow> stage_flow;  // counts sum to sampled_entities
};

EvaluationSummary summarize_annotations(const AnnotationCounts& counts);
EvaluationSummary summarize_annotations(
    const std::vector<AnnotationRecord>& missing_rows,
    const std::vector<AnnotationRecord>& extra_rows);

json summary_to_json(const EvaluationSummary& summary);

}  // namespace archnet
