#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "archnet/corpus.hpp"

namespace archnet {

// One person-name span on a page. Offsets are byte offsets into the page's
// UTF-8 text; surface always equals the slice [char_start, char_end).
struct Mention {
  std::string surface;
  std::string doc_id;
  std::string page_id;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string recognizer_id;
};

struct MentionSet {
  std::vector<Mention> mentions;  // sorted by (doc_id, page_id, char_start)
  std::map<std::string, std::size_t> surface_counts;
};

// Person-entity recognizer. Implementations return PERSON spans only and
// either tolerate concurrent recognize() calls or say so via thread_safe().
class Recognizer {
 public:
  virtual ~Recognizer() = default;
  virtual std::string id() const = 0;
  virtual bool thread_safe() const { return true; }
  virtual std::vector<Mention> recognize(const Page& page) const = 0;
};

// Dictionary matcher: an entry matches a text span if the non-whitespace
// code points agree exactly and every whitespace run in the entry aligns
// with a whitespace run in the text; span boundaries must not touch Latin
// letters. The emitted surface is the raw page slice.
class GazetteerRecognizer : public Recognizer {
 public:
  explicit GazetteerRecognizer(std::vector<std::string> names,
                               std::string id = "gazetteer");
  static GazetteerRecognizer from_file(const std::string& path,
                                       std::string id = "gazetteer");

  std::string id() const override { return id_; }
  std::vector<Mention> recognize(const Page& page) const override;

 private:
  std::vector<std::u32string> entries_;
  std::string id_;
};

// Adapter feeding precomputed mention files (external model output) into
// the pipeline. Rows typed other than PER are dropped; rows with offsets
// that do not fit the page are skipped with a warning.
class ImportRecognizer : public Recognizer {
 public:
  explicit ImportRecognizer(const std::string& path,
                            std::string id = "import");

  std::string id() const override { return id_; }
  std::vector<Mention> recognize(const Page& page) const override;

 private:
  struct Row {
    std::size_t start, end;
    std::string surface;
    std::string recognizer;
  };
  std::map<std::string, std::vector<Row>> rows_by_page_;
  std::string id_;
};

// Union of all recognizer outputs: mentions on the same page with
// overlapping spans collapse to one, keeping the longest span (ties by
// lexicographically smaller recognizer_id, then smaller offsets).
std::vector<Mention> aggregate_union(
    const std::vector<std::vector<Mention>>& per_recognizer);

// Runs every recognizer over every page of the correspondence documents,
// aggregates, and tallies surface counts. A recognizer throwing on a page
// logs a warning and skips that page; zero recognizers is an error.
MentionSet build_mention_set(
    const std::vector<Document>& documents,
    const std::vector<std::shared_ptr<Recognizer>>& recognizers,
    unsigned threads = 0);  // 0 = pick from hardware

void save_mentions(const MentionSet& mentions, const std::string& path);
MentionSet load_mentions(const std::string& path);

}  // namespace archnet
