#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace archnet {

enum class TextSource { kOcr, kHtr, kUnknown };
enum class Modality { kTyped, kHandwrittenOrDrawing, kUnclassified };

std::string to_string(TextSource source);
std::string to_string(Modality modality);
TextSource text_source_from_string(std::string_view s);
Modality modality_from_string(std::string_view s);

// One scanned page: the unit of text recognition. `text` is whatever the
// upstream OCR/HTR engine produced for the page image (possibly empty).
struct Page {
  std::string page_id;
  std::string doc_id;
  std::string title;
  std::string text;
  TextSource source = TextSource::kUnknown;
  Modality modality = Modality::kUnclassified;
};

// Pages sharing a doc_id, in stable (doc_id, page_id) order. Documents are
// the co-occurrence unit for network construction.
struct Document {
  std::string doc_id;
  std::vector<Page> pages;
  bool is_correspondence = false;
};

struct Corpus {
  std::vector<Page> pages;  // sorted by (doc_id, page_id)
};

struct CorpusStats {
  std::size_t total_pages = 0;
  std::size_t pages_with_entities = 0;
  std::size_t typed_pages_with_entities = 0;
  std::size_t handwritten_pages_with_entities = 0;
};

struct CorrespondenceFilter {
  std::vector<std::string> keywords = {"letter", "correspondence"};
};

struct ModalityOptions {
  double latin_threshold = 0.5;
  std::size_t min_chars = 20;  // non-whitespace characters
};

// Loads page records (JSON Lines) plus a doc-level metadata CSV. Pages come
// back sorted by (doc_id, page_id) with modality unclassified. A page keeps
// its own title; the metadata title only fills pages whose title is empty.
Corpus ingest_pages(const std::string& pages_path,
                    const std::string& metadata_path);

// True iff the lowercased title contains one of the filter keywords.
bool is_correspondence(std::string_view metadata_title,
                       const CorrespondenceFilter& filter = {});

// Typed iff at least min_chars non-whitespace characters and the Latin-letter
// fraction among them reaches latin_threshold; otherwise the page is
// handwritten or a drawing. Pure function of (text, options).
Modality classify_modality(std::string_view text,
                           const ModalityOptions& options = {});

// Applies classify_modality to every page. Pages whose text came from an HTR
// engine stay handwritten_or_drawing regardless of the heuristic.
void classify_corpus(Corpus& corpus, const ModalityOptions& options = {});

std::vector<Document> group_documents(const Corpus& corpus,
                                      const CorrespondenceFilter& filter = {});

// Corpus-wide summary counts; pages_with_entities is the set of page_ids on
// which at least one person mention was found.
CorpusStats corpus_stats(const Corpus& corpus,
                         const std::set<std::string>& pages_with_entities);

// corpus.jsonl artifact: enriched page records with modality resolved.
void save_corpus(const Corpus& corpus, const std::string& path,
                 const CorrespondenceFilter& filter = {});
Corpus load_corpus(const std::string& path);

}  // namespace archnet
