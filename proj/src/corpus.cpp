#include "archnet/corpus.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "archnet/io.hpp"
#include "archnet/text.hpp"

namespace archnet {

std::string to_string(TextSource source) {
  switch (source) {
    case TextSource::kOcr: return "ocr";
    case TextSource::kHtr: return "htr";
    default: return "unknown";
  }
}

std::string to_string(Modality modality) {
  switch (modality) {
    case Modality::kTyped: return "typed";
    case Modality::kHandwrittenOrDrawing: return "handwritten_or_drawing";
    default: return "unclassified";
  }
}

TextSource text_source_from_string(std::string_view s) {
  if (s == "ocr") return TextSource::kOcr;
  if (s == "htr") return TextSource::kHtr;
  if (s == "unknown" || s.empty()) return TextSource::kUnknown;
  throw ValidationError("unknown text source \"" + std::string(s) + "\"");
}

Modality modality_from_string(std::string_view s) {
  if (s == "typed") return Modality::kTyped;
  if (s == "handwritten_or_drawing") return Modality::kHandwrittenOrDrawing;
  if (s == "unclassified" || s.empty()) return Modality::kUnclassified;
  throw ValidationError("unknown modality \"" + std::string(s) + "\"");
}

Corpus ingest_pages(const std::string& pages_path,
                    const std::string& metadata_path) {
  std::unordered_map<std::string, std::string> doc_titles;
  for_each_csv_row(metadata_path, {"doc_id", "title"},
                   [&](const std::vector<std::string>& fields, std::size_t) {
                     doc_titles[trim(fields[0])] = fields[1];
                   });

  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  for_each_jsonl(pages_path, [&](const json& record, std::size_t lineno) {
    if (!record.is_object())
      throw ParseError(pages_path, lineno, "page record is not an object");
    Page page;
    try {
      page.page_id = record.at("page_id").get<std::string>();
      page.doc_id = record.at("doc_id").get<std::string>();
      page.title = record.value("title", std::string());
      page.text = record.value("text", std::string());
      page.source = text_source_from_string(record.value("source", "unknown"));
    } catch (const json::exception& e) {
      throw ParseError(pages_path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(pages_path, lineno, e.what());
    }
    if (page.page_id.empty())
      throw ParseError(pages_path, lineno, "missing page_id");
    if (page.doc_id.empty())
      throw ParseError(pages_path, lineno, "missing doc_id");
    if (!seen_ids.insert(page.page_id).second)
      throw DuplicateIdError(page.page_id);
    // Page-record titles win; metadata only fills the gaps.
    if (page.title.empty()) {
      auto it = doc_titles.find(page.doc_id);
      if (it != doc_titles.end()) page.title = it->second;
    }
    corpus.pages.push_back(std::move(page));
  });

  std::sort(corpus.pages.begin(), corpus.pages.end(),
            [](const Page& a, const Page& b) {
              return std::tie(a.doc_id, a.page_id) <
                     std::tie(b.doc_id, b.page_id);
            });
  return corpus;
}

bool is_correspondence(std::string_view metadata_title,
                       const CorrespondenceFilter& filter) {
  std::string lowered = lower_copy(metadata_title);
  for (const std::string& keyword : filter.keywords) {
    if (!keyword.empty() && lowered.find(keyword) != std::string::npos)
      return true;
  }
  return false;
}

Modality classify_modality(std::string_view text,
                           const ModalityOptions& options) {
  std::u32string points = decode_utf8(text);
  std::size_t total = 0;
  std::size_t latin = 0;
  for (char32_t p : points) {
    if (is_space(p)) continue;
    ++total;
    if (is_latin_letter(p)) ++latin;
  }
  if (total < options.min_chars) return Modality::kHandwrittenOrDrawing;
  double fraction = total == 0 ? 0.0 : static_cast<double>(latin) / total;
  return fraction >= options.latin_threshold
             ? Modality::kTyped
             : Modality::kHandwrittenOrDrawing;
}

void classify_corpus(Corpus& corpus, const ModalityOptions& options) {
  for (Page& page : corpus.pages) {
    page.modality = page.source == TextSource::kHtr
                        ? Modality::kHandwrittenOrDrawing
                        : classify_modality(page.text, options);
  }
}

std::vector<Document> group_documents(const Corpus& corpus,
                                      const CorrespondenceFilter& filter) {
  std::map<std::string, Document> grouped;
  for (const Page& page : corpus.pages) {
    Document& doc = grouped[page.doc_id];
    doc.doc_id = page.doc_id;
    doc.pages.push_back(page);
    if (!doc.is_correspondence && is_correspondence(page.title, filter))
      doc.is_correspondence = true;
  }
  std::vector<Document> documents;
  documents.reserve(grouped.size());
  for (auto& [id, doc] : grouped) documents.push_back(std::move(doc));
  return documents;
}

CorpusStats corpus_stats(const Corpus& corpus,
                         const std::set<std::string>& pages_with_entities) {
  CorpusStats stats;
  stats.total_pages = corpus.pages.size();
  for (const Page& page : corpus.pages) {
    if (!pages_with_entities.count(page.page_id)) continue;
    ++stats.pages_with_entities;
    if (page.modality == Modality::kTyped)
      ++stats.typed_pages_with_entities;
    else if (page.modality == Modality::kHandwrittenOrDrawing)
      ++stats.handwritten_pages_with_entities;
  }
  return stats;
}

void save_corpus(const Corpus& corpus, const std::string& path,
                 const CorrespondenceFilter& filter) {
  std::ostringstream out;
  for (const Page& page : corpus.pages) {
    json record{{"page_id", page.page_id},
                {"doc_id", page.doc_id},
                {"title", page.title},
                {"text", page.text},
                {"source", to_string(page.source)},
                {"modality", to_string(page.modality)},
                {"is_correspondence", is_correspondence(page.title, filter)}};
    out << record.dump() << "\n";
  }
  write_file(path, out.str());
}

Corpus load_corpus(const std::string& path) {
  Corpus corpus;
  for_each_jsonl(path, [&](const json& record, std::size_t lineno) {
    Page page;
    try {
      page.page_id = record.at("page_id").get<std::string>();
      page.doc_id = record.at("doc_id").get<std::string>();
      page.title = record.value("title", std::string());
      page.text = record.value("text", std::string());
      page.source = text_source_from_string(record.value("source", "unknown"));
      page.modality =
          modality_from_string(record.value("modality", "unclassified"));
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    corpus.pages.push_back(std::move(page));
  });
  std::sort(corpus.pages.begin(), corpus.pages.end(),
            [](const Page& a, const Page& b) {
              return std::tie(a.doc_id, a.page_id) <
                     std::tie(b.doc_id, b.page_id);
            });
  return corpus;
}

}  // namespace archnet
