#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "archnet/corpus.hpp"
#include "archnet/errors.hpp"
#include "support.hpp"

using namespace archnet;

namespace {

std::string page_line(const std::string& page_id, const std::string& doc_id,
                      const std::string& title, const std::string& text,
                      const std::string& source = "ocr") {
  return "{\"page_id\":\"" + page_id + "\",\"doc_id\":\"" + doc_id +
         "\",\"title\":\"" + title + "\",\"text\":\"" + text +
         "\",\"source\":\"" + source + "\"}\n";
}

}  // namespace

TEST_CASE("ingest_pages loads rows sorted by doc then page") {
  TempDir dir;
  auto pages = dir.write("pages.jsonl", page_line("p2", "docB", "t", "x") +
                                            page_line("p1", "docA", "t", "x") +
                                            page_line("p0", "docB", "t", "x"));
  auto meta = dir.write("meta.csv", "doc_id,title\n");
  Corpus corpus = ingest_pages(pages, meta);
  REQUIRE(corpus.pages.size() == 3);
  CHECK(corpus.pages[0].page_id == "p1");
  CHECK(corpus.pages[1].page_id == "p0");
  CHECK(corpus.pages[2].page_id == "p2");
  for (const auto& page : corpus.pages)
    CHECK(page.modality == Modality::kUnclassified);
}

TEST_CASE("ingest_pages empty file gives empty corpus") {
  TempDir dir;
  auto pages = dir.write("pages.jsonl", "");
  auto meta = dir.write("meta.csv", "");
  CHECK(ingest_pages(pages, meta).pages.empty());
}

TEST_CASE("ingest_pages rejects duplicate page_id") {
  TempDir dir;
  auto pages = dir.write("pages.jsonl", page_line("p1", "a", "t", "x") +
                                            page_line("p1", "b", "t", "y"));
  auto meta = dir.write("meta.csv", "doc_id,title\n");
  CHECK_THROWS_WITH_AS(ingest_pages(pages, meta), "duplicate page_id \"p1\"",
                       DuplicateIdError);
}

TEST_CASE("ingest_pages names the malformed row") {
  TempDir dir;
  auto pages = dir.write("pages.jsonl",
                         page_line("p1", "a", "t", "x") + "{not json\n");
  auto meta = dir.write("meta.csv", "doc_id,title\n");
  try {
    ingest_pages(pages, meta);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }

  auto missing = dir.write("missing.jsonl", "{\"doc_id\":\"a\"}\n");
  CHECK_THROWS_AS(ingest_pages(missing, meta), ParseError);
}

TEST_CASE("metadata title fills empty page titles only") {
  TempDir dir;
  auto pages = dir.write("pages.jsonl",
                         page_line("p1", "docA", "", "x") +
                             page_line("p2", "docA", "Own title", "x"));
  auto meta = dir.write("meta.csv", "doc_id,title\ndocA,Letter to Durk\n");
  Corpus corpus = ingest_pages(pages, meta);
  CHECK(corpus.pages[0].title == "Letter to Durk");
  CHECK(corpus.pages[1].title == "Own title");
}

TEST_CASE("is_correspondence keyword matching") {
  CHECK(is_correspondence("Letter from H. Littleton"));
  CHECK_FALSE(is_correspondence("Drawing, vase study"));
  CHECK(is_correspondence("CORRESPONDENCE 1968-1972"));
  CHECK(is_correspondence("Brief; letters to the editor"));
  CHECK_FALSE(is_correspondence(""));

  CorrespondenceFilter dutch{{"brief"}};
  CHECK(is_correspondence("Brief aan Durk", dutch));
  CHECK_FALSE(is_correspondence("Letter from H. Littleton", dutch));
}

TEST_CASE("classify_modality") {
  CHECK(classify_modality("Dear Mr Valkema, thank you for your letter.") ==
        Modality::kTyped);
  CHECK(classify_modality("") == Modality::kHandwrittenOrDrawing);
  CHECK(classify_modality("\xC2\xA7\xC2\xA7 ~~ 3791 --- 0000 11111 22222") ==
        Modality::kHandwrittenOrDrawing);

  // Below the minimum character count even clean text stays handwritten.
  CHECK(classify_modality("Dear Sybren") == Modality::kHandwrittenOrDrawing);
  ModalityOptions tiny;
  tiny.min_chars = 1;
  CHECK(classify_modality("Dear Sybren", tiny) == Modality::kTyped);

  // Exactly at the fraction threshold counts as typed.
  ModalityOptions half;
  half.min_chars = 4;
  CHECK(classify_modality("ab12", half) == Modality::kTyped);
  CHECK(classify_modality("a123", half) == Modality::kHandwrittenOrDrawing);

  // Pure function: repeated calls agree.
  for (int i = 0; i < 3; ++i)
    CHECK(classify_modality("mixed 1234 content here") ==
          classify_modality("mixed 1234 content here"));
}

TEST_CASE("classify_corpus keeps htr pages handwritten") {
  Corpus corpus;
  corpus.pages.push_back({"p1", "d", "t",
                          "This is clearly typed text with many letters.",
                          TextSource::kOcr, Modality::kUnclassified});
  corpus.pages.push_back({"p2", "d", "t",
                          "This is clearly typed text with many letters.",
                          TextSource::kHtr, Modality::kUnclassified});
  classify_corpus(corpus);
  CHECK(corpus.pages[0].modality == Modality::kTyped);
  CHECK(corpus.pages[1].modality == Modality::kHandwrittenOrDrawing);
}

TEST_CASE("group_documents groups and flags") {
  Corpus corpus;
  corpus.pages.push_back({"p1", "a", "Letter to Durk", "x", TextSource::kOcr,
                          Modality::kUnclassified});
  corpus.pages.push_back({"p2", "a", "enclosure", "y", TextSource::kOcr,
                          Modality::kUnclassified});
  corpus.pages.push_back({"p3", "b", "Drawing", "z", TextSource::kOcr,
                          Modality::kUnclassified});
  corpus.pages.push_back({"p4", "b", "Vase study", "w", TextSource::kOcr,
                          Modality::kUnclassified});
  auto documents = group_documents(corpus);
  REQUIRE(documents.size() == 2);
  CHECK(documents[0].doc_id == "a");
  CHECK(documents[0].pages.size() == 2);
  CHECK(documents[0].is_correspondence);  // one page title had "letter"
  CHECK(documents[1].doc_id == "b");
  CHECK(documents[1].pages.size() == 2);
  CHECK_FALSE(documents[1].is_correspondence);

  std::size_t total = 0;
  for (const auto& doc : documents) {
    total += doc.pages.size();
    for (const auto& page : doc.pages) CHECK(page.doc_id == doc.doc_id);
  }
  CHECK(total == corpus.pages.size());
}

TEST_CASE("single page makes a single-page document") {
  Corpus corpus;
  corpus.pages.push_back(
      {"p1", "solo", "Letter", "x", TextSource::kOcr, Modality::kUnclassified});
  auto documents = group_documents(corpus);
  REQUIRE(documents.size() == 1);
  CHECK(documents[0].pages.size() == 1);
}

TEST_CASE("corpus_stats counts by modality") {
  Corpus corpus;
  corpus.pages.push_back({"p1", "a", "t", "x", TextSource::kOcr, Modality::kTyped});
  corpus.pages.push_back({"p2", "a", "t", "x", TextSource::kOcr,
                          Modality::kHandwrittenOrDrawing});
  corpus.pages.push_back({"p3", "b", "t", "x", TextSource::kOcr, Modality::kTyped});
  CorpusStats stats = corpus_stats(corpus, {"p1", "p2"});
  CHECK(stats.total_pages == 3);
  CHECK(stats.pages_with_entities == 2);
  CHECK(stats.typed_pages_with_entities == 1);
  CHECK(stats.handwritten_pages_with_entities == 1);
  CHECK(stats.typed_pages_with_entities + stats.handwritten_pages_with_entities
        <= stats.pages_with_entities);
  CHECK(stats.pages_with_entities <= stats.total_pages);
}

TEST_CASE("save and load corpus round trip") {
  TempDir dir;
  Corpus corpus;
  corpus.pages.push_back({"p1", "a", "Letter to Durk", "Dear Durk,",
                          TextSource::kOcr, Modality::kTyped});
  corpus.pages.push_back({"p2", "b", "Drawing", "", TextSource::kHtr,
                          Modality::kHandwrittenOrDrawing});
  auto path = (dir.path() / "corpus.jsonl").string();
  save_corpus(corpus, path);
  Corpus loaded = load_corpus(path);
  REQUIRE(loaded.pages.size() == 2);
  CHECK(loaded.pages[0].page_id == "p1");
  CHECK(loaded.pages[0].title == "Letter to Durk");
  CHECK(loaded.pages[0].source == TextSource::kOcr);
  CHECK(loaded.pages[0].modality == Modality::kTyped);
  CHECK(loaded.pages[1].modality == Modality::kHandwrittenOrDrawing);
}

TEST_CASE("enum conversions round trip and reject junk") {
  for (auto source : {TextSource::kOcr, TextSource::kHtr, TextSource::kUnknown})
    CHECK(text_source_from_string(to_string(source)) == source);
  for (auto modality : {Modality::kTyped, Modality::kHandwrittenOrDrawing,
                        Modality::kUnclassified})
    CHECK(modality_from_string(to_string(modality)) == modality);
  CHECK_THROWS_AS(text_source_from_string("fax"), ValidationError);
  CHECK_THROWS_AS(modality_from_string("cursive"), ValidationError);
}
