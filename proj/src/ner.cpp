#include "archnet/ner.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "archnet/io.hpp"
#include "archnet/text.hpp"

namespace archnet {

namespace {

// Decode with a byte-offset table so matches can slice the original text.
void decode_with_offsets(std::string_view text, std::u32string& points,
                         std::vector<std::size_t>& offsets) {
  points.clear();
  offsets.clear();
  std::size_t i = 0;
  while (i < text.size()) {
    offsets.push_back(i);
    points.push_back(decode_point(text, i));
  }
  offsets.push_back(text.size());
}

std::u32string collapse_entry(std::string_view name) {
  std::u32string raw = decode_utf8(name);
  std::u32string out;
  bool pending = false;
  for (char32_t p : raw) {
    if (is_space(p)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(U' ');
    pending = false;
    out.push_back(p);
  }
  return out;
}

bool mention_order(const Mention& a, const Mention& b) {
  return std::tie(a.doc_id, a.page_id, a.char_start, a.char_end,
                  a.recognizer_id) <
         std::tie(b.doc_id, b.page_id, b.char_start, b.char_end,
                  b.recognizer_id);
}

}  // namespace

GazetteerRecognizer::GazetteerRecognizer(std::vector<std::string> names,
                                         std::string id)
    : id_(std::move(id)) {
  for (const auto& name : names) {
    std::u32string entry = collapse_entry(name);
    if (!entry.empty()) entries_.push_back(std::move(entry));
  }
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()),
                 entries_.end());
}

GazetteerRecognizer GazetteerRecognizer::from_file(const std::string& path,
                                                   std::string id) {
  std::vector<std::string> names;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::string name = trim(line);
    if (!name.empty()) names.push_back(std::move(name));
  }
  return GazetteerRecognizer(std::move(names), std::move(id));
}

std::vector<Mention> GazetteerRecognizer::recognize(const Page& page) const {
  std::vector<Mention> found;
  if (page.text.empty() || entries_.empty()) return found;
  std::u32string points;
  std::vector<std::size_t> offsets;
  decode_with_offsets(page.text, points, offsets);
  std::size_t n = points.size();
  for (const auto& entry : entries_) {
    for (std::size_t i = 0; i < n; ++i) {
      if (points[i] != entry[0]) continue;
      if (i > 0 && is_latin_letter(points[i - 1])) continue;  // left boundary
      std::size_t j = i, k = 0;
      bool ok = true;
      while (k < entry.size()) {
        if (entry[k] == U' ') {
          if (j >= n || !is_space(points[j])) {
            ok = false;
            break;
          }
          while (j < n && is_space(points[j])) ++j;
          ++k;
        } else {
          if (j >= n || points[j] != entry[k]) {
            ok = false;
            break;
          }
          ++j;
          ++k;
        }
      }
      if (!ok) continue;
      if (j < n && is_latin_letter(points[j])) continue;  // right boundary
      Mention m;
      m.char_start = offsets[i];
      m.char_end = offsets[j];
      m.surface = page.text.substr(m.char_start, m.char_end - m.char_start);
      m.doc_id = page.doc_id;
      m.page_id = page.page_id;
      m.recognizer_id = id_;
      found.push_back(std::move(m));
    }
  }
  std::sort(found.begin(), found.end(), mention_order);
  return found;
}

ImportRecognizer::ImportRecognizer(const std::string& path, std::string id)
    : id_(std::move(id)) {
  for_each_jsonl(path, [&](const json& record, std::size_t lineno) {
    std::string type = record.value("type", "PER");
    if (type != "PER") return;  // only person entities flow downstream
    Row row;
    try {
      row.start = record.at("start").get<std::size_t>();
      row.end = record.at("end").get<std::size_t>();
      row.surface = record.value("surface", std::string());
      row.recognizer = record.value("recognizer", id_);
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    std::string page_id = record.value("page_id", std::string());
    if (page_id.empty()) throw ParseError(path, lineno, "missing page_id");
    rows_by_page_[page_id].push_back(std::move(row));
  });
}

std::vector<Mention> ImportRecognizer::recognize(const Page& page) const {
  std::vector<Mention> found;
  auto it = rows_by_page_.find(page.page_id);
  if (it == rows_by_page_.end()) return found;
  for (const Row& row : it->second) {
    if (row.start >= row.end || row.end > page.text.size()) {
      log_warning("import mention on page " + page.page_id + " at [" +
                  std::to_string(row.start) + "," + std::to_string(row.end) +
                  ") does not fit the page text; skipped");
      continue;
    }
    Mention m;
    m.char_start = row.start;
    m.char_end = row.end;
    m.surface = page.text.substr(row.start, row.end - row.start);
    if (!row.surface.empty() && row.surface != m.surface)
      log_warning("import mention surface \"" + row.surface + "\" disagrees "
                  "with page slice \"" + m.surface + "\"; using the slice");
    m.doc_id = page.doc_id;
    m.page_id = page.page_id;
    m.recognizer_id = row.recognizer;
    found.push_back(std::move(m));
  }
  std::sort(found.begin(), found.end(), mention_order);
  return found;
}

std::vector<Mention> aggregate_union(
    const std::vector<std::vector<Mention>>& per_recognizer) {
  std::map<std::string, std::vector<Mention>> by_page;
  for (const auto& list : per_recognizer)
    for (const Mention& m : list) by_page[m.page_id].push_back(m);

  // Longest-first greedy per page: a kept span absorbs every shorter span
  // overlapping it. Guarantees disjoint output and that each input overlaps
  // a survivor at least as long as itself.
  std::vector<Mention> out;
  for (auto& [page_id, mentions] : by_page) {
    std::sort(mentions.begin(), mentions.end(),
              [](const Mention& a, const Mention& b) {
                std::size_t la = a.char_end - a.char_start;
                std::size_t lb = b.char_end - b.char_start;
                if (la != lb) return la > lb;
                return std::tie(a.recognizer_id, a.char_start, a.char_end) <
                       std::tie(b.recognizer_id, b.char_start, b.char_end);
              });
    std::map<std::size_t, std::size_t> kept;  // start -> end, disjoint
    for (const Mention& m : mentions) {
      auto it = kept.lower_bound(m.char_start);
      bool overlap = (it != kept.end() && it->first < m.char_end);
      if (!overlap && it != kept.begin())
        overlap = std::prev(it)->second > m.char_start;
      if (overlap) continue;
      kept.emplace(m.char_start, m.char_end);
      out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end(), mention_order);
  return out;
}

MentionSet build_mention_set(
    const std::vector<Document>& documents,
    const std::vector<std::shared_ptr<Recognizer>>& recognizers,
    unsigned threads) {
  if (recognizers.empty())
    throw ValidationError("no recognizers configured");

  std::vector<const Page*> pages;
  for (const Document& doc : documents) {
    if (!doc.is_correspondence) continue;
    for (const Page& page : doc.pages) pages.push_back(&page);
  }

  // results[r][p]: output of recognizer r on page p — a fixed grid, so any
  // execution schedule produces the same aggregate.
  std::vector<std::vector<std::vector<Mention>>> results(
      recognizers.size(), std::vector<std::vector<Mention>>(pages.size()));

  auto run_one = [&](std::size_t r, std::size_t p) {
    try {
      results[r][p] = recognizers[r]->recognize(*pages[p]);
    } catch (const std::exception& e) {
      log_warning("recognizer " + recognizers[r]->id() + " failed on page " +
                  pages[p]->page_id + ": " + e.what());
    }
  };

  if (threads == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : hw;
  }
  threads = std::min<unsigned>(threads, 8);
  if (threads <= 1 || pages.size() < 32) {
    for (std::size_t r = 0; r < recognizers.size(); ++r)
      for (std::size_t p = 0; p < pages.size(); ++p) run_one(r, p);
  } else {
    for (std::size_t r = 0; r < recognizers.size(); ++r) {
      if (!recognizers[r]->thread_safe()) {
        for (std::size_t p = 0; p < pages.size(); ++p) run_one(r, p);
        continue;
      }
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> workers;
      for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
          for (std::size_t p = next.fetch_add(1); p < pages.size();
               p = next.fetch_add(1))
            run_one(r, p);
        });
      }
      for (auto& w : workers) w.join();
    }
  }

  std::vector<std::vector<Mention>> flat;
  flat.reserve(recognizers.size());
  for (auto& grid : results) {
    std::vector<Mention> merged;
    for (auto& cell : grid)
      merged.insert(merged.end(), cell.begin(), cell.end());
    flat.push_back(std::move(merged));
  }

  MentionSet set;
  set.mentions = aggregate_union(flat);
  for (const Mention& m : set.mentions) ++set.surface_counts[m.surface];
  return set;
}

void save_mentions(const MentionSet& mentions, const std::string& path) {
  std::ostringstream out;
  for (const Mention& m : mentions.mentions) {
    json record{{"surface", m.surface},     {"doc_id", m.doc_id},
                {"page_id", m.page_id},     {"start", m.char_start},
                {"end", m.char_end},        {"recognizer", m.recognizer_id}};
    out << record.dump() << "\n";
  }
  write_file(path, out.str());
}

MentionSet load_mentions(const std::string& path) {
  MentionSet set;
  for_each_jsonl(path, [&](const json& record, std::size_t lineno) {
    Mention m;
    try {
      m.surface = record.at("surface").get<std::string>();
      m.doc_id = record.at("doc_id").get<std::string>();
      m.page_id = record.at("page_id").get<std::string>();
      m.char_start = record.at("start").get<std::size_t>();
      m.char_end = record.at("end").get<std::size_t>();
      m.recognizer_id = record.value("recognizer", std::string());
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    set.mentions.push_back(std::move(m));
  });
  std::sort(set.mentions.begin(), set.mentions.end(), mention_order);
  for (const Mention& m : set.mentions) ++set.surface_counts[m.surface];
  return set;
}

}  // namespace archnet
