#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "archnet/errors.hpp"
#include "archnet/network.hpp"
#include "support.hpp"

using namespace archnet;

namespace {

Document make_doc(std::string id) {
  Document doc;
  doc.doc_id = std::move(id);
  doc.is_correspondence = true;
  return doc;
}

Mention make_mention(std::string surface, std::string doc_id) {
  Mention m;
  m.surface = std::move(surface);
  m.doc_id = std::move(doc_id);
  m.page_id = m.doc_id + "-p1";
  return m;
}

LinkedActor make_actor(std::string canonical, std::string kb_id) {
  LinkedActor actor;
  actor.canonical_name = std::move(canonical);
  actor.aliases = {actor.canonical_name};
  if (!kb_id.empty()) {
    actor.kb_id = std::move(kb_id);
    actor.disambiguation_score = 0.9;
  }
  return actor;
}

AliasDictionary identity_aliases() { return AliasDictionary{}; }

}  // namespace

TEST_CASE("edges accumulate weight symmetrically") {
  WeightedGraph g;
  g.add_edge("a", "b", 2);
  g.add_edge("b", "a", 3);
  CHECK(g.weight("a", "b") == 5);
  CHECK(g.weight("b", "a") == 5);
  CHECK(g.edge_count() == 1);
  CHECK(g.total_weight() == 5);
  CHECK(g.degree("a") == 1);
  CHECK(g.weighted_degree("a") == 5);
}

TEST_CASE("self-loops and non-positive weights are rejected") {
  WeightedGraph g;
  CHECK_THROWS_AS(g.add_edge("a", "a"), ValidationError);
  CHECK_THROWS_AS(g.add_edge("a", "b", 0), ValidationError);
  CHECK_THROWS_AS(g.add_edge("a", "b", -4), ValidationError);
  CHECK(g.node_count() == 0);
}

TEST_CASE("node attributes upsert without erasing earlier values") {
  WeightedGraph g;
  NodeInfo info;
  info.id = "a";
  info.kb_id = "Q1";
  g.add_node(info);
  g.add_edge("a", "b");  // plain endpoint creation must not wipe kb_id
  CHECK(g.node("a").kb_id.has_value());
  NodeInfo update;
  update.id = "a";
  update.country = "Netherlands";
  g.add_node(update);
  CHECK(*g.node("a").kb_id == "Q1");
  CHECK(*g.node("a").country == "Netherlands");
  CHECK_THROWS_AS(g.node("zz"), ValidationError);
}

TEST_CASE("edges() lists each pair once in sorted order") {
  WeightedGraph g;
  g.add_edge("c", "a", 1);
  g.add_edge("b", "c", 2);
  g.add_edge("a", "b", 3);
  auto edges = g.edges();
  REQUIRE(edges.size() == 3);
  CHECK(edges[0].u == "a");
  CHECK(edges[0].v == "b");
  CHECK(edges[0].weight == 3);
  CHECK(edges[1].v == "c");
  CHECK(edges[2].u == "b");
  CHECK(g.node_ids() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("one document connects every distinct pair once") {
  auto docs = std::vector<Document>{make_doc("d1")};
  MentionSet mentions;
  mentions.mentions = {make_mention("A", "d1"), make_mention("B", "d1"),
                       make_mention("C", "d1"), make_mention("B", "d1")};
  std::vector<LinkedActor> actors = {make_actor("A", "Q1"),
                                     make_actor("B", "Q2"),
                                     make_actor("C", "Q3")};
  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.weight("A", "B") == 1);  // B mentioned twice still counts once
  CHECK(g.weight("A", "C") == 1);
  CHECK(g.weight("B", "C") == 1);
  CHECK(*g.node("A").kb_id == "Q1");
}

TEST_CASE("repeated co-mentions across documents add up") {
  auto docs = std::vector<Document>{make_doc("d1"), make_doc("d2")};
  MentionSet mentions;
  mentions.mentions = {make_mention("A", "d1"), make_mention("B", "d1"),
                       make_mention("A", "d2"), make_mention("B", "d2")};
  std::vector<LinkedActor> actors = {make_actor("A", "Q1"),
                                     make_actor("B", "Q2")};
  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(g.weight("A", "B") == 2);
}

TEST_CASE("a lone actor produces a node but no edges") {
  auto docs = std::vector<Document>{make_doc("d1")};
  MentionSet mentions;
  mentions.mentions = {make_mention("A", "d1")};
  std::vector<LinkedActor> actors = {make_actor("A", "Q1")};
  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("actors without a knowledge-base link never enter the graph") {
  auto docs = std::vector<Document>{make_doc("d1")};
  MentionSet mentions;
  mentions.mentions = {make_mention("A", "d1"), make_mention("B", "d1"),
                       make_mention("C", "d1")};
  std::vector<LinkedActor> actors = {make_actor("A", "Q1"),
                                     make_actor("B", ""),  // unlinked
                                     make_actor("C", "Q3")};
  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK_FALSE(g.has_node("B"));
  CHECK(g.edge_count() == 1);
  CHECK(g.weight("A", "C") == 1);
}

TEST_CASE("mentions resolve through the alias dictionary") {
  auto docs = std::vector<Document>{make_doc("d1")};
  MentionSet mentions;
  mentions.mentions = {make_mention("S. Valkema", "d1"),
                       make_mention("Willem Heesen", "d1")};
  AliasDictionary aliases;
  AliasCluster cluster;
  cluster.canonical = "Sybren Valkema";
  cluster.members = {"S. Valkema", "Sybren Valkema"};
  aliases.clusters = {cluster};
  aliases.rebuild_index();
  std::vector<LinkedActor> actors = {make_actor("Sybren Valkema", "Q100"),
                                     make_actor("Willem Heesen", "Q201")};
  WeightedGraph g = build_cooccurrence(docs, mentions, aliases, actors);
  CHECK(g.has_node("Sybren Valkema"));
  CHECK_FALSE(g.has_node("S. Valkema"));
  CHECK(g.weight("Sybren Valkema", "Willem Heesen") == 1);
}

TEST_CASE("mentions outside the supplied documents are ignored") {
  auto docs = std::vector<Document>{make_doc("d1")};
  MentionSet mentions;
  mentions.mentions = {make_mention("A", "d1"), make_mention("B", "d1"),
                       make_mention("A", "ghost"), make_mention("B", "ghost")};
  std::vector<LinkedActor> actors = {make_actor("A", "Q1"),
                                     make_actor("B", "Q2")};
  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(g.weight("A", "B") == 1);
}

TEST_CASE("total weight equals the pairwise recount, any document order") {
  std::mt19937_64 rng(20260814);
  std::vector<std::string> names;
  for (char c = 'a'; c <= 'j'; ++c) names.push_back(std::string(1, c));

  std::vector<Document> docs;
  MentionSet mentions;
  std::vector<LinkedActor> actors;
  for (const auto& name : names) actors.push_back(make_actor(name, "Q" + name));

  long long expected_total = 0;
  for (int d = 0; d < 120; ++d) {
    std::string doc_id = "doc" + std::to_string(d);
    docs.push_back(make_doc(doc_id));
    std::set<std::string> group;
    std::size_t k = rng() % 5;  // 0..4 distinct actors
    while (group.size() < k) group.insert(names[rng() % names.size()]);
    for (const auto& name : group) {
      mentions.mentions.push_back(make_mention(name, doc_id));
      if (rng() % 2)  // duplicates must not change anything
        mentions.mentions.push_back(make_mention(name, doc_id));
    }
    long long kk = static_cast<long long>(group.size());
    expected_total += kk * (kk - 1) / 2;
  }

  WeightedGraph g =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(g.total_weight() == expected_total);

  std::shuffle(docs.begin(), docs.end(), rng);
  std::shuffle(mentions.mentions.begin(), mentions.mentions.end(), rng);
  WeightedGraph shuffled =
      build_cooccurrence(docs, mentions, identity_aliases(), actors);
  CHECK(shuffled == g);
}

TEST_CASE("prune keeps only edges at or above the threshold") {
  WeightedGraph g;
  g.add_edge("a", "b", 3);
  g.add_edge("b", "c", 10);
  g.add_edge("c", "d", 12);
  WeightedGraph p = prune(g, 10);
  CHECK(p.edge_count() == 2);
  CHECK(p.weight("b", "c") == 10);
  CHECK(p.weight("c", "d") == 12);
  // "a" lost its only edge and is dropped with it.
  CHECK_FALSE(p.has_node("a"));
  CHECK(p.node_count() == 3);
}

TEST_CASE("prune at 1 is the identity") {
  WeightedGraph g;
  g.add_edge("a", "b", 1);
  g.add_edge("b", "c", 7);
  NodeInfo info;
  info.id = "a";
  info.kb_id = "Q1";
  g.add_node(info);
  CHECK(prune(g, 1) == g);
}

TEST_CASE("pruning everything leaves an empty graph by default") {
  WeightedGraph g;
  g.add_edge("a", "b", 2);
  WeightedGraph p = prune(g, 5);
  CHECK(p.node_count() == 0);
  CHECK(p.edge_count() == 0);
  WeightedGraph kept = prune(g, 5, /*keep_isolates=*/true);
  CHECK(kept.node_count() == 2);
  CHECK(kept.edge_count() == 0);
}

TEST_CASE("prune removes pre-existing isolates too") {
  WeightedGraph g;
  g.add_edge("a", "b", 9);
  g.add_node("loner");
  CHECK_FALSE(prune(g, 2).has_node("loner"));
  CHECK(prune(g, 2, true).has_node("loner"));
}

TEST_CASE("prune is idempotent") {
  std::mt19937_64 rng(7);
  WeightedGraph g;
  for (int i = 0; i < 40; ++i) {
    std::string u = "n" + std::to_string(rng() % 12);
    std::string v = "n" + std::to_string(rng() % 12);
    if (u != v) g.add_edge(u, v, static_cast<long long>(rng() % 15 + 1));
  }
  for (long long t : {1, 3, 8, 100}) {
    WeightedGraph once = prune(g, t);
    CHECK(prune(once, t) == once);
  }
}

TEST_CASE("prune rejects thresholds below 1") {
  WeightedGraph g;
  CHECK_THROWS_AS(prune(g, 0), ValidationError);
}

TEST_CASE("manual network counts letters per pair") {
  TempDir dir;
  std::string path = dir.write("manual.csv",
                               "sender,receiver,doc_id\n"
                               "A,B,d1\n"
                               "B,A,d2\n"
                               "A,C,d3\n");
  WeightedGraph g = load_manual_network(path);
  CHECK(g.weight("A", "B") == 2);  // direction is discarded
  CHECK(g.weight("A", "C") == 1);
  CHECK(g.node_count() == 3);
}

TEST_CASE("an empty manual file yields an empty graph") {
  TempDir dir;
  WeightedGraph g = load_manual_network(dir.write("empty.csv", ""));
  CHECK(g.node_count() == 0);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("a short manual row reports its row number") {
  TempDir dir;
  std::string path = dir.write("bad.csv",
                               "sender,receiver,doc_id\n"
                               "A,B,d1\n"
                               "OnlyOneField\n");
  try {
    load_manual_network(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("manual names resolve through the alias dictionary") {
  TempDir dir;
  std::string path = dir.write("manual.csv",
                               "sender,receiver,doc_id\n"
                               "S. Valkema,Willem Heesen,d1\n"
                               "Sybren Valkema,Willem Heesen,d2\n"
                               "Sybren Valkema,S. Valkema,d3\n");
  AliasDictionary aliases;
  AliasCluster cluster;
  cluster.canonical = "Sybren Valkema";
  cluster.members = {"S. Valkema", "Sybren Valkema"};
  aliases.clusters = {cluster};
  aliases.rebuild_index();
  WeightedGraph g = load_manual_network(path, &aliases);
  // Rows 1+2 merge; row 3 collapses to a self-loop and is skipped.
  CHECK(g.weight("Sybren Valkema", "Willem Heesen") == 2);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("a large manual fixture keeps total weight equal to kept rows") {
  TempDir dir;
  std::mt19937_64 rng(950);
  std::string csv = "sender,receiver,doc_id\n";
  long long kept = 0;
  for (int i = 0; i < 950; ++i) {
    int a = static_cast<int>(rng() % 30);
    int b = static_cast<int>(rng() % 30);
    csv += "p" + std::to_string(a) + ",p" + std::to_string(b) + ",d" +
           std::to_string(i) + "\n";
    if (a != b) ++kept;
  }
  WeightedGraph g = load_manual_network(dir.write("manual.csv", csv));
  CHECK(g.total_weight() == kept);
}

TEST_CASE("graphml survives a round trip, attributes and all") {
  TempDir dir;
  WeightedGraph g;
  NodeInfo tricky;
  tricky.id = "A & B <\"quoted\"> 'op'";
  tricky.kb_id = "Q1";
  tricky.country = "Netherlands";
  g.add_node(tricky);
  NodeInfo plain;
  plain.id = "Plain";
  g.add_node(plain);
  g.add_edge(tricky.id, "Plain", 42);
  g.add_edge("Plain", "Third", 7);

  std::string path = (dir.path() / "g.graphml").string();
  save_graphml(g, path);
  WeightedGraph back = load_graphml(path);
  CHECK(back == g);
  CHECK(*back.node(tricky.id).kb_id == "Q1");
  CHECK(*back.node(tricky.id).country == "Netherlands");
  CHECK_FALSE(back.node("Plain").kb_id.has_value());
  CHECK(back.weight(tricky.id, "Plain") == 42);
}

TEST_CASE("an empty graph is valid graphml") {
  TempDir dir;
  std::string path = (dir.path() / "empty.graphml").string();
  save_graphml(WeightedGraph{}, path);
  CHECK(load_graphml(path).node_count() == 0);
}

TEST_CASE("node-link json lists nodes and weighted links") {
  TempDir dir;
  WeightedGraph g;
  NodeInfo a;
  a.id = "A";
  a.kb_id = "Q1";
  g.add_node(a);
  g.add_edge("A", "B", 3);
  std::string path = (dir.path() / "g.json").string();
  save_node_link_json(g, path);
  json doc = json::parse(read_file(path));
  CHECK(doc.at("directed") == false);
  REQUIRE(doc.at("nodes").size() == 2);
  CHECK(doc.at("nodes")[0].at("id") == "A");
  CHECK(doc.at("nodes")[0].at("kb_id") == "Q1");
  CHECK(doc.at("nodes")[1].at("country").is_null());
  REQUIRE(doc.at("links").size() == 1);
  CHECK(doc.at("links")[0].at("weight") == 3);
}

TEST_CASE("dot export quotes names and labels weights") {
  TempDir dir;
  WeightedGraph g;
  g.add_edge("Sybren \"S\" Valkema", "Willem Heesen", 12);
  std::string path = (dir.path() / "g.dot").string();
  save_dot(g, path);
  std::string dot = read_file(path);
  CHECK(dot.find("graph archnet {") != std::string::npos);
  CHECK(dot.find("\"Sybren \\\"S\\\" Valkema\" -- \"Willem Heesen\"") !=
        std::string::npos);
  CHECK(dot.find("weight=12") != std::string::npos);
}
