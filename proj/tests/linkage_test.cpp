#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "archnet/errors.hpp"
#include "archnet/linkage.hpp"
#include "support.hpp"

using namespace archnet;

namespace {

MentionSet set_from_counts(
    const std::map<std::string, std::size_t>& counts) {
  MentionSet set;
  set.surface_counts = counts;
  return set;
}

AliasDictionary link_surfaces(const std::map<std::string, std::size_t>& counts,
                              double threshold,
                              const std::vector<SeedAlias>& seeds = {}) {
  MentionSet mentions = set_from_counts(counts);
  auto table = build_similarity_table(mentions);
  return link_records(mentions, table, threshold, seeds);
}

const AliasCluster* cluster_of(const AliasDictionary& dict,
                               const std::string& surface) {
  for (const auto& cluster : dict.clusters)
    if (std::count(cluster.members.begin(), cluster.members.end(), surface))
      return &cluster;
  return nullptr;
}

}  // namespace

TEST_CASE("split_name greedy infix absorption") {
  auto a = split_name("Dhr S. Valkema");
  CHECK(a.prefix == "dhr s");
  CHECK(a.lastname == "valkema");
  CHECK(a.normalized == "dhr s valkema");

  auto b = split_name("Gerrit van der Berg");
  CHECK(b.prefix == "gerrit");
  CHECK(b.lastname == "van der berg");

  auto c = split_name("Valkema");
  CHECK(c.prefix == "");
  CHECK(c.lastname == "valkema");

  // Every leading token an infix: the lastname swallows the whole name.
  auto d = split_name("van der Berg");
  CHECK(d.prefix == "");
  CHECK(d.lastname == "van der berg");

  auto e = split_name("Anna op den Kamp");
  CHECK(e.prefix == "anna");
  CHECK(e.lastname == "op den kamp");

  CHECK_THROWS_AS(split_name(""), EmptyNameError);
  CHECK_THROWS_AS(split_name(" . , "), EmptyNameError);
}

TEST_CASE("split_name invariant: parts reassemble the normalized form") {
  for (const char* name :
       {"Dhr S. Valkema", "Gerrit van der Berg", "Harvey K. Littleton",
        "Mieke Groot", "van der Berg", "J.W. van 't Hoff"}) {
    auto parts = split_name(name);
    std::string rebuilt = parts.prefix.empty()
                              ? parts.lastname
                              : parts.prefix + " " + parts.lastname;
    CHECK(rebuilt == parts.normalized);
    CHECK(!parts.lastname.empty());
  }
}

TEST_CASE("score_pair reproduces the component arithmetic") {
  auto durk = score_pair(split_name("D. Valkema"), split_name("Durk Valkema"));
  CHECK(durk.lastname_score == doctest::Approx(100.0));
  CHECK(durk.prefix_score == doctest::Approx(40.0));
  CHECK(durk.substring_score == doctest::Approx(88.9).epsilon(0.002));
  CHECK(durk.total_score == doctest::Approx(83.56).epsilon(0.001));

  auto bare = score_pair(split_name("D. Valkema"), split_name("Valkema"));
  CHECK(bare.lastname_score == doctest::Approx(100.0));
  CHECK(bare.prefix_score == doctest::Approx(0.0));
  CHECK(bare.substring_score == doctest::Approx(100.0));
  CHECK(bare.total_score == doctest::Approx(80.0));

  // "D. Valkema" sits closer to "Durk Valkema" than to bare "Valkema".
  CHECK(durk.total_score > bare.total_score);
}

TEST_CASE("score_pair is symmetric") {
  auto a = split_name("Kea Verwey");
  auto b = split_name("K. Verwey");
  auto ab = score_pair(a, b);
  auto ba = score_pair(b, a);
  CHECK(ab.total_score == ba.total_score);
  CHECK(ab.lastname_score == ba.lastname_score);
  CHECK(ab.prefix_score == ba.prefix_score);
  CHECK(ab.substring_score == ba.substring_score);
  CHECK(ab.total_score == doctest::Approx(85.0));
}

TEST_CASE("lastname-only agreement cannot clear any threshold above 40") {
  // Weighted total of component scores (100, 0, 0) is 0.4·100 = 40, so a
  // threshold of 45 (or anything higher) never merges such a pair.
  MentionSet mentions = set_from_counts({{"aaa", 1}, {"bbb", 1}});
  SimilarityTable table;
  table.pairs.push_back({"aaa", "bbb", {100.0, 0.0, 0.0, 40.0}});
  auto dict = link_records(mentions, table, 45.0);
  CHECK(dict.clusters.size() == 2);
}

TEST_CASE("the Valkema trio: honest clustering at the default threshold") {
  std::map<std::string, std::size_t> counts = {
      {"S.Valkema", 3}, {"Dhr S. Valkema", 1}, {"Sybren Valkema", 12}};

  // Pairwise totals, frozen from the formula arithmetic.
  auto s = split_name("S.Valkema");
  auto dhr = split_name("Dhr S. Valkema");
  auto syb = split_name("Sybren Valkema");
  CHECK(score_pair(s, dhr).total_score == doctest::Approx(86.67).epsilon(0.001));
  CHECK(score_pair(s, syb).total_score == doctest::Approx(81.27).epsilon(0.001));
  CHECK(score_pair(dhr, syb).total_score == doctest::Approx(71.33).epsilon(0.001));

  // At 85 only the first pair clears: two clusters, not one.
  auto at_default = link_surfaces(counts, 85.0);
  CHECK(at_default.clusters.size() == 2);
  CHECK(at_default.resolve("S.Valkema") == at_default.resolve("Dhr S. Valkema"));
  CHECK(at_default.resolve("S.Valkema") != at_default.resolve("Sybren Valkema"));

  // Lowering the threshold under 81.27 closes the chain by similarity alone.
  auto at_81 = link_surfaces(counts, 81.0);
  REQUIRE(at_81.clusters.size() == 1);
  CHECK(at_81.clusters[0].canonical == "Sybren Valkema");  // max count

  // The manual-seed route produces the single cluster at the default
  // threshold; transitive closure pulls "Dhr S. Valkema" along.
  auto seeded =
      link_surfaces(counts, 85.0, {{"S.Valkema", "Sybren Valkema"}});
  REQUIRE(seeded.clusters.size() == 1);
  CHECK(seeded.clusters[0].canonical == "Sybren Valkema");
  CHECK(seeded.clusters[0].members.size() == 3);
}

TEST_CASE("seed pulls initials into the target cluster") {
  std::map<std::string, std::size_t> counts = {
      {"I. Valkema", 2}, {"Iep Valkema", 4}, {"Sybren Valkema", 12}};
  CHECK(score_pair(split_name("I. Valkema"), split_name("Iep Valkema"))
            .total_score == doctest::Approx(85.56).epsilon(0.001));
  auto dict = link_surfaces(counts, 85.0, {{"Iep Valkema", "Sybren Valkema"}});
  REQUIRE(dict.clusters.size() == 1);
  CHECK(dict.resolve("I. Valkema") == "Sybren Valkema");
}

TEST_CASE("documented borderline: Robert H. Barber misses the threshold") {
  auto scores = score_pair(split_name("Robert H. Barber"),
                           split_name("Robert Hilton Barber"));
  CHECK(scores.lastname_score == 100.0);
  CHECK(scores.total_score < 85.0);
  auto dict = link_surfaces(
      {{"Robert H. Barber", 1}, {"Robert Hilton Barber", 1}}, 85.0);
  CHECK(dict.clusters.size() == 2);
}

TEST_CASE("two dissimilar surfaces stay singletons") {
  auto dict = link_surfaces({{"Harvey Littleton", 2}, {"Mieke Groot", 3}}, 85.0);
  REQUIRE(dict.clusters.size() == 2);
  for (const auto& cluster : dict.clusters)
    CHECK(cluster.members.size() == 1);
}

TEST_CASE("canonical_form ranking") {
  std::map<std::string, std::size_t> counts = {{"Valkema Sr.", 1},
                                               {"Sybren Valkema", 12}};
  CHECK(canonical_form({"Sybren Valkema", "Valkema Sr."}, counts) ==
        "Sybren Valkema");

  std::map<std::string, std::size_t> tied = {{"H. Littleton", 5},
                                             {"Harvey Littleton", 5}};
  CHECK(canonical_form({"H. Littleton", "Harvey Littleton"}, tied) ==
        "Harvey Littleton");  // longer form on equal counts

  CHECK(canonical_form({"Solo"}, {{"Solo", 1}}) == "Solo");

  // Lexicographic last resort on equal count and length.
  std::map<std::string, std::size_t> even = {{"abcd", 2}, {"abce", 2}};
  CHECK(canonical_form({"abce", "abcd"}, even) == "abcd");

  // A seed target wins however rare it is.
  CHECK(canonical_form({"Sybren Valkema", "Valkema Sr."},
                       {{"Valkema Sr.", 9}, {"Sybren Valkema", 1}},
                       {"Sybren Valkema"}) == "Sybren Valkema");
}

TEST_CASE("build_similarity_table shapes") {
  auto three = build_similarity_table(
      set_from_counts({{"a b", 1}, {"c d", 1}, {"e f", 1}}));
  CHECK(three.pairs.size() == 3);

  auto one = build_similarity_table(set_from_counts({{"solo name", 1}}));
  CHECK(one.pairs.empty());

  auto blocked = build_similarity_table(
      set_from_counts({{"valkema", 1}, {"littleton", 1}, {"groot", 1}}),
      Blocking::kLastnameInitial);
  CHECK(blocked.pairs.empty());  // all lastname initials differ

  auto same_block = build_similarity_table(
      set_from_counts({{"valkema", 1}, {"verwey", 1}}),
      Blocking::kLastnameInitial);
  CHECK(same_block.pairs.size() == 1);
}

TEST_CASE("similarity table parallel equals serial") {
  std::map<std::string, std::size_t> counts;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 120; ++i)
    counts["name " + std::to_string(rng() % 100000)] = 1;
  MentionSet mentions = set_from_counts(counts);
  auto serial = build_similarity_table(mentions, Blocking::kNone, {}, 1);
  auto parallel = build_similarity_table(mentions, Blocking::kNone, {}, 8);
  REQUIRE(serial.pairs.size() == parallel.pairs.size());
  for (std::size_t i = 0; i < serial.pairs.size(); ++i) {
    CHECK(serial.pairs[i].a == parallel.pairs[i].a);
    CHECK(serial.pairs[i].scores.total_score ==
          parallel.pairs[i].scores.total_score);
  }
}

TEST_CASE("partition properties on a randomized surface suite") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> lastnames = {
      "valkema", "littleton", "verwey",  "groot", "meitner",
      "barber",  "fischer",   "lewis",   "stam",  "gramberg"};
  const std::vector<std::string> firsts = {"a",    "b",     "durk", "harvey",
                                           "kea",  "mieke", "r",    "robert",
                                           "s",    "iep"};
  std::map<std::string, std::size_t> counts;
  for (int i = 0; i < 100; ++i) {
    std::string name = firsts[rng() % firsts.size()] + " " +
                       lastnames[rng() % lastnames.size()];
    if (rng() % 3 == 0) name = name.substr(0, 1) + ". " + lastnames[rng() % lastnames.size()];
    counts[name] += 1;
  }
  MentionSet mentions = set_from_counts(counts);
  auto table = build_similarity_table(mentions);
  std::vector<SeedAlias> seeds = {{"iep valkema", "s valkema"}};
  auto dict = link_records(mentions, table, 85.0, seeds);

  // Disjoint and covering.
  std::set<std::string> seen;
  std::size_t member_total = 0;
  for (const auto& cluster : dict.clusters) {
    CHECK(std::count(cluster.members.begin(), cluster.members.end(),
                     cluster.canonical) == 1);
    for (const auto& member : cluster.members) {
      CHECK(seen.insert(member).second);  // no surface in two clusters
      ++member_total;
    }
  }
  std::size_t universe = counts.size();
  for (const auto& seed : seeds) {
    universe += counts.count(seed.alias) ? 0 : 1;
    universe += counts.count(seed.canonical) ? 0 : 1;
  }
  CHECK(member_total == universe);
  CHECK(dict.clusters.size() <= universe);

  // Seeds honored.
  CHECK(dict.resolve("iep valkema") == dict.resolve("s valkema"));

  // Rerunning yields the identical partition (idempotent, order-free).
  auto again = link_records(mentions, table, 85.0, seeds);
  REQUIRE(again.clusters.size() == dict.clusters.size());
  for (std::size_t i = 0; i < dict.clusters.size(); ++i) {
    CHECK(again.clusters[i].canonical == dict.clusters[i].canonical);
    CHECK(again.clusters[i].members == dict.clusters[i].members);
  }
}

TEST_CASE("alias dictionary save/load round trip") {
  TempDir dir;
  auto dict = link_surfaces({{"S.Valkema", 3},
                             {"Dhr S. Valkema", 1},
                             {"Sybren Valkema", 12},
                             {"Mieke Groot", 4}},
                            85.0, {{"S.Valkema", "Sybren Valkema"}});
  auto path = (dir.path() / "aliases.json").string();
  save_alias_dictionary(dict, path);
  auto loaded = load_alias_dictionary(path);
  REQUIRE(loaded.clusters.size() == dict.clusters.size());
  CHECK(loaded.resolve("Dhr S. Valkema") == "Sybren Valkema");
  CHECK(loaded.resolve("Mieke Groot") == "Mieke Groot");
  CHECK(loaded.resolve("unknown name") == "unknown name");
  CHECK(loaded.surface_count() == dict.surface_count());
}

TEST_CASE("load_alias_dictionary rejects canonical outside the cluster") {
  TempDir dir;
  auto path = dir.write("bad.json",
                        R"({"clusters":[{"canonical":"X","aliases":["Y"]}]})");
  CHECK_THROWS_AS(load_alias_dictionary(path), ValidationError);
}

TEST_CASE("seed csv loading") {
  TempDir dir;
  auto path = dir.write("seeds.csv",
                        "alias,canonical\n"
                        "Iep Valkema,Sybren Valkema\n"
                        "S.Valkema,Sybren Valkema\n");
  auto seeds = load_seed_aliases(path);
  REQUIRE(seeds.size() == 2);
  CHECK(seeds[0].alias == "Iep Valkema");
  CHECK(seeds[0].canonical == "Sybren Valkema");
}

TEST_CASE("weights validation") {
  LinkageWeights ok;
  CHECK_NOTHROW(ok.validate());
  LinkageWeights bad{0.4, 0.2, 0.3};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  LinkageWeights negative{1.4, -0.2, -0.2};
  CHECK_THROWS_AS(negative.validate(), ValidationError);
  CHECK_THROWS_AS(link_records(set_from_counts({{"a", 1}}), {}, 150.0),
                  ValidationError);
}
