#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archnet/ner.hpp"

namespace archnet {

// A surface form split for scoring: lastname is the final token plus the
// maximal run of infix tokens directly before it; prefix is the rest.
// normalized == prefix + " " + lastname (just lastname when prefix empty).
struct NameParts {
  std::string raw;
  std::string normalized;
  std::string prefix;
  std::string lastname;
};

struct LinkageWeights {
  double lastname = 0.4;
  double prefix = 0.2;
  double substring = 0.4;
  // Throws ValidationError unless the weights are non-negative and sum to 1.
  void validate() const;
};

struct SimilarityScores {
  double lastname_score = 0.0;
  double prefix_score = 0.0;
  double substring_score = 0.0;
  double total_score = 0.0;
};

enum class Blocking { kNone, kLastnameInitial };
Blocking blocking_from_string(std::string_view s);
std::string to_string(Blocking blocking);

struct ScoredPair {
  std::string a, b;  // a < b
  SimilarityScores scores;
};

// All unordered surface pairs within a block, sorted by (a, b).
struct SimilarityTable {
  std::vector<ScoredPair> pairs;
};

struct SeedAlias {
  std::string alias;
  std::string canonical;
};

struct AliasCluster {
  std::string canonical;                // member of members
  std::vector<std::string> members;     // sorted, includes canonical
};

// Partition of all surface forms; every surface is in exactly one cluster.
struct AliasDictionary {
  std::vector<AliasCluster> clusters;   // sorted by canonical

  // Canonical form for a surface; unknown surfaces map to themselves.
  std::string resolve(const std::string& surface) const;
  std::size_t surface_count() const;
  void rebuild_index();

 private:
  std::map<std::string, std::size_t> index_;
};

const std::vector<std::string>& default_infixes();

// Greedy split of the normalized form; EmptyNameError when nothing is left
// after normalization. Multi-token infix entries are matched token-wise.
NameParts split_name(std::string_view surface,
                     const std::vector<std::string>& infixes = default_infixes());

// lastname/prefix scores are ratio() on the split parts, substring is
// partial_ratio() on whole normalized names; total is the weighted sum.
// Symmetric in its two name arguments.
SimilarityScores score_pair(const NameParts& a, const NameParts& b,
                            const LinkageWeights& weights = {});

SimilarityTable build_similarity_table(const MentionSet& mentions,
                                       Blocking blocking = Blocking::kNone,
                                       const LinkageWeights& weights = {},
                                       unsigned threads = 0);

// Union of each surface with its best-scoring match when that score clears
// the threshold; seed pairs are unioned first; clusters are the transitive
// closure. Seed names missing from the corpus join the universe with
// occurrence count zero.
AliasDictionary link_records(const MentionSet& mentions,
                             const SimilarityTable& table, double threshold,
                             const std::vector<SeedAlias>& seeds = {});

// Highest corpus count wins; ties to the longer form (code points), then
// lexicographically smallest. Seed-alias targets pre-empt everything.
std::string canonical_form(const std::vector<std::string>& members,
                           const std::map<std::string, std::size_t>& counts,
                           const std::set<std::string>& seed_targets = {});

std::vector<SeedAlias> load_seed_aliases(const std::string& path);
void save_alias_dictionary(const AliasDictionary& dict,
                           const std::string& path);
AliasDictionary load_alias_dictionary(const std::string& path);

}  // namespace archnet
