#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "archnet/analysis.hpp"
#include "archnet/corpus.hpp"
#include "archnet/errors.hpp"
#include "archnet/evaluation.hpp"
#include "archnet/kblink.hpp"
#include "archnet/linkage.hpp"
#include "archnet/ner.hpp"
#include "archnet/network.hpp"
#include "archnet/pipeline.hpp"
#include "archnet/text.hpp"

namespace {

using namespace archnet;

// Documents witnessing each linked co-occurrence pair, for worksheet rows.
WitnessMap mention_witnesses(const MentionSet& mentions,
                             const AliasDictionary& aliases,
                             const std::vector<LinkedActor>& actors) {
  std::set<std::string> linked;
  for (const auto& actor : actors)
    if (actor.kb_id) linked.insert(actor.canonical_name);
  std::map<std::string, std::set<std::string>> per_doc;
  for (const auto& mention : mentions.mentions) {
    const auto canonical = aliases.resolve(mention.surface);
    if (linked.count(canonical)) per_doc[mention.doc_id].insert(canonical);
  }
  WitnessMap witnesses;
  for (const auto& [doc, names] : per_doc)
    for (auto a = names.begin(); a != names.end(); ++a)
      for (auto b = std::next(a); b != names.end(); ++b)
        witnesses[{*a, *b}].push_back(doc);
  return witnesses;
}

// Letters behind each sender-receiver pair of the manual network.
void add_manual_witnesses(const std::string& csv_path,
                          const AliasDictionary* aliases,
                          WitnessMap& witnesses) {
  for_each_csv_row(
      csv_path, {"sender", "receiver", "doc_id"},
      [&](const std::vector<std::string>& fields, std::size_t) {
        std::string u = trim(fields[0]);
        std::string v = trim(fields[1]);
        if (aliases != nullptr) {
          u = aliases->resolve(u);
          v = aliases->resolve(v);
        }
        if (u.empty() || v.empty() || u == v) return;
        if (v < u) std::swap(u, v);
        auto& docs = witnesses[{u, v}];
        const std::string doc = trim(fields[2]);
        if (std::find(docs.begin(), docs.end(), doc) == docs.end())
          docs.push_back(doc);
      });
}

std::string joined_with(const std::filesystem::path& dir,
                        const std::string& name) {
  return (dir / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"archnet: build and analyze social networks from recognized "
               "archival correspondence"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand(
      "run", "Run the full pipeline from a configuration file");
  std::string run_config_path, run_out;
  PipelineConfig overrides;
  run_cmd->add_option("--config", run_config_path, "Pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  auto* ov_pages = run_cmd->add_option("--pages", overrides.pages_path,
                                       "Override the pages input");
  auto* ov_meta = run_cmd->add_option("--metadata", overrides.metadata_path,
                                      "Override the metadata input");
  auto* ov_gaz = run_cmd->add_option("--gazetteer", overrides.gazetteer_path,
                                     "Override the gazetteer");
  auto* ov_import = run_cmd->add_option(
      "--import-mentions", overrides.import_mentions_path,
      "Override the imported mentions");
  auto* ov_seeds =
      run_cmd->add_option("--seeds", overrides.seeds_path, "Override seeds");
  auto* ov_cache = run_cmd->add_option("--kb-cache", overrides.kb_cache_path,
                                       "Override the KB cache");
  auto* ov_anchor = run_cmd->add_option("--anchor", overrides.anchor_kb_id,
                                        "Override the anchor entity id");
  auto* ov_latin = run_cmd->add_option(
      "--latin-threshold", overrides.latin_threshold,
      "Override the typed-page Latin-letter fraction");
  auto* ov_link = run_cmd->add_option("--linkage-threshold",
                                      overrides.linkage_threshold,
                                      "Override the record-linkage threshold");
  auto* ov_minw = run_cmd->add_option("--min-weight", overrides.min_weight,
                                      "Override the edge-weight floor");
  auto* ov_seed =
      run_cmd->add_option("--seed", overrides.seed, "Override the run seed");
  auto* ov_offline = run_cmd->add_flag("--offline,!--online", overrides.offline,
                                       "Forbid all network access");
  auto* ov_country = run_cmd->add_flag("--country,!--no-country",
                                       overrides.enrich_country,
                                       "Attach countries to linked actors");
  run_cmd->callback([&] {
    auto config = load_pipeline_config(run_config_path);
    if (ov_pages->count()) config.pages_path = overrides.pages_path;
    if (ov_meta->count()) config.metadata_path = overrides.metadata_path;
    if (ov_gaz->count()) config.gazetteer_path = overrides.gazetteer_path;
    if (ov_import->count())
      config.import_mentions_path = overrides.import_mentions_path;
    if (ov_seeds->count()) config.seeds_path = overrides.seeds_path;
    if (ov_cache->count()) config.kb_cache_path = overrides.kb_cache_path;
    if (ov_anchor->count()) config.anchor_kb_id = overrides.anchor_kb_id;
    if (ov_latin->count()) config.latin_threshold = overrides.latin_threshold;
    if (ov_link->count())
      config.linkage_threshold = overrides.linkage_threshold;
    if (ov_minw->count()) config.min_weight = overrides.min_weight;
    if (ov_seed->count()) config.seed = overrides.seed;
    if (ov_offline->count()) config.offline = overrides.offline;
    if (ov_country->count()) config.enrich_country = overrides.enrich_country;
    const auto manifest = run_pipeline(config, run_out);
    for (const auto& stage : manifest.stages) {
      std::cout << "stage " << stage.stage;
      if (stage.entity_count >= 0)
        std::cout << ": " << stage.entity_count << " entities";
      std::cout << "\n";
    }
    std::cout << "artifacts in " << run_out << "\n";
  });

  // ---- ingest ---------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Load pages and metadata, classify modality, write corpus");
  std::string in_pages, in_meta, in_out;
  double in_latin = 0.5;
  ingest_cmd->add_option("--pages", in_pages, "Page records (JSON Lines)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--metadata", in_meta, "Document metadata (CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--latin-threshold", in_latin,
                         "Typed-page Latin-letter fraction");
  ingest_cmd->add_option("--out", in_out, "Corpus artifact path")->required();
  ingest_cmd->callback([&] {
    auto corpus = ingest_pages(in_pages, in_meta);
    ModalityOptions options;
    options.latin_threshold = in_latin;
    classify_corpus(corpus, options);
    save_corpus(corpus, in_out);
    std::cout << "ingested " << corpus.pages.size() << " pages -> " << in_out
              << "\n";
  });

  // ---- ner ------------------------------------------------------------------
  auto* ner_cmd = app.add_subcommand(
      "ner", "Recognize person mentions on correspondence pages");
  std::string ner_corpus, ner_gazetteer, ner_import, ner_out;
  unsigned ner_threads = 0;
  ner_cmd->add_option("--corpus", ner_corpus, "Corpus artifact")
      ->required()
      ->check(CLI::ExistingFile);
  ner_cmd->add_option("--gazetteer", ner_gazetteer, "Name list, one per line")
      ->check(CLI::ExistingFile);
  ner_cmd->add_option("--import", ner_import,
                      "Precomputed mentions (JSON Lines)")
      ->check(CLI::ExistingFile);
  ner_cmd->add_option("--threads", ner_threads, "Worker threads (0 = auto)");
  ner_cmd->add_option("--out", ner_out, "Mentions artifact path")->required();
  ner_cmd->callback([&] {
    const auto corpus = load_corpus(ner_corpus);
    const auto documents = group_documents(corpus);
    std::vector<std::shared_ptr<Recognizer>> recognizers;
    if (!ner_gazetteer.empty())
      recognizers.push_back(std::make_shared<GazetteerRecognizer>(
          GazetteerRecognizer::from_file(ner_gazetteer)));
    if (!ner_import.empty())
      recognizers.push_back(std::make_shared<ImportRecognizer>(ner_import));
    const auto mentions = build_mention_set(documents, recognizers, ner_threads);
    save_mentions(mentions, ner_out);
    std::cout << mentions.mentions.size() << " mentions, "
              << mentions.surface_counts.size() << " unique surfaces -> "
              << ner_out << "\n";
  });

  // ---- link-records -----------------------------------------------------------
  auto* lr_cmd = app.add_subcommand(
      "link-records", "Merge surface forms denoting the same person");
  std::string lr_mentions, lr_seeds, lr_blocking = "none", lr_out;
  double lr_threshold = 85.0;
  LinkageWeights lr_weights;
  lr_cmd->add_option("--mentions", lr_mentions, "Mentions artifact")
      ->required()
      ->check(CLI::ExistingFile);
  lr_cmd->add_option("--seeds", lr_seeds, "Seed aliases (CSV)")
      ->check(CLI::ExistingFile);
  lr_cmd->add_option("--threshold", lr_threshold, "Merge threshold (0-100)")
      ->check(CLI::Range(0.0, 100.0));
  lr_cmd->add_option("--blocking", lr_blocking,
                     "Candidate blocking: none or lastname-initial");
  lr_cmd->add_option("--w-lastname", lr_weights.lastname, "Lastname weight");
  lr_cmd->add_option("--w-prefix", lr_weights.prefix, "Prefix weight");
  lr_cmd->add_option("--w-substring", lr_weights.substring,
                     "Substring weight");
  lr_cmd->add_option("--out", lr_out, "Alias dictionary path")->required();
  lr_cmd->callback([&] {
    lr_weights.validate();
    const auto mentions = load_mentions(lr_mentions);
    std::vector<SeedAlias> seeds;
    if (!lr_seeds.empty()) seeds = load_seed_aliases(lr_seeds);
    const auto table = build_similarity_table(
        mentions, blocking_from_string(lr_blocking), lr_weights);
    const auto aliases = link_records(mentions, table, lr_threshold, seeds);
    save_alias_dictionary(aliases, lr_out);
    std::cout << mentions.surface_counts.size() << " surfaces -> "
              << aliases.clusters.size() << " clusters -> " << lr_out << "\n";
  });

  // ---- link-entities ------------------------------------------------------------
  auto* le_cmd = app.add_subcommand(
      "link-entities", "Resolve alias clusters to knowledge-base entities");
  std::string le_aliases, le_mentions, le_anchor, le_cache, le_out;
  bool le_offline = true, le_country = true;
  le_cmd->add_option("--aliases", le_aliases, "Alias dictionary")
      ->required()
      ->check(CLI::ExistingFile);
  le_cmd->add_option("--mentions", le_mentions,
                     "Mentions artifact (for candidate walk order)")
      ->check(CLI::ExistingFile);
  le_cmd->add_option("--anchor", le_anchor, "Anchor entity id")->required();
  le_cmd->add_option("--kb-cache", le_cache, "Recorded KB cache (JSON)");
  le_cmd->add_flag("--offline,!--online", le_offline,
                   "Forbid all network access");
  le_cmd->add_flag("--country,!--no-country", le_country,
                   "Attach countries to linked actors");
  le_cmd->add_option("--out", le_out, "Linked actors path")->required();
  le_cmd->callback([&] {
    const auto aliases = load_alias_dictionary(le_aliases);
    std::map<std::string, std::size_t> counts;
    if (!le_mentions.empty()) counts = load_mentions(le_mentions).surface_counts;
    KbCache cache;
    if (!le_cache.empty()) cache = KbCache::open(le_cache);
    std::unique_ptr<KbClient> fallback;
    if (!le_offline) fallback = std::make_unique<SparqlKbClient>();
    CachedKbClient client(std::move(cache), std::move(fallback));
    TokenFrequencyProvider provider;
    LinkOptions options;
    options.enrich_country = le_country;
    const auto actors =
        link_entities(aliases, le_anchor, client, provider, counts, options);
    save_linked_actors(actors, le_out);
    std::cout << aliases.clusters.size() << " clusters -> " << actors.size()
              << " linked actors -> " << le_out << "\n";
  });

  // ---- build-network ------------------------------------------------------------
  auto* bn_cmd = app.add_subcommand(
      "build-network", "Build the co-occurrence network from linked actors");
  std::string bn_corpus, bn_mentions, bn_aliases, bn_actors, bn_out;
  long long bn_min_weight = 1;
  bn_cmd->add_option("--corpus", bn_corpus, "Corpus artifact")
      ->required()
      ->check(CLI::ExistingFile);
  bn_cmd->add_option("--mentions", bn_mentions, "Mentions artifact")
      ->required()
      ->check(CLI::ExistingFile);
  bn_cmd->add_option("--aliases", bn_aliases, "Alias dictionary")
      ->required()
      ->check(CLI::ExistingFile);
  bn_cmd->add_option("--actors", bn_actors, "Linked actors")
      ->required()
      ->check(CLI::ExistingFile);
  bn_cmd->add_option("--min-weight", bn_min_weight, "Edge-weight floor")
      ->check(CLI::Range(1LL, std::numeric_limits<long long>::max()));
  bn_cmd->add_option("--out", bn_out, "Network path (GraphML)")->required();
  bn_cmd->callback([&] {
    const auto corpus = load_corpus(bn_corpus);
    const auto documents = group_documents(corpus);
    const auto mentions = load_mentions(bn_mentions);
    const auto aliases = load_alias_dictionary(bn_aliases);
    const auto actors = load_linked_actors(bn_actors);
    const auto network = prune(
        build_cooccurrence(documents, mentions, aliases, actors),
        bn_min_weight);
    save_graphml(network, bn_out);
    std::cout << network.node_count() << " nodes, " << network.edge_count()
              << " edges -> " << bn_out << "\n";
  });

  // ---- load-manual --------------------------------------------------------------
  auto* lm_cmd = app.add_subcommand(
      "load-manual", "Build the sender-receiver network from a curated CSV");
  std::string lm_csv, lm_aliases, lm_out;
  lm_cmd->add_option("--csv", lm_csv, "sender,receiver,doc_id rows")
      ->required()
      ->check(CLI::ExistingFile);
  lm_cmd->add_option("--aliases", lm_aliases, "Alias dictionary")
      ->check(CLI::ExistingFile);
  lm_cmd->add_option("--out", lm_out, "Network path (GraphML)")->required();
  lm_cmd->callback([&] {
    AliasDictionary aliases;
    const bool resolve = !lm_aliases.empty();
    if (resolve) aliases = load_alias_dictionary(lm_aliases);
    const auto network =
        load_manual_network(lm_csv, resolve ? &aliases : nullptr);
    save_graphml(network, lm_out);
    std::cout << network.node_count() << " nodes, " << network.edge_count()
              << " edges -> " << lm_out << "\n";
  });

  // ---- analyze --------------------------------------------------------------
  auto* an_cmd = app.add_subcommand(
      "analyze", "Graph statistics, centralities, and communities");
  std::string an_graph, an_out;
  std::size_t an_top = 10;
  an_cmd->add_option("--graph", an_graph, "Network (GraphML)")
      ->required()
      ->check(CLI::ExistingFile);
  an_cmd->add_option("--top", an_top, "Rows in the centrality ranking");
  an_cmd->add_option("--out", an_out, "Stats path (JSON)")->required();
  an_cmd->callback([&] {
    const auto network = load_graphml(an_graph);
    const auto doc = analyze_graph_json(network, an_top);
    write_file(an_out, doc.dump(2) + "\n");
    std::cout << "analyzed " << network.node_count() << " nodes -> " << an_out
              << "\n";
  });

  // ---- compare --------------------------------------------------------------
  auto* cmp_cmd = app.add_subcommand(
      "compare",
      "Diff the automatic network against the manual one and sample "
      "worksheets");
  std::string cmp_auto, cmp_manual, cmp_aliases, cmp_mentions, cmp_actors,
      cmp_manual_csv, cmp_out;
  std::size_t cmp_missing = 0, cmp_extra = 0;
  std::uint64_t cmp_seed = 42;
  cmp_cmd->add_option("--auto", cmp_auto, "Automatic network (GraphML)")
      ->required()
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--manual", cmp_manual, "Manual network (GraphML)")
      ->required()
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--aliases", cmp_aliases, "Alias dictionary")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--mentions", cmp_mentions,
                      "Mentions artifact (fills extra-side witness docs)")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--actors", cmp_actors,
                      "Linked actors (fills extra-side witness docs)")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--manual-csv", cmp_manual_csv,
                      "Curated CSV (fills missing-side witness docs)")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--sample-missing", cmp_missing,
                      "Worksheet rows to sample from the missing edges");
  cmp_cmd->add_option("--sample-extra", cmp_extra,
                      "Worksheet rows to sample from the extra edges");
  cmp_cmd->add_option("--seed", cmp_seed, "Sampling seed");
  cmp_cmd->add_option("--out", cmp_out, "Output directory")->required();
  cmp_cmd->callback([&] {
    const auto automatic = load_graphml(cmp_auto);
    const auto manual = load_graphml(cmp_manual);
    AliasDictionary aliases;
    const bool resolve = !cmp_aliases.empty();
    if (resolve) aliases = load_alias_dictionary(cmp_aliases);
    const auto diff =
        diff_networks(automatic, manual, resolve ? &aliases : nullptr);

    std::filesystem::create_directories(cmp_out);
    const std::filesystem::path out_dir(cmp_out);
    write_file(joined_with(out_dir, "diff.json"),
               diff_to_json(diff).dump(2) + "\n");

    WitnessMap witnesses;
    if (!cmp_mentions.empty() && !cmp_actors.empty()) {
      const auto mentions = load_mentions(cmp_mentions);
      const auto actors = load_linked_actors(cmp_actors);
      witnesses = mention_witnesses(mentions, aliases, actors);
    }
    if (!cmp_manual_csv.empty())
      add_manual_witnesses(cmp_manual_csv, resolve ? &aliases : nullptr,
                           witnesses);

    if (cmp_missing > 0)
      save_worksheet(joined_with(out_dir, "missing_worksheet.csv"),
                     sample_connections(diff.missing_edges, cmp_missing,
                                        cmp_seed, &witnesses));
    if (cmp_extra > 0)
      save_worksheet(joined_with(out_dir, "extra_worksheet.csv"),
                     sample_connections(diff.extra_edges, cmp_extra, cmp_seed,
                                        &witnesses));
    std::cout << diff.missing_edges.size() << " missing, "
              << diff.extra_edges.size() << " extra, "
              << diff.shared_edges.size() << " shared -> " << cmp_out << "\n";
  });

  // ---- summarize --------------------------------------------------------------
  auto* sum_cmd = app.add_subcommand(
      "summarize", "Tally annotated worksheets into stage accuracies");
  std::string sum_missing, sum_extra, sum_out;
  sum_cmd->add_option("--missing", sum_missing, "Annotated missing worksheet")
      ->check(CLI::ExistingFile);
  sum_cmd->add_option("--extra", sum_extra, "Annotated extra worksheet")
      ->check(CLI::ExistingFile);
  sum_cmd->add_option("--out", sum_out, "Summary path (JSON)")->required();
  sum_cmd->callback([&] {
    if (sum_missing.empty() && sum_extra.empty())
      throw ValidationError("summarize needs --missing and/or --extra");
    std::vector<AnnotationRecord> missing, extra;
    if (!sum_missing.empty()) missing = load_worksheet(sum_missing);
    if (!sum_extra.empty()) extra = load_worksheet(sum_extra);
    const auto summary = summarize_annotations(missing, extra);
    write_file(sum_out, summary_to_json(summary).dump(2) + "\n");
    std::cout << "entities: " << summary.counts.sampled_entities
              << ", entering: " << summary.entering_evaluation
              << ", overall accuracy: " << 100.0 * summary.overall_accuracy
              << "% -> " << sum_out << "\n";
  });

  // ---- export --------------------------------------------------------------
  auto* ex_cmd =
      app.add_subcommand("export", "Re-serialize a network artifact");
  std::string ex_graph, ex_format = "graphml", ex_out;
  ex_cmd->add_option("--graph", ex_graph, "Network (GraphML)")
      ->required()
      ->check(CLI::ExistingFile);
  ex_cmd->add_option("--format", ex_format, "graphml, json, or dot");
  ex_cmd->add_option("--out", ex_out, "Output path")->required();
  ex_cmd->callback([&] {
    const auto network = load_graphml(ex_graph);
    export_graph(network, export_format_from_string(ex_format), ex_out);
    std::cout << "wrote " << ex_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are validation failures
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DuplicateIdError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyNameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyGraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
