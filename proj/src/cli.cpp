#include "ehrkit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehrkit/cluster.hpp"
#include "ehrkit/corpus.hpp"
#include "ehrkit/csv.hpp"
#include "ehrkit/errors.hpp"
#include "ehrkit/extract.hpp"
#include "ehrkit/index.hpp"
#include "ehrkit/metrics.hpp"
#include "ehrkit/snapshot.hpp"
#include "ehrkit/summarize.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit::cli {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct Options {
  std::string data;
  std::uint64_t seed = 42;
  std::string format = "json";  // json|text
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

struct LoadedData {
  Corpus corpus;
  std::optional<InvertedIndex> index;
};

LoadedData load_data(const Options& opts) {
  std::string path = opts.data;
  if (path.empty()) {
    if (const char* env = std::getenv("EHRTK_DATA")) path = env;
  }
  if (path.empty()) {
    throw ArgumentError("no corpus given: pass --data or set EHRTK_DATA");
  }
  if (is_snapshot_file(path)) {
    Snapshot snapshot = load_snapshot(path);
    return {std::move(snapshot.corpus), std::move(snapshot.index)};
  }
  return {load_csv(path), std::nullopt};
}

json span_json(const Span& span) { return json::array({span.start, span.end}); }

json record_json(const NoteRecord& r) {
  json j;
  j["row_id"] = r.row_id;
  j["subject_id"] = r.subject_id;
  if (r.hadm_id) {
    j["hadm_id"] = *r.hadm_id;
  } else {
    j["hadm_id"] = nullptr;
  }
  j["category"] = r.category;
  j["description"] = r.description;
  j["text"] = r.text;
  return j;
}

std::string fixed2(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << value;
  return s.str();
}

void emit(const Options& opts, std::ostream& out, const std::string& command,
          json payload, const std::function<void(std::ostream&)>& text_mode) {
  if (opts.format == "text") {
    text_mode(out);
    return;
  }
  payload["version"] = kSchemaVersion;
  payload["command"] = command;
  out << payload.dump(2, ' ', false, json::error_handler_t::replace) << "\n";
}

ExtractiveSummary run_summarize(const std::vector<std::string>& texts,
                                const std::string& method, std::size_t k,
                                const std::string& model_path,
                                const TextRankParams& params) {
  if (method == "textrank") {
    return multi_doc_summary(texts, k, SummaryMethod::textrank, nullptr, params);
  }
  if (model_path.empty()) {
    throw ArgumentError("--method nb requires --model");
  }
  const NbSummarizerModel model = load_nb_model(model_path);
  return multi_doc_summary(texts, k, SummaryMethod::naive_bayes, &model, params);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options opts;

  CLI::App app{"Structured access and classical NLP analyses for clinical note dumps"};
  app.set_help_all_flag("--help-all");
  app.require_subcommand(1);
  app.add_option("--data", opts.data,
                 "corpus file (NOTEEVENTS-style CSV or EHRTK1 snapshot); "
                 "default $EHRTK_DATA");
  app.add_option("--seed", opts.seed, "seed for split/kmeans (default 42)");
  app.add_option("--format", opts.format, "output mode")
      ->check(CLI::IsMember({"json", "text"}));

  // ---- corpus-facing commands -------------------------------------------
  auto* cmd_stats = app.add_subcommand("stats", "corpus counts");

  std::vector<std::string> query_words;
  auto* cmd_search = app.add_subcommand("search", "keyword search over the corpus");
  cmd_search->add_option("query", query_words, "query term(s); multi-token queries intersect")
      ->required();

  std::int64_t get_row_id = 0;
  auto* cmd_get = app.add_subcommand("get", "retrieve one record by row_id");
  cmd_get->add_option("row_id", get_row_id)->required();

  double split_ratio = 0.85;
  auto* cmd_split = app.add_subcommand("split", "deterministic train/test split");
  cmd_split->add_option("--ratio", split_ratio, "train fraction in (0,1)");

  std::string snapshot_out;
  bool snapshot_with_index = false;
  auto* cmd_snapshot = app.add_subcommand("snapshot", "write a binary corpus snapshot");
  cmd_snapshot->add_option("--out", snapshot_out)->required();
  cmd_snapshot->add_flag("--with-index", snapshot_with_index,
                         "append the inverted index");

  // ---- text analyses ------------------------------------------------------
  std::string file_arg;
  auto* cmd_sentences = app.add_subcommand("sentences", "sentence spans of a text file");
  cmd_sentences->add_option("file", file_arg)->required();

  std::string tokens_file;
  auto* cmd_tokens = app.add_subcommand("tokens", "word tokens of a text file");
  cmd_tokens->add_option("file", tokens_file)->required();

  std::string sections_file, sections_rules;
  auto* cmd_sections = app.add_subcommand("sections", "detect note sections");
  cmd_sections->add_option("file", sections_file)->required();
  cmd_sections->add_option("--rules", sections_rules,
                           "section rule file (label<TAB>alias|alias...)");

  std::string abbrev_file;
  std::int64_t abbrev_id = -1;
  bool abbrev_expand = false, abbrev_merge = false;
  auto* cmd_abbrev = app.add_subcommand("abbrev", "abbreviation pairs (Schwartz-Hearst)");
  cmd_abbrev->add_option("file", abbrev_file);
  cmd_abbrev->add_option("--id", abbrev_id, "use the text of this corpus record");
  cmd_abbrev->add_flag("--expand", abbrev_expand, "also emit the expanded text");
  cmd_abbrev->add_flag("--merge-corpus", abbrev_merge,
                       "with --id: pool definitions from the whole corpus");

  std::string hyponyms_file;
  auto* cmd_hyponyms = app.add_subcommand("hyponyms", "Hearst-pattern relations");
  cmd_hyponyms->add_option("file", hyponyms_file)->required();

  std::string negation_file;
  std::vector<std::string> negation_targets;
  std::string negation_triggers;
  auto* cmd_negation = app.add_subcommand("negation", "NegEx-style negation per target");
  cmd_negation->add_option("file", negation_file)->required();
  cmd_negation->add_option("--target", negation_targets, "target phrase (repeatable)")
      ->required();
  cmd_negation->add_option("--triggers", negation_triggers,
                           "trigger file (phrase<TAB>class)");

  std::string concepts_file, concepts_vocab;
  auto* cmd_concepts = app.add_subcommand("concepts", "dictionary concept matches");
  cmd_concepts->add_option("file", concepts_file)->required();
  cmd_concepts->add_option("--vocab", concepts_vocab,
                           "TSV concept_id<TAB>name<TAB>synonym")
      ->required();

  std::string phrases_file;
  std::size_t phrases_min_freq = 2, phrases_max_len = 4, phrases_limit = 0;
  auto* cmd_phrases = app.add_subcommand("phrases", "frequent phrase candidates");
  cmd_phrases->add_option("file", phrases_file,
                          "text file (default: whole corpus via --data)");
  cmd_phrases->add_option("--min-freq", phrases_min_freq);
  cmd_phrases->add_option("--max-len", phrases_max_len);
  cmd_phrases->add_option("--limit", phrases_limit, "keep only the top N (0 = all)");

  std::vector<std::string> summarize_files;
  std::vector<std::int64_t> summarize_ids;
  std::string summarize_method = "textrank", summarize_model;
  std::size_t summarize_k = 3;
  TextRankParams textrank_params;
  auto* cmd_summarize = app.add_subcommand("summarize", "extractive summary");
  cmd_summarize->add_option("file", summarize_files, "input text file(s)");
  cmd_summarize->add_option("--id", summarize_ids,
                            "summarize corpus record(s) by row_id");
  cmd_summarize->add_option("--method", summarize_method)
      ->check(CLI::IsMember({"textrank", "nb"}));
  cmd_summarize->add_option("-k,--sentences", summarize_k, "summary size");
  cmd_summarize->add_option("--model", summarize_model, "EHRNB1 model file (for nb)");
  cmd_summarize->add_option("--damping", textrank_params.damping);
  cmd_summarize->add_option("--tol", textrank_params.tol);
  cmd_summarize->add_option("--max-iter", textrank_params.max_iter);

  std::size_t cluster_k = 2, cluster_max_iter = 100;
  double cluster_tol = 1e-9;
  auto* cmd_cluster = app.add_subcommand("cluster", "k-means over TF-IDF vectors");
  cmd_cluster->add_option("-k,--clusters", cluster_k)->required();
  cmd_cluster->add_option("--max-iter", cluster_max_iter);
  cmd_cluster->add_option("--tol", cluster_tol);

  std::int64_t similar_id = 0;
  std::size_t similar_k = 5;
  bool similar_subject_only = false;
  auto* cmd_similar = app.add_subcommand("similar", "top-k similar records");
  cmd_similar->add_option("--id", similar_id)->required();
  cmd_similar->add_option("-k,--top", similar_k);
  cmd_similar->add_flag("--subject-only", similar_subject_only,
                        "restrict candidates to the query's subject_id");

  std::string eval_metric, eval_hyp, eval_ref, eval_smoothing = "none";
  int eval_max_n = 4;
  auto* cmd_eval = app.add_subcommand("eval", "BLEU/ROUGE over line-aligned files");
  cmd_eval->add_option("--metric", eval_metric)
      ->check(CLI::IsMember({"bleu", "rouge1", "rouge2", "rougeL"}))
      ->required();
  cmd_eval->add_option("--hyp", eval_hyp, "hypothesis file, one segment per line")
      ->required();
  cmd_eval->add_option("--ref", eval_ref, "reference file, line-aligned")
      ->required();
  cmd_eval->add_option("--max-n", eval_max_n, "BLEU n-gram order");
  cmd_eval->add_option("--smoothing", eval_smoothing)
      ->check(CLI::IsMember({"none", "add_one"}));

  std::string improvement_file;
  auto* cmd_improvement =
      app.add_subcommand("report-improvement", "before/after relative gains");
  cmd_improvement->add_option("file", improvement_file,
                              "CSV label,before,after (header optional)")
      ->required();

  std::vector<std::string> train_docs, train_refs;
  std::string train_out;
  auto* cmd_nbtrain =
      app.add_subcommand("nb-train", "train the Naive Bayes summarizer");
  cmd_nbtrain->add_option("--doc", train_docs, "training document file (repeatable)")
      ->required();
  cmd_nbtrain->add_option("--ref", train_refs, "paired reference summary file")
      ->required();
  cmd_nbtrain->add_option("--out", train_out, "model output path")->required();

  std::vector<const char*> argv;
  argv.push_back("ehrkit");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help("", CLI::AppFormatMode::Normal);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // help requested inside a subcommand prints through CLI11's own helper
    if (e.get_exit_code() == 0) {
      out << e.what() << "\n";
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cmd_stats->parsed()) {
      LoadedData data = load_data(opts);
      const std::size_t documents = count_documents(data.corpus);
      const std::size_t patients = count_patients(data.corpus);
      const std::size_t sentences = count_sentences(data.corpus);
      emit(opts, out, "stats",
           json{{"documents", documents},
                {"patients", patients},
                {"sentences", sentences},
                {"skipped_rows", data.corpus.skipped_rows()}},
           [&](std::ostream& o) {
             o << "documents: " << documents << "\npatients: " << patients
               << "\nsentences: " << sentences
               << "\nskipped_rows: " << data.corpus.skipped_rows() << "\n";
           });
    } else if (cmd_search->parsed()) {
      LoadedData data = load_data(opts);
      std::string query;
      for (const std::string& w : query_words) {
        if (!query.empty()) query.push_back(' ');
        query += w;
      }
      const InvertedIndex index =
          data.index ? std::move(*data.index) : InvertedIndex::build(data.corpus);
      const auto ids = search_keyword(index, query);
      emit(opts, out, "search",
           json{{"query", query}, {"row_ids", ids}, {"count", ids.size()}},
           [&](std::ostream& o) {
             for (std::int64_t id : ids) o << id << "\n";
           });
    } else if (cmd_get->parsed()) {
      LoadedData data = load_data(opts);
      const NoteRecord& record = get_record(data.corpus, get_row_id);
      emit(opts, out, "get", json{{"record", record_json(record)}},
           [&](std::ostream& o) { o << record.text << "\n"; });
    } else if (cmd_split->parsed()) {
      LoadedData data = load_data(opts);
      const SplitResult result = split(data.corpus, split_ratio, opts.seed);
      json train_ids = json::array(), test_ids = json::array();
      for (const NoteRecord& r : result.train.records()) train_ids.push_back(r.row_id);
      for (const NoteRecord& r : result.test.records()) test_ids.push_back(r.row_id);
      emit(opts, out, "split",
           json{{"seed", result.seed},
                {"ratio", result.ratio},
                {"train_size", result.train.size()},
                {"test_size", result.test.size()},
                {"train_row_ids", train_ids},
                {"test_row_ids", test_ids}},
           [&](std::ostream& o) {
             o << "train: " << result.train.size()
               << "\ntest: " << result.test.size() << "\n";
           });
    } else if (cmd_snapshot->parsed()) {
      LoadedData data = load_data(opts);
      std::optional<InvertedIndex> index;
      if (snapshot_with_index) index = InvertedIndex::build(data.corpus);
      save_snapshot(snapshot_out, data.corpus, index ? &*index : nullptr);
      emit(opts, out, "snapshot",
           json{{"out", snapshot_out},
                {"records", data.corpus.size()},
                {"with_index", snapshot_with_index}},
           [&](std::ostream& o) { o << "wrote " << snapshot_out << "\n"; });
    } else if (cmd_sentences->parsed()) {
      const std::string text = read_file(file_arg);
      json items = json::array();
      for (const Sentence& s : sentencize(text)) {
        items.push_back(json{{"index", s.index},
                             {"span", json::array({s.start, s.end})},
                             {"text", std::string(span_text(text, {s.start, s.end}))}});
      }
      emit(opts, out, "sentences", json{{"count", items.size()}, {"sentences", items}},
           [&](std::ostream& o) {
             for (const Sentence& s : sentencize(text))
               o << span_text(text, {s.start, s.end}) << "\n";
           });
    } else if (cmd_tokens->parsed()) {
      const std::string text = read_file(tokens_file);
      json items = json::array();
      for (const Token& t : tokenize(text)) {
        items.push_back(json{{"text", t.text}, {"span", json::array({t.start, t.end})}});
      }
      emit(opts, out, "tokens", json{{"count", items.size()}, {"tokens", items}},
           [&](std::ostream& o) {
             for (const Token& t : tokenize(text)) o << t.text << "\n";
           });
    } else if (cmd_sections->parsed()) {
      const std::string text = read_file(sections_file);
      const SectionRuleSet rules = sections_rules.empty()
                                       ? default_section_rules()
                                       : load_section_rules(sections_rules);
      json items = json::array();
      for (const Section& s : detect_sections(text, rules)) {
        items.push_back(json{{"header", s.header},
                             {"header_span", span_json(s.header_span)},
                             {"body_span", span_json(s.body_span)},
                             {"body", std::string(span_text(text, s.body_span))}});
      }
      emit(opts, out, "sections", json{{"count", items.size()}, {"sections", items}},
           [&](std::ostream& o) {
             for (const Section& s : detect_sections(text, rules))
               o << s.header << ": " << span_text(text, s.body_span) << "\n";
           });
    } else if (cmd_abbrev->parsed()) {
      std::string text;
      LoadedData data;
      if (abbrev_id >= 0) {
        data = load_data(opts);
        text = get_record(data.corpus, abbrev_id).text;
      } else if (!abbrev_file.empty()) {
        text = read_file(abbrev_file);
      } else {
        throw ArgumentError("abbrev: give a file or --id");
      }
      auto pairs = extract_abbreviations(text);
      if (abbrev_merge && abbrev_id >= 0) {
        // pool definitions from the rest of the corpus; foreign pairs apply
        // from the start of the target text (empty definition span)
        for (const NoteRecord& r : data.corpus.records()) {
          if (r.row_id == abbrev_id) continue;
          for (AbbreviationPair p : extract_abbreviations(r.text)) {
            p.short_span = {0, 0};
            p.long_span = {0, 0};
            pairs.push_back(std::move(p));
          }
        }
      }
      json items = json::array();
      for (const AbbreviationPair& p : pairs) {
        items.push_back(json{{"short_form", p.short_form},
                             {"short_span", span_json(p.short_span)},
                             {"long_form", p.long_form},
                             {"long_span", span_json(p.long_span)}});
      }
      json payload{{"count", items.size()}, {"pairs", items}};
      std::string expanded;
      if (abbrev_expand) {
        expanded = expand_abbreviations(text, pairs);
        payload["expanded_text"] = expanded;
      }
      emit(opts, out, "abbrev", payload, [&](std::ostream& o) {
        for (const AbbreviationPair& p : pairs)
          o << p.short_form << "\t" << p.long_form << "\n";
        if (abbrev_expand) o << expanded << "\n";
      });
    } else if (cmd_hyponyms->parsed()) {
      const std::string text = read_file(hyponyms_file);
      json items = json::array();
      const auto relations = detect_hyponyms(text);
      for (const HyponymRelation& r : relations) {
        items.push_back(json{{"general", r.general},
                             {"general_span", span_json(r.general_span)},
                             {"specific", r.specific},
                             {"specific_span", span_json(r.specific_span)},
                             {"pattern", r.pattern}});
      }
      emit(opts, out, "hyponyms", json{{"count", items.size()}, {"relations", items}},
           [&](std::ostream& o) {
             for (const HyponymRelation& r : relations)
               o << r.specific << " -> " << r.general << " (" << r.pattern << ")\n";
           });
    } else if (cmd_negation->parsed()) {
      const std::string text = read_file(negation_file);
      const NegationRuleSet triggers = negation_triggers.empty()
                                           ? default_negation_triggers()
                                           : load_negation_triggers(negation_triggers);
      const auto results = detect_negation(text, negation_targets, triggers);
      json items = json::array();
      for (const NegationResult& r : results) {
        json item{{"target", r.target},
                  {"target_span", span_json(r.target_span)},
                  {"negated", r.negated}};
        if (r.trigger) {
          item["trigger"] = *r.trigger;
          item["trigger_span"] = span_json(*r.trigger_span);
        } else {
          item["trigger"] = nullptr;
        }
        items.push_back(std::move(item));
      }
      emit(opts, out, "negation", json{{"count", items.size()}, {"results", items}},
           [&](std::ostream& o) {
             for (const NegationResult& r : results) {
               o << r.target << "\t" << (r.negated ? "negated" : "affirmed");
               if (r.trigger) o << "\t" << *r.trigger;
               o << "\n";
             }
           });
    } else if (cmd_concepts->parsed()) {
      const std::string text = read_file(concepts_file);
      const ConceptVocabulary vocab = ConceptVocabulary::load(concepts_vocab);
      const auto matches = extract_concepts(text, vocab);
      json items = json::array();
      for (const ConceptMatch& m : matches) {
        items.push_back(json{{"concept_id", m.concept_id},
                             {"text", m.matched_text},
                             {"span", span_json(m.span)},
                             {"canonical_name", m.canonical_name}});
      }
      emit(opts, out, "concepts", json{{"count", items.size()}, {"matches", items}},
           [&](std::ostream& o) {
             for (const ConceptMatch& m : matches)
               o << m.concept_id << "\t" << m.matched_text << "\t"
                 << m.canonical_name << "\n";
           });
    } else if (cmd_phrases->parsed()) {
      std::vector<PhraseCandidate> phrases;
      if (!phrases_file.empty()) {
        phrases = extract_phrases(read_file(phrases_file), phrases_min_freq,
                                  phrases_max_len);
      } else {
        LoadedData data = load_data(opts);
        phrases = extract_phrases(data.corpus, phrases_min_freq, phrases_max_len);
      }
      if (phrases_limit > 0 && phrases.size() > phrases_limit)
        phrases.resize(phrases_limit);
      json items = json::array();
      for (const PhraseCandidate& p : phrases) {
        items.push_back(json{{"phrase", p.phrase},
                             {"frequency", p.frequency},
                             {"score", p.score}});
      }
      emit(opts, out, "phrases", json{{"count", items.size()}, {"phrases", items}},
           [&](std::ostream& o) {
             for (const PhraseCandidate& p : phrases)
               o << p.phrase << "\t" << p.frequency << "\t" << p.score << "\n";
           });
    } else if (cmd_summarize->parsed()) {
      std::vector<std::string> texts;
      for (const std::string& f : summarize_files) texts.push_back(read_file(f));
      if (!summarize_ids.empty()) {
        LoadedData data = load_data(opts);
        for (std::int64_t id : summarize_ids)
          texts.push_back(get_record(data.corpus, id).text);
      }
      if (texts.empty()) throw ArgumentError("summarize: give file(s) or --id");
      const ExtractiveSummary summary = run_summarize(
          texts, summarize_method, summarize_k, summarize_model, textrank_params);
      json origins = json::array();
      for (const auto& [doc, sent] : summary.origins)
        origins.push_back(json::array({doc, sent}));
      emit(opts, out, "summarize",
           json{{"method", summarize_method},
                {"k", summarize_k},
                {"sentence_indices", summary.sentence_indices},
                {"origins", origins},
                {"text", summary.text}},
           [&](std::ostream& o) { o << summary.text << "\n"; });
    } else if (cmd_cluster->parsed()) {
      LoadedData data = load_data(opts);
      std::vector<std::string> texts;
      for (const NoteRecord& r : data.corpus.records()) texts.push_back(r.text);
      const auto [model, vectors] = tfidf_fit_transform(texts);
      const ClusterResult result =
          kmeans(vectors, cluster_k, opts.seed, cluster_max_iter, cluster_tol);
      json assignments = json::array();
      for (std::size_t i = 0; i < result.assignments.size(); ++i) {
        assignments.push_back(json{{"row_id", data.corpus.records()[i].row_id},
                                   {"cluster", result.assignments[i]}});
      }
      emit(opts, out, "cluster",
           json{{"k", cluster_k},
                {"seed", opts.seed},
                {"inertia", result.inertia},
                {"iterations", result.iterations},
                {"assignments", assignments}},
           [&](std::ostream& o) {
             for (std::size_t i = 0; i < result.assignments.size(); ++i)
               o << data.corpus.records()[i].row_id << "\t"
                 << result.assignments[i] << "\n";
           });
    } else if (cmd_similar->parsed()) {
      LoadedData data = load_data(opts);
      const auto results =
          top_k_similar(data.corpus, similar_id, similar_k, similar_subject_only);
      json items = json::array();
      for (const SimilarDocument& s : results) {
        items.push_back(json{{"row_id", s.row_id}, {"similarity", s.similarity}});
      }
      emit(opts, out, "similar",
           json{{"query", similar_id}, {"k", similar_k}, {"results", items}},
           [&](std::ostream& o) {
             for (const SimilarDocument& s : results)
               o << s.row_id << "\t" << s.similarity << "\n";
           });
    } else if (cmd_eval->parsed()) {
      const auto hyp_lines = read_lines(eval_hyp);
      const auto ref_lines = read_lines(eval_ref);
      if (hyp_lines.size() != ref_lines.size()) {
        throw DataError("eval: hypothesis and reference line counts differ (" +
                        std::to_string(hyp_lines.size()) + " vs " +
                        std::to_string(ref_lines.size()) + ")");
      }
      if (eval_metric == "bleu") {
        std::vector<BleuSegment> segments;
        for (std::size_t i = 0; i < hyp_lines.size(); ++i) {
          segments.push_back(
              {metric_tokens(hyp_lines[i]), {metric_tokens(ref_lines[i])}});
        }
        const BleuScore score = bleu_corpus(
            segments, eval_max_n,
            eval_smoothing == "add_one" ? BleuSmoothing::add_one
                                        : BleuSmoothing::none);
        emit(opts, out, "eval",
             json{{"metric", "bleu"},
                  {"score", score.score},
                  {"precisions", score.precisions},
                  {"brevity_penalty", score.brevity_penalty},
                  {"hyp_length", score.hyp_length},
                  {"ref_length", score.ref_length},
                  {"segments", segments.size()}},
             [&](std::ostream& o) { o << "BLEU: " << score.score << "\n"; });
      } else {
        double p = 0.0, r = 0.0, f = 0.0;
        for (std::size_t i = 0; i < hyp_lines.size(); ++i) {
          const TokenList hyp = metric_tokens(hyp_lines[i]);
          const TokenList ref = metric_tokens(ref_lines[i]);
          RougeScore s;
          if (eval_metric == "rouge1") {
            s = rouge_n(hyp, ref, 1);
          } else if (eval_metric == "rouge2") {
            s = rouge_n(hyp, ref, 2);
          } else {
            s = rouge_l(hyp, ref);
          }
          p += s.precision;
          r += s.recall;
          f += s.f1;
        }
        const double n = hyp_lines.empty() ? 1.0 : static_cast<double>(hyp_lines.size());
        emit(opts, out, "eval",
             json{{"metric", eval_metric},
                  {"precision", p / n},
                  {"recall", r / n},
                  {"f1", f / n},
                  {"segments", hyp_lines.size()}},
             [&](std::ostream& o) {
               o << eval_metric << " P=" << p / n << " R=" << r / n
                 << " F1=" << f / n << "\n";
             });
      }
    } else if (cmd_improvement->parsed()) {
      std::ifstream in(improvement_file, std::ios::binary);
      if (!in) throw IoError("cannot open file: " + improvement_file);
      CsvReader reader(in);
      std::vector<std::string> fields;
      std::size_t line = 0;
      std::vector<ImprovementInput> inputs;
      bool first = true;
      while (reader.next(fields, line)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) {
          throw DataError("report-improvement: line " + std::to_string(line) +
                          ": expected label,before,after");
        }
        try {
          inputs.push_back(
              {fields[0], std::stod(fields[1]), std::stod(fields[2])});
        } catch (const std::exception&) {
          if (first) {
            first = false;
            continue;  // header row
          }
          throw DataError("report-improvement: line " + std::to_string(line) +
                          ": non-numeric before/after");
        }
        first = false;
      }
      const ImprovementReport report = improvement_report(inputs);
      json pairs = json::array();
      for (const ImprovementEntry& e : report.pairs) {
        pairs.push_back(json{{"label", e.label},
                             {"before", e.before},
                             {"after", e.after},
                             {"relative_gain", e.relative_gain},
                             {"display", fixed2(e.relative_gain) + "%"}});
      }
      emit(opts, out, "report-improvement",
           json{{"pairs", pairs},
                {"average_gain", report.average_gain},
                {"average_display", fixed2(report.average_gain) + "%"}},
           [&](std::ostream& o) {
             for (const ImprovementEntry& e : report.pairs) {
               o << e.label << ": " << e.before << " -> " << e.after << " = "
                 << fixed2(e.relative_gain) << "%\n";
             }
             o << "average: " << fixed2(report.average_gain) << "%\n";
           });
    } else if (cmd_nbtrain->parsed()) {
      if (train_docs.size() != train_refs.size()) {
        throw ArgumentError("nb-train: --doc and --ref counts differ");
      }
      std::vector<std::string> docs, refs;
      for (const std::string& f : train_docs) docs.push_back(read_file(f));
      for (const std::string& f : train_refs) refs.push_back(read_file(f));
      const NbSummarizerModel model = nb_train(docs, refs);
      save_nb_model(train_out, model);
      emit(opts, out, "nb-train",
           json{{"documents", docs.size()},
                {"training_sentences", model.training_sentences},
                {"model", train_out}},
           [&](std::ostream& o) { o << "wrote " << train_out << "\n"; });
    }
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ehrkit::cli
