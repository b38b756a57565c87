#include "riskrel/cli.hpp"

#include "riskrel/corpus.hpp"
#include "riskrel/encoder.hpp"
#include "riskrel/error.hpp"
#include "riskrel/eval.hpp"
#include "riskrel/io.hpp"
#include "riskrel/pairgen.hpp"
#include "riskrel/scoring.hpp"
#include "riskrel/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace riskrel::cli {
namespace {

namespace fs = std::filesystem;

/// Files written by the current command; removed again unless the command
/// completes.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

  void write(const fs::path& path, std::string_view bytes) {
    note_dirs(path.parent_path());
    written_.push_back(path);
    io::write_file(path, bytes);
  }

  void commit() { committed_ = true; }

 private:
  void note_dirs(const fs::path& dir) {
    if (dir.empty() || fs::exists(dir)) return;
    note_dirs(dir.parent_path());
    created_dirs_.push_back(dir);
  }

  std::vector<fs::path> written_;
  std::vector<fs::path> created_dirs_;
  bool committed_ = false;
};

std::vector<std::string> list_arg(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : io::split(value, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void require_dir(const fs::path& dir, const std::string& what) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::MissingFile, what + " directory not found: " + dir.string());
  }
}

std::vector<Paragraph> load_paragraphs(const fs::path& path, const std::vector<std::string>& sections,
                                       std::optional<int> year) {
  std::vector<Paragraph> kept;
  for (auto& p : io::read_paragraphs(path)) {
    if (!sections.empty() && std::find(sections.begin(), sections.end(), p.section) == sections.end()) continue;
    if (year && p.year != *year) continue;
    kept.push_back(std::move(p));
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyCorpus, "no paragraphs selected from " + path.string());
  return kept;
}

struct LoadedModel {
  Model model;
  std::string fingerprint;
};

LoadedModel load_fingerprinted(const fs::path& path) {
  LoadedModel m{load_model(path), {}};
  m.fingerprint = model_fingerprint(serialize_model(m.model));
  return m;
}

/// Embeddings either precomputed (and checked against the model) or
/// computed on the spot from the paragraphs.
EmbeddingIndex obtain_index(const LoadedModel& model, const std::vector<Paragraph>& paragraphs,
                            const std::string& embeddings_path) {
  if (embeddings_path.empty()) return embed_corpus(model.model, group_by_firm(paragraphs), model.fingerprint);
  EmbeddingIndex stored = deserialize_index(io::read_file(embeddings_path));
  if (stored.model_fingerprint != model.fingerprint) {
    throw Error(ErrorCode::FingerprintMismatch, "embeddings " + embeddings_path + " were produced by model " +
                                                    stored.model_fingerprint + ", not " + model.fingerprint);
  }
  std::set<std::string> wanted;
  for (const auto& p : paragraphs) wanted.insert(p.id);
  for (auto& firm : stored.firms) {
    std::erase_if(firm.paragraphs, [&](const IndexedParagraph& p) { return !wanted.contains(p.id); });
  }
  std::erase_if(stored.firms, [](const FirmEmbeddings& f) { return f.paragraphs.empty(); });
  return stored;
}

std::map<std::pair<std::string, std::string>, double> cavdsr_table(
    const std::vector<std::string>& firms, const std::map<std::string, ReturnSeries>& returns,
    std::size_t min_overlap) {
  std::map<std::pair<std::string, std::string>, double> out;
  for (std::size_t i = 0; i < firms.size(); ++i) {
    for (std::size_t j = i + 1; j < firms.size(); ++j) {
      const auto a = returns.find(firms[i]);
      const auto b = returns.find(firms[j]);
      if (a == returns.end() || b == returns.end()) continue;
      try {
        out[{std::min(firms[i], firms[j]), std::max(firms[i], firms[j])}] =
            cavdsr(a->second, b->second, min_overlap);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientOverlap && e.code() != ErrorCode::ZeroVariance) throw;
      }
    }
  }
  return out;
}

std::string optional_number(const std::function<double()>& compute) {
  try {
    return io::fixed(compute(), 6);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance || e.code() == ErrorCode::DegenerateInput) return "NA";
    throw;
  }
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string root;
  std::string out;
  std::size_t min_tokens = kDefaultMinTokens;
  std::string sections = "1A,7A";
};

void cmd_ingest(const IngestArgs& a, std::ostream& out) {
  require_dir(a.root, "filing root");
  IngestOptions options;
  options.min_tokens = a.min_tokens;
  options.sections = list_arg(a.sections);
  const auto paragraphs = ingest_directory(a.root, options);
  if (paragraphs.empty()) throw Error(ErrorCode::EmptyCorpus, "no paragraphs extracted under " + a.root);
  OutputGuard guard;
  guard.write(a.out, io::paragraphs_to_jsonl(paragraphs));
  guard.commit();
  std::set<std::pair<std::string, int>> filings;
  for (const auto& p : paragraphs) filings.insert({p.firm_id, p.year});
  out << "ingested " << paragraphs.size() << " paragraphs from " << filings.size() << " filings of "
      << group_by_firm(paragraphs).size() << " firms\n";
}

// ---------------------------------------------------------------- pairs

struct PairsArgs {
  std::string in;
  std::string out;
  std::string view = "both";
  std::uint64_t seed = 0;
  std::size_t train = 160;
  std::size_t val = 40;
  std::size_t min_tokens = kDefaultMinTokens;
  std::size_t min_span = 32;
  std::size_t overlap_cap = 128;
  std::size_t max_pairs_per_paragraph = 1;
};

void cmd_pairs(const PairsArgs& a, std::ostream& out) {
  std::vector<View> views;
  if (a.view == "both") {
    views = {View::Chronological, View::Lexical};
  } else {
    views = {view_from_string(a.view)};
  }
  const auto paragraphs = io::read_paragraphs(a.in);
  if (paragraphs.empty()) throw Error(ErrorCode::EmptyCorpus, "no paragraphs in " + a.in);

  OutputGuard guard;
  for (View view : views) {
    std::vector<PositivePair> pairs;
    std::uint64_t split_seed = a.seed + 1;
    std::string note;
    if (view == View::Chronological) {
      for (const auto& corpus : group_by_firm(paragraphs)) {
        auto firm_pairs = build_chronological_pairs(corpus, a.min_tokens);
        pairs.insert(pairs.end(), std::make_move_iterator(firm_pairs.begin()),
                     std::make_move_iterator(firm_pairs.end()));
      }
    } else {
      LexicalOptions options;
      options.seed = a.seed;
      options.min_span = a.min_span;
      options.overlap_cap = a.overlap_cap;
      options.max_pairs_per_paragraph = a.max_pairs_per_paragraph;
      LexicalResult result = build_lexical_pairs(paragraphs, options);
      pairs = std::move(result.pairs);
      split_seed = a.seed + 2;
      note = ", " + std::to_string(result.skipped) + " short paragraphs skipped";
    }
    const std::size_t available = pairs.size();
    SplitResult split = split_train_val(std::move(pairs), a.train, a.val, split_seed);
    const std::string name(to_string(view));
    guard.write(fs::path(a.out) / (name + ".train.jsonl"), io::pairs_to_jsonl(split.train));
    guard.write(fs::path(a.out) / (name + ".val.jsonl"), io::pairs_to_jsonl(split.val));
    out << name << ": " << available << " candidate pairs, " << split.train.size() << " train, "
        << split.val.size() << " val" << note << "\n";
  }
  guard.commit();
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string pairs;
  std::string out;
  std::string report;
  std::string view = "both";
  std::map<std::string, std::string> overrides;  // TrainConfig key -> text
};

const std::vector<std::string> kTrainKeys = {"batch_size", "learning_rate", "warmup_steps", "max_epochs",
                                             "patience",   "temperature",   "l2_coeff",     "seed",
                                             "max_len",    "embed_dim",     "min_freq"};

std::vector<PositivePair> read_split(const fs::path& dir, const std::vector<View>& views, std::string_view split) {
  std::vector<PositivePair> pairs;
  for (View v : views) {
    const fs::path path = dir / (std::string(to_string(v)) + "." + std::string(split) + ".jsonl");
    auto part = io::read_pairs(path);
    pairs.insert(pairs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return pairs;
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
  require_dir(a.pairs, "pairs");
  TrainConfig config;
  config.apply(a.overrides);
  config.validate();
  const std::vector<View> views = a.view == "both" ? std::vector<View>{View::Chronological, View::Lexical}
                                                   : std::vector<View>{view_from_string(a.view)};
  const auto train_pairs = read_split(a.pairs, views, "train");
  const auto val_pairs = read_split(a.pairs, views, "val");
  TrainResult result = train(train_pairs, val_pairs, config);

  OutputGuard guard;
  guard.write(a.out, serialize_model(result.model));
  if (!a.report.empty()) guard.write(a.report, result.report.to_jsonl());
  guard.commit();
  const EpochStats& best = result.report.best();
  out << "trained " << result.report.epochs_run() << " epochs (" << result.report.stop_reason
      << "), best epoch " << result.report.best_epoch << " val loss " << io::fixed(best.val_loss, 6)
      << " (initial " << io::fixed(result.report.initial_val_loss, 6) << ")\n";
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
  std::string model;
  std::string in;
  std::string out;
};

void cmd_embed(const EmbedArgs& a, std::ostream& out) {
  const LoadedModel model = load_fingerprinted(a.model);
  const auto paragraphs = load_paragraphs(a.in, {}, std::nullopt);
  const EmbeddingIndex index = embed_corpus(model.model, group_by_firm(paragraphs), model.fingerprint);
  OutputGuard guard;
  guard.write(a.out, serialize_index(index));
  guard.commit();
  out << "embedded " << paragraphs.size() << " paragraphs of " << index.firms.size() << " firms with model "
      << model.fingerprint << "\n";
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string model;
  std::string paragraphs;
  std::string embeddings;
  double threshold = kDefaultThreshold;
  std::string out_matrix;
  std::string out_evidence;
  std::string sections = "1A,7A";
  std::optional<int> year;
};

void cmd_score(const ScoreArgs& a, std::ostream& out) {
  const LoadedModel model = load_fingerprinted(a.model);
  const auto paragraphs = load_paragraphs(a.paragraphs, list_arg(a.sections), a.year);
  const EmbeddingIndex index = obtain_index(model, paragraphs, a.embeddings);
  const ScoredMatrix scored = score_all(index, index.firm_ids(), a.threshold);

  std::map<std::string, const Paragraph*> by_id;
  for (const auto& p : paragraphs) by_id[p.id] = &p;
  OutputGuard guard;
  guard.write(a.out_matrix, scored.matrix.to_csv());
  for (const auto& pair : scored.pairs) {
    guard.write(fs::path(a.out_evidence) / evidence_file_name(pair.firm_a, pair.firm_b),
                evidence_report(pair, by_id));
  }
  guard.commit();
  const MrpResult* top = nullptr;
  for (const auto& pair : scored.pairs) {
    if (top == nullptr || pair.rrs > top->rrs) top = &pair;
  }
  out << "scored " << scored.pairs.size() << " firm pairs at threshold " << io::fixed(a.threshold, 2);
  if (top != nullptr) out << "; highest RRS " << top->firm_a << "-" << top->firm_b << " " << io::fixed(top->rrs, 6);
  out << "\n";
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string rrs;
  std::string prices;
  std::string gics;
  std::string out;
  std::size_t min_overlap = kMinOverlap;
  std::string retrieval;
  std::string k = "1,3,5,10";
};

std::vector<RankedList> read_ranked_lists(const fs::path& path) {
  std::vector<RankedList> lists;
  std::size_t line_no = 0;
  for (const auto& line : io::split(io::read_file(path), '\n')) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      RankedList list;
      list.query_id = j.at("query").get<std::string>();
      list.ranked = j.at("ranked").get<std::vector<std::string>>();
      for (const auto& id : j.at("relevant")) list.relevant.insert(id.get<std::string>());
      lists.push_back(std::move(list));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lists;
}

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const RrsMatrix matrix = RrsMatrix::from_csv(io::read_file(a.rrs));
  require_dir(a.prices, "prices");
  const auto returns = read_return_dir(a.prices);
  const GicsMap gics = parse_gics(io::read_file(a.gics));
  const PairRecordSet set = build_pair_records(matrix, returns, a.min_overlap);

  auto baseline = [&](GicsLevel level) {
    std::vector<PairRecord> records = set.records;
    for (auto& r : records) r.rrs = gics_binary_rrs(gics, r.firm_a, r.firm_b, level);
    return alignment_rho(records, Correlation::Pearson);
  };
  const std::string rho = optional_number([&] { return alignment_rho(set.records, Correlation::Pearson); });
  const std::string rho_s = optional_number([&] { return alignment_rho(set.records, Correlation::Spearman); });
  const std::string rho_sector = optional_number([&] { return baseline(GicsLevel::Sector); });
  const std::string rho_industry = optional_number([&] { return baseline(GicsLevel::Industry); });

  std::string pairs_csv = "firm_a,firm_b,rrs,cavdsr,gics_sector,gics_industry\n";
  for (const auto& r : set.records) {
    pairs_csv += r.firm_a + "," + r.firm_b + "," + io::fixed(r.rrs, 6) + "," + io::fixed(r.cavdsr, 6) + "," +
                 std::to_string(gics_binary_rrs(gics, r.firm_a, r.firm_b, GicsLevel::Sector)) + "," +
                 std::to_string(gics_binary_rrs(gics, r.firm_a, r.firm_b, GicsLevel::Industry)) + "\n";
  }
  std::string metrics = "metric,value\n";
  metrics += "pairs," + std::to_string(set.records.size()) + "\n";
  metrics += "excluded_pairs," + std::to_string(set.excluded.size()) + "\n";
  metrics += "rho_pearson," + rho + "\n";
  metrics += "rho_spearman," + rho_s + "\n";
  metrics += "gics_sector_rho," + rho_sector + "\n";
  metrics += "gics_industry_rho," + rho_industry + "\n";

  std::string summary = "# Evaluation\n\n";
  summary += "| metric | value |\n|---|---|\n";
  summary += "| firm pairs | " + std::to_string(set.records.size()) + " |\n";
  summary += "| excluded pairs | " + std::to_string(set.excluded.size()) + " |\n";
  summary += "| rho (Pearson, RRS vs CAVDSR) | " + rho + " |\n";
  summary += "| rho (Spearman) | " + rho_s + " |\n";
  summary += "| GICS sector baseline rho | " + rho_sector + " |\n";
  summary += "| GICS industry baseline rho | " + rho_industry + " |\n";
  for (const auto& [x, y] : set.excluded) summary += "\nExcluded: " + x + "-" + y + " (insufficient return data)";
  if (!set.excluded.empty()) summary += "\n";

  OutputGuard guard;
  const fs::path dir(a.out);
  guard.write(dir / "pairs.csv", pairs_csv);
  guard.write(dir / "metrics.csv", metrics);
  if (!a.retrieval.empty()) {
    std::vector<std::size_t> ks;
    for (const auto& k : list_arg(a.k)) {
      try {
        ks.push_back(static_cast<std::size_t>(std::stoul(k)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "cutoff is not a number: " + k);
      }
    }
    const auto rows = retrieval_metrics(read_ranked_lists(a.retrieval), ks);
    std::string csv = "k,ndcg,precision,recall\n";
    summary += "\n## Retrieval\n\n| k | NDCG | P | R |\n|---|---|---|---|\n";
    for (const auto& r : rows) {
      csv += std::to_string(r.k) + "," + io::fixed(r.ndcg, 6) + "," + io::fixed(r.precision, 6) + "," +
             io::fixed(r.recall, 6) + "\n";
      summary += "| " + std::to_string(r.k) + " | " + io::fixed(r.ndcg, 4) + " | " + io::fixed(r.precision, 4) +
                 " | " + io::fixed(r.recall, 4) + " |\n";
    }
    guard.write(dir / "retrieval.csv", csv);
  }
  guard.write(dir / "summary.md", summary);
  guard.commit();
  out << "evaluated " << set.records.size() << " firm pairs; rho " << rho << "\n";
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string model;
  std::string paragraphs;
  std::string embeddings;
  std::string grid = "0.6:0.9:0.05";
  std::string prices;
  std::string out;
  std::size_t min_overlap = kMinOverlap;
  std::string sections = "1A,7A";
  std::optional<int> year;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const std::vector<double> grid = parse_grid(a.grid);
  const LoadedModel model = load_fingerprinted(a.model);
  const auto paragraphs = load_paragraphs(a.paragraphs, list_arg(a.sections), a.year);
  const EmbeddingIndex index = obtain_index(model, paragraphs, a.embeddings);
  const auto firms = index.firm_ids();
  std::optional<std::map<std::pair<std::string, std::string>, double>> table;
  if (!a.prices.empty()) {
    require_dir(a.prices, "prices");
    table = cavdsr_table(firms, read_return_dir(a.prices), a.min_overlap);
  }
  const auto rows = threshold_sweep(index, firms, grid, table ? &*table : nullptr);
  const std::string csv = sweep_to_csv(rows);
  if (a.out.empty()) {
    out << csv;
    return;
  }
  OutputGuard guard;
  guard.write(a.out, csv);
  guard.commit();
  out << "swept " << rows.size() << " thresholds\n";
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string rrs;
  std::string evidence;
  std::string eval;
  std::string sweep;
  std::string out;
  std::size_t top_pairs = 5;
  std::size_t top_evidence = 2;
};

std::string excerpt(const std::string& text, std::size_t limit = 240) {
  if (text.size() <= limit) return text;
  std::size_t cut = text.rfind(' ', limit);
  if (cut == std::string::npos) cut = limit;
  return text.substr(0, cut) + " ...";
}

void cmd_report(const ReportArgs& a, std::ostream& out) {
  const RrsMatrix matrix = RrsMatrix::from_csv(io::read_file(a.rrs));
  struct Ranked {
    std::string a, b;
    double rrs;
  };
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < matrix.firms.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.firms.size(); ++j) {
      ranked.push_back({matrix.firms[i], matrix.firms[j], matrix.values[i][j]});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) { return x.rrs > y.rrs; });

  std::string md = "# Risk relation report\n\n";
  md += "Firms: " + std::to_string(matrix.firms.size()) + ", firm pairs: " + std::to_string(ranked.size()) + "\n\n";
  md += "## Highest risk relation scores\n\n";
  md += "| rank | firm A | firm B | RRS | MRPs | threshold |\n|---|---|---|---|---|---|\n";
  const std::size_t shown = std::min(a.top_pairs, ranked.size());
  std::vector<nlohmann::json> docs;
  for (std::size_t r = 0; r < shown; ++r) {
    const fs::path file = fs::path(a.evidence) / evidence_file_name(ranked[r].a, ranked[r].b);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(io::read_file(file));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
    }
    md += "| " + std::to_string(r + 1) + " | " + ranked[r].a + " | " + ranked[r].b + " | " +
          io::fixed(ranked[r].rrs, 6) + " | " + std::to_string(doc.value("mrp_count", 0)) + " | " +
          io::fixed(doc.value("threshold", 0.0), 2) + " |\n";
    docs.push_back(std::move(doc));
  }

  md += "\n## Top evidence\n";
  for (std::size_t r = 0; r < docs.size(); ++r) {
    const auto& doc = docs[r];
    md += "\n### " + ranked[r].a + " and " + ranked[r].b + "\n\n";
    md += doc.value("summary", std::string()) + "\n";
    const auto& evidence = doc.at("evidence");
    for (std::size_t k = 0; k < std::min(a.top_evidence, evidence.size()); ++k) {
      const auto& e = evidence[k];
      md += "\n" + std::to_string(k + 1) + ". similarity " + io::fixed(e.at("similarity").get<double>(), 4) + "\n";
      for (const char* side : {"a", "b"}) {
        const auto& p = e.at(side);
        md += "   - `" + p.at("id").get<std::string>() + "`: " + excerpt(p.at("text").get<std::string>()) + "\n";
      }
    }
  }

  if (!a.eval.empty()) {
    const auto rows = io::parse_csv(io::read_file(fs::path(a.eval) / "metrics.csv"));
    md += "\n## Alignment with return co-movement\n\n| metric | value |\n|---|---|\n";
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() == 2) md += "| " + rows[i][0] + " | " + rows[i][1] + " |\n";
    }
  }
  if (!a.sweep.empty()) {
    const auto rows = io::parse_csv(io::read_file(a.sweep));
    md += "\n## Threshold sweep\n\n| threshold | mean RRS | total MRPs | rho |\n|---|---|---|---|\n";
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() == 4) {
        md += "| " + rows[i][0] + " | " + rows[i][1] + " | " + rows[i][2] + " | " + rows[i][3] + " |\n";
      }
    }
  }
  OutputGuard guard;
  guard.write(a.out, md);
  guard.commit();
  out << "wrote report for " << matrix.firms.size() << " firms\n";
}

// ---------------------------------------------------------------- config

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

/// Appends `--key value` for every config entry the command line does not
/// already set, so explicit flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args, CLI::App& app) {
  if (args.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;
  for (const auto& [key, value] : io::parse_key_values(io::read_file(config_path))) {
    const std::string flag = "--" + key;
    if (key == "config" || sub->get_option_no_throw(flag) == nullptr) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown key '" + key + "' for " + args.front() + " in " + config_path);
    }
    if (!has_flag(args, flag)) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk relation scoring from annual-report text", "riskrel"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "Flat key = value file; keys match flag names")->check(CLI::ExistingFile);
  };

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Strip filings and extract section paragraphs");
  c_ingest->add_option("--root", ingest.root, "Directory of <ticker>/<year>.txt filings")->required();
  c_ingest->add_option("--out", ingest.out, "Paragraph records output (JSONL)")->required();
  c_ingest->add_option("--min-tokens", ingest.min_tokens, "Drop paragraphs shorter than this")->capture_default_str();
  c_ingest->add_option("--sections", ingest.sections, "Comma-separated item labels")->capture_default_str();
  add_config(c_ingest);

  PairsArgs pairs;
  auto* c_pairs = app.add_subcommand("pairs", "Build chronological and lexical positive pairs");
  c_pairs->add_option("--in", pairs.in, "Paragraph records (JSONL)")->required();
  c_pairs->add_option("--out", pairs.out, "Output directory")->required();
  c_pairs->add_option("--seed", pairs.seed, "Seed for draws and splits")->required();
  c_pairs->add_option("--view", pairs.view, "chrono, lexical or both")
      ->check(CLI::IsMember({"chrono", "chronological", "lexical", "both"}))
      ->capture_default_str();
  c_pairs->add_option("--train", pairs.train, "Training pairs per view")->capture_default_str();
  c_pairs->add_option("--val", pairs.val, "Validation pairs per view")->capture_default_str();
  c_pairs->add_option("--min-tokens", pairs.min_tokens, "Minimum side length after date removal")
      ->capture_default_str();
  c_pairs->add_option("--min-span", pairs.min_span, "Lexical minimum span m")->capture_default_str();
  c_pairs->add_option("--overlap-cap", pairs.overlap_cap, "Lexical overlap cap")->capture_default_str();
  c_pairs->add_option("--max-pairs-per-paragraph", pairs.max_pairs_per_paragraph, "Lexical draws per paragraph")
      ->capture_default_str();
  add_config(c_pairs);

  TrainArgs train_args;
  auto* c_train = app.add_subcommand("train", "Train the paragraph encoder");
  c_train->add_option("--pairs", train_args.pairs, "Directory written by `pairs`")->required();
  c_train->add_option("--out", train_args.out, "Model output file")->required();
  c_train->add_option("--report", train_args.report, "Training report (JSONL)");
  c_train->add_option("--view", train_args.view, "chrono, lexical or both")
      ->check(CLI::IsMember({"chrono", "chronological", "lexical", "both"}))
      ->capture_default_str();
  std::map<std::string, std::string> train_values;
  for (const auto& key : kTrainKeys) {
    auto* opt = c_train->add_option("--" + key, train_values[key], "Training setting");
    if (key == "seed") opt->required();
  }
  add_config(c_train);

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed", "Encode paragraphs with a trained model");
  c_embed->add_option("--model", embed.model, "Model file")->required();
  c_embed->add_option("--in", embed.in, "Paragraph records (JSONL)")->required();
  c_embed->add_option("--out", embed.out, "Embedding file")->required();
  add_config(c_embed);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Mutual risk paragraphs and risk relation scores");
  c_score->add_option("--model", score.model, "Model file")->required();
  c_score->add_option("--paragraphs", score.paragraphs, "Paragraph records (JSONL)")->required();
  c_score->add_option("--embeddings", score.embeddings, "Precomputed embeddings from `embed`");
  c_score->add_option("--threshold", score.threshold, "Similarity threshold")->capture_default_str();
  c_score->add_option("--out-matrix", score.out_matrix, "RRS matrix (CSV)")->required();
  c_score->add_option("--out-evidence", score.out_evidence, "Directory for per-pair evidence")->required();
  c_score->add_option("--sections", score.sections, "Sections to score")->capture_default_str();
  c_score->add_option("--year", score.year, "Restrict to one fiscal year");
  add_config(c_score);

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Correlate RRS with return co-movement");
  c_eval->add_option("--rrs", eval.rrs, "RRS matrix (CSV)")->required();
  c_eval->add_option("--prices", eval.prices, "Directory of <ticker>.csv price files")->required();
  c_eval->add_option("--gics", eval.gics, "ticker,sector,industry mapping")->required();
  c_eval->add_option("--out", eval.out, "Output directory")->required();
  c_eval->add_option("--min-overlap", eval.min_overlap, "Minimum common trading days")->capture_default_str();
  c_eval->add_option("--retrieval", eval.retrieval, "Ranked lists (JSONL) for NDCG/P/R");
  c_eval->add_option("--k", eval.k, "Retrieval cutoffs")->capture_default_str();
  add_config(c_eval);

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Scores over a grid of thresholds");
  c_sweep->add_option("--model", sweep.model, "Model file")->required();
  c_sweep->add_option("--paragraphs", sweep.paragraphs, "Paragraph records (JSONL)")->required();
  c_sweep->add_option("--embeddings", sweep.embeddings, "Precomputed embeddings from `embed`");
  c_sweep->add_option("--grid", sweep.grid, "lo:hi:step")->capture_default_str();
  c_sweep->add_option("--prices", sweep.prices, "Price directory; adds rho per threshold");
  c_sweep->add_option("--min-overlap", sweep.min_overlap, "Minimum common trading days")->capture_default_str();
  c_sweep->add_option("--out", sweep.out, "Sweep table (CSV); stdout when omitted");
  c_sweep->add_option("--sections", sweep.sections, "Sections to score")->capture_default_str();
  c_sweep->add_option("--year", sweep.year, "Restrict to one fiscal year");
  add_config(c_sweep);

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Collate artifacts into one markdown report");
  c_report->add_option("--rrs", report.rrs, "RRS matrix (CSV)")->required();
  c_report->add_option("--evidence", report.evidence, "Evidence directory from `score`")->required();
  c_report->add_option("--eval", report.eval, "Output directory of `evaluate`");
  c_report->add_option("--sweep", report.sweep, "Sweep table (CSV)");
  c_report->add_option("--out", report.out, "Markdown output")->required();
  c_report->add_option("--top-pairs", report.top_pairs, "Firm pairs listed")->capture_default_str();
  c_report->add_option("--top-evidence", report.top_evidence, "Evidence pairs per firm pair")->capture_default_str();
  add_config(c_report);

  auto fail = [&](std::string_view code, const std::string& message) {
    std::string line = message;
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "riskrel: error[" << code << "]: " << line << "\n";
  };

  try {
    const std::vector<std::string> args = merge_config(raw_args, app);
    std::vector<const char*> argv{"riskrel"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      fail("InvalidArgument", e.what());
      return 2;
    }

    if (c_ingest->parsed()) {
      cmd_ingest(ingest, out);
    } else if (c_pairs->parsed()) {
      cmd_pairs(pairs, out);
    } else if (c_train->parsed()) {
      for (const auto& [key, value] : train_values) {
        if (c_train->count("--" + key) > 0) train_args.overrides[key] = value;
      }
      cmd_train(train_args, out);
    } else if (c_embed->parsed()) {
      cmd_embed(embed, out);
    } else if (c_score->parsed()) {
      cmd_score(score, out);
    } else if (c_eval->parsed()) {
      cmd_evaluate(eval, out);
    } else if (c_sweep->parsed()) {
      cmd_sweep(sweep, out);
    } else if (c_report->parsed()) {
      cmd_report(report, out);
    }
    return 0;
  } catch (const Error& e) {
    fail(to_string(e.code()), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    fail("IoError", e.what());
    return 1;
  }
}

}  // namespace riskrel::cli
