// commu: encode/decode, corpus preprocessing, generation, evaluation and
// track combination for metadata-conditioned note sequences.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "commu/combiner.hpp"
#include "commu/generator.hpp"
#include "commu/metrics.hpp"
#include "commu/midi_io.hpp"
#include "commu/preprocess.hpp"
#include "commu/sample_json.hpp"
#include "commu/token_codec.hpp"
#include "commu/token_io.hpp"
#include "commu/version.hpp"
#include "commu/vocabulary.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace commu;

namespace {

// Signals a failure already reported on stderr; maps to exit code 1.
struct CommandFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON config file support: top-level keys configure global options,
// per-subcommand objects configure that subcommand. Flags always win.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    input >> j;
    std::vector<CLI::ConfigItem> items;
    if (!j.is_object()) {
      throw CLI::FileError("config root must be a JSON object");
    }
    auto add = [&items](std::vector<std::string> parents, const std::string& name,
                        const json& value) {
      CLI::ConfigItem item;
      item.parents = std::move(parents);
      item.name = name;
      if (value.is_array()) {
        for (const json& v : value) {
          item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
      } else {
        item.inputs.push_back(value.is_string() ? value.get<std::string>()
                                                : value.dump());
      }
      items.push_back(std::move(item));
    };
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [name, sub] : value.items()) add({key}, name, sub);
      } else {
        add({}, key, value);
      }
    }
    return items;
  }
};

std::vector<Sample> load_samples_any(const fs::path& path) {
  std::vector<Sample> samples;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      for (Sample& s : load_samples_file(f)) samples.push_back(std::move(s));
    }
    return samples;
  }
  const auto ext = path.extension();
  if (ext == ".tok" || ext == ".tokb") {
    for (const TokenSequence& t : load_token_file(path)) {
      samples.push_back(decode(t));
    }
    return samples;
  }
  return load_samples_file(path);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Command options
// ---------------------------------------------------------------------------

struct EncodeOpts {
  std::string in, out;
  std::string format = "text";
};

struct DecodeOpts {
  std::string in, out;
};

struct ValidateOpts {
  std::string in;
};

struct AugmentOpts {
  std::string in, out_dir;
  std::string tokens_out;
};

struct IngestOpts {
  std::string manifest;
};

struct TrainOpts {
  std::vector<std::string> in;
  std::string out;
  int order = 4;
  double alpha = 0.1;
};

struct GenerateOpts {
  std::string model, meta, chords, out;
  std::string format = "text";
  int top_k = 32;
  double temperature = 0.95;
  std::uint64_t seed = 0;
  int num_samples = 1;
  int max_tokens = 65536;
};

struct EvaluateOpts {
  std::string in, report, csv;
  std::string metric = "all";
  int group_size = 10;
};

struct StatsOpts {
  std::string in, csv, report;
  std::string group_by = "track_role";
  std::string cooccur;
  std::string cooccur_csv;
};

struct CombineOpts {
  std::vector<std::string> inputs;
  std::string out, manifest;
  int division = kDefaultDivision;
  bool force = false;
};

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

void run_encode(const EncodeOpts& o) {
  const std::vector<Sample> samples = load_samples_file(o.in);
  std::vector<TokenSequence> sequences;
  sequences.reserve(samples.size());
  for (const Sample& s : samples) sequences.push_back(encode(s));
  save_token_file(o.out, sequences, o.format == "binary");
  std::cout << "encoded " << sequences.size() << " sample(s) -> " << o.out
            << "\n";
}

void run_decode(const DecodeOpts& o) {
  const auto sequences = load_token_file(o.in);
  if (sequences.empty()) throw std::runtime_error(o.in + ": no token lines");
  json out;
  if (sequences.size() == 1) {
    out = sample_to_json(decode(sequences[0]));
  } else {
    out = json::array();
    for (const auto& t : sequences) out.push_back(sample_to_json(decode(t)));
  }
  write_file_atomic(o.out, out.dump(2) + "\n");
  std::cout << "decoded " << sequences.size() << " sample(s) -> " << o.out
            << "\n";
}

void run_validate(const ValidateOpts& o) {
  const std::vector<Sample> samples = load_samples_file(o.in);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const std::string& v : validate_sample(samples[i])) {
      std::cout << o.in << " [" << i << "] " << v << "\n";
      ++violations;
    }
  }
  if (violations > 0) {
    throw CommandFailed(o.in + ": " + std::to_string(violations) +
                        " violation(s)");
  }
  std::cout << o.in << ": ok (" << samples.size() << " sample(s))\n";
}

void run_augment(const AugmentOpts& o) {
  const Sample base = load_sample_file(o.in);
  const std::vector<Sample> variants = augment(base);
  fs::create_directories(o.out_dir);
  const std::string stem = fs::path(o.in).stem().string();
  std::vector<TokenSequence> sequences;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    char suffix[8];
    std::snprintf(suffix, sizeof(suffix), "_v%02zu", i);
    save_sample_file(fs::path(o.out_dir) / (stem + suffix + ".json"),
                     variants[i]);
    sequences.push_back(encode(variants[i]));
  }
  if (!o.tokens_out.empty()) save_token_file(o.tokens_out, sequences);
  std::cout << "wrote " << variants.size() << " variants -> " << o.out_dir
            << "\n";
}

void run_ingest(const IngestOpts& o) {
  const PipelineManifest manifest = load_manifest(o.manifest);
  const IngestResult result = run_pipeline(manifest);
  for (const std::string& w : result.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << "ingested " << result.inputs.size() << " file(s), wrote "
            << result.samples_written << " sample(s) -> "
            << manifest.output_dir.string() << "\n";
  if (result.samples_written == 0) throw CommandFailed("no samples produced");
}

void run_train(const TrainOpts& o) {
  std::vector<TokenSequence> corpus;
  for (const std::string& path : o.in) {
    for (TokenSequence& t : load_token_file(path)) {
      const auto report = validate_grammar(t);
      if (!report.empty()) {
        throw std::runtime_error(path + ": " + report[0]);
      }
      corpus.push_back(std::move(t));
    }
  }
  const CountModel model = train_count_model(corpus, o.order, o.alpha);
  model.save(o.out);
  double total_nll = 0;
  for (const auto& seq : corpus) total_nll += nll(model, seq);
  std::cout << "trained order-" << o.order << " model on " << corpus.size()
            << " sequence(s), train nll "
            << format_double(total_nll / static_cast<double>(corpus.size()))
            << " -> " << o.out << "\n";
}

void run_generate(const GenerateOpts& o) {
  const CountModel model = CountModel::load(o.model);

  const auto meta_bytes = read_file_bytes(o.meta);
  const json meta_json = json::parse(meta_bytes.begin(), meta_bytes.end());
  const MetadataSet metadata =
      sample_from_json(meta_json.contains("metadata")
                           ? meta_json
                           : json{{"metadata", meta_json}})
          .metadata;

  const auto chord_bytes = read_file_bytes(o.chords);
  const json chords_json = json::parse(chord_bytes.begin(), chord_bytes.end());
  const Sample chord_holder = sample_from_json(
      json{{"metadata", {{"num_measures", metadata.num_measures}}},
           {"chords", chords_json.contains("chords") ? chords_json["chords"]
                                                     : chords_json}});

  SamplerConfig cfg;
  cfg.top_k = o.top_k;
  cfg.temperature = o.temperature;
  cfg.seed = o.seed;
  cfg.max_tokens = o.max_tokens;

  const std::vector<MetadataSet> metas = {metadata};
  const auto groups =
      batch_generate(model, metas, chord_holder.chords, cfg, o.num_samples);

  std::vector<TokenSequence> sequences;
  std::size_t failures = 0;
  for (const GenerateResult& r : groups[0]) {
    if (r.ok) {
      sequences.push_back(r.tokens);
    } else {
      ++failures;
      std::cerr << "generation failed: " << r.error << "\n";
    }
  }
  save_token_file(o.out, sequences, o.format == "binary");
  std::cout << "generated " << sequences.size() << "/" << o.num_samples
            << " sequence(s) (seed " << o.seed << ") -> " << o.out << "\n";
  if (failures > 0) {
    throw CommandFailed(std::to_string(failures) + " generation(s) failed");
  }
}

void run_evaluate(const EvaluateOpts& o) {
  const std::vector<Sample> samples = load_samples_any(o.in);
  if (samples.empty()) throw std::runtime_error(o.in + ": no samples");
  const bool want_cp = o.metric == "all" || o.metric == "cp";
  const bool want_cv = o.metric == "all" || o.metric == "cv";
  const bool want_ch = o.metric == "all" || o.metric == "ch";
  const bool want_div = o.metric == "all" || o.metric == "diversity";

  json report;
  json per_sample = json::array();
  double cp_sum = 0, cv_sum = 0, ch_sum = 0;
  std::size_t cp_n = 0, cv_n = 0, ch_n = 0;
  auto try_metric = [](const Sample& s, double (*fn)(const Sample&),
                       double& sum, std::size_t& n) -> json {
    try {
      const double v = fn(s);
      sum += v;
      ++n;
      return v;
    } catch (const std::exception&) {
      return nullptr;  // prerequisite metadata missing
    }
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    json row{{"index", i}};
    if (want_cp) {
      row["cp"] = try_metric(samples[i], controllability_pitch, cp_sum, cp_n);
    }
    if (want_cv) {
      row["cv"] =
          try_metric(samples[i], controllability_velocity, cv_sum, cv_n);
    }
    if (want_ch) {
      row["ch"] =
          try_metric(samples[i], controllability_harmony, ch_sum, ch_n);
    }
    per_sample.push_back(std::move(row));
  }

  json per_group = json::array();
  double div_sum = 0;
  std::size_t div_n = 0;
  if (want_div) {
    if (o.group_size < 2) {
      throw std::runtime_error("--group-size must be >= 2 for diversity");
    }
    for (std::size_t start = 0; start + 1 < samples.size();
         start += static_cast<std::size_t>(o.group_size)) {
      const std::size_t len = std::min<std::size_t>(
          static_cast<std::size_t>(o.group_size), samples.size() - start);
      if (len < 2) break;
      const double d =
          diversity(std::span<const Sample>(samples.data() + start, len));
      per_group.push_back({{"group", div_n}, {"n", len}, {"diversity", d}});
      div_sum += d;
      ++div_n;
    }
  }

  // Summary mirrors the CP / CV / CH / D report columns.
  json summary;
  summary["cp"] = cp_n ? json(cp_sum / double(cp_n)) : json(nullptr);
  summary["cv"] = cv_n ? json(cv_sum / double(cv_n)) : json(nullptr);
  summary["ch"] = ch_n ? json(ch_sum / double(ch_n)) : json(nullptr);
  summary["diversity"] = div_n ? json(div_sum / double(div_n)) : json(nullptr);
  report["samples"] = per_sample;
  report["groups"] = per_group;
  report["summary"] = summary;
  report["num_samples"] = samples.size();
  write_file_atomic(o.report, report.dump(2) + "\n");

  if (!o.csv.empty()) {
    std::string csv = "kind,id,cp,cv,ch,diversity\n";
    auto cell = [](const json& row, const char* key) -> std::string {
      if (!row.contains(key) || row[key].is_null()) return "";
      return format_double(row[key].get<double>());
    };
    for (const json& row : per_sample) {
      csv += "sample," + std::to_string(row["index"].get<std::size_t>()) + "," +
             cell(row, "cp") + "," + cell(row, "cv") + "," + cell(row, "ch") +
             ",\n";
    }
    for (const json& row : per_group) {
      csv += "group," + std::to_string(row["group"].get<std::size_t>()) +
             ",,,," + format_double(row["diversity"].get<double>()) + "\n";
    }
    csv += "summary,," + cell(summary, "cp") + "," + cell(summary, "cv") + "," +
           cell(summary, "ch") + "," + cell(summary, "diversity") + "\n";
    write_file_atomic(o.csv, csv);
  }
  std::cout << "evaluated " << samples.size() << " sample(s) -> " << o.report
            << "\n";
}

void run_stats(const StatsOpts& o) {
  const std::vector<Sample> samples = load_samples_any(o.in);
  if (samples.empty()) throw std::runtime_error(o.in + ": no samples");
  const auto rows = corpus_stats(samples, o.group_by);

  std::string csv = "group,n,density_mean,density_std,length_mean,length_std\n";
  json jrows = json::array();
  for (const GroupStats& g : rows) {
    csv += csv_escape(g.group) + "," + std::to_string(g.n) + "," +
           format_double(g.density_mean) + "," + format_double(g.density_std) +
           "," + format_double(g.length_mean) + "," +
           format_double(g.length_std) + "\n";
    jrows.push_back({{"group", g.group},
                     {"n", g.n},
                     {"density_mean", g.density_mean},
                     {"density_std", g.density_std},
                     {"length_mean", g.length_mean},
                     {"length_std", g.length_std},
                     {"density_hist", g.density_hist},
                     {"length_hist", g.length_hist}});
  }
  if (!o.csv.empty()) write_file_atomic(o.csv, csv);

  json report{{"group_by", o.group_by}, {"groups", jrows}};
  if (!o.cooccur.empty()) {
    const auto comma = o.cooccur.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("--cooccur expects FIELD_A,FIELD_B");
    }
    const std::string fa = o.cooccur.substr(0, comma);
    const std::string fb = o.cooccur.substr(comma + 1);
    const auto counts = cooccurrence(samples, fa, fb);
    json jc = json::array();
    std::string co_csv = fa + "," + fb + ",count\n";
    for (const auto& [key, count] : counts) {
      jc.push_back({{fa, key.first}, {fb, key.second}, {"count", count}});
      co_csv += csv_escape(key.first) + "," + csv_escape(key.second) + "," +
                std::to_string(count) + "\n";
    }
    report["cooccurrence"] = jc;
    if (!o.cooccur_csv.empty()) write_file_atomic(o.cooccur_csv, co_csv);
  }
  if (!o.report.empty()) write_file_atomic(o.report, report.dump(2) + "\n");
  if (o.csv.empty() && o.report.empty()) std::cout << csv;
  std::cout << "stats over " << samples.size() << " sample(s), " << rows.size()
            << " group(s)\n";
}

void run_combine(const CombineOpts& o) {
  std::vector<Sample> samples;
  for (const std::string& path : o.inputs) {
    samples.push_back(load_sample_file(path));
  }
  if (samples.size() >= 2) {
    const auto report = check_compatibility(samples);
    for (const std::string& r : report) {
      std::cerr << "incompatible: " << r << "\n";
    }
    if (!report.empty() && !o.force) {
      throw CommandFailed("inputs are incompatible (use --force to override)");
    }
  }
  const CombineResult result = combine(samples, o.division, true);
  write_file_atomic(o.out, result.midi_bytes);
  if (!o.manifest.empty()) write_file_atomic(o.manifest, result.manifest_json);
  std::cout << "combined " << samples.size() << " track(s) -> " << o.out
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combinatorial music generation toolkit"};
  app.require_subcommand(0, 1);
  app.set_version_flag(
      "--version",
      std::string("commu ") + kToolkitVersion + " (vocabulary v" +
          std::to_string(kVocabularyVersion) + ", " +
          std::to_string(kVocabularySize) + " tokens)");
  app.set_config("--config")->check(CLI::ExistingFile);
  app.config_formatter(std::make_shared<JsonConfig>());

  EncodeOpts encode_opts;
  auto* cmd_encode =
      app.add_subcommand("encode", "sample JSON -> token sequence file");
  cmd_encode->add_option("--in", encode_opts.in, "sample JSON (object or array)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_encode->add_option("--out", encode_opts.out, "token file")->required();
  cmd_encode->add_option("--format", encode_opts.format)
      ->check(CLI::IsMember({"text", "binary"}));

  DecodeOpts decode_opts;
  auto* cmd_decode =
      app.add_subcommand("decode", "token sequence file -> sample JSON");
  cmd_decode->add_option("--in", decode_opts.in, "token file (.tok/.tokb)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_decode->add_option("--out", decode_opts.out, "sample JSON")->required();

  ValidateOpts validate_opts;
  auto* cmd_validate = app.add_subcommand("validate", "check sample invariants");
  cmd_validate->add_option("--in", validate_opts.in)
      ->required()
      ->check(CLI::ExistingFile);

  AugmentOpts augment_opts;
  auto* cmd_augment =
      app.add_subcommand("augment", "bpm/key augmentation (60 variants)");
  cmd_augment->add_option("--in", augment_opts.in)
      ->required()
      ->check(CLI::ExistingFile);
  cmd_augment->add_option("--out-dir", augment_opts.out_dir)->required();
  cmd_augment->add_option("--tokens-out", augment_opts.tokens_out,
                          "also write one token text corpus");

  IngestOpts ingest_opts;
  auto* cmd_ingest = app.add_subcommand(
      "ingest", "slice/chunk/parse external MIDI into samples");
  cmd_ingest
      ->add_option("--manifest", ingest_opts.manifest, "pipeline manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);

  TrainOpts train_opts;
  auto* cmd_train =
      app.add_subcommand("train", "fit the count-based sequence model");
  cmd_train->add_option("--in", train_opts.in, "token corpus file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--out", train_opts.out, "model file (.cmkm)")
      ->required();
  cmd_train->add_option("--order", train_opts.order)->check(CLI::Range(1, 16));
  cmd_train->add_option("--alpha", train_opts.alpha)
      ->check(CLI::NonNegativeNumber);

  GenerateOpts generate_opts;
  auto* cmd_generate = app.add_subcommand(
      "generate", "chord-conditioned sampling from a trained model");
  cmd_generate->add_option("--model", generate_opts.model)
      ->required()
      ->check(CLI::ExistingFile);
  cmd_generate->add_option("--meta", generate_opts.meta, "metadata JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_generate
      ->add_option("--chords", generate_opts.chords, "chord progression JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_generate->add_option("--out", generate_opts.out)->required();
  cmd_generate->add_option("--top-k", generate_opts.top_k)
      ->check(CLI::PositiveNumber);
  cmd_generate->add_option("--temperature", generate_opts.temperature)
      ->check(CLI::PositiveNumber);
  cmd_generate->add_option("--seed", generate_opts.seed);
  cmd_generate->add_option("--num-samples", generate_opts.num_samples)
      ->check(CLI::PositiveNumber);
  cmd_generate->add_option("--max-tokens", generate_opts.max_tokens)
      ->check(CLI::PositiveNumber);
  cmd_generate->add_option("--format", generate_opts.format)
      ->check(CLI::IsMember({"text", "binary"}));

  EvaluateOpts evaluate_opts;
  auto* cmd_evaluate =
      app.add_subcommand("evaluate", "controllability and diversity of samples");
  cmd_evaluate
      ->add_option("--in", evaluate_opts.in,
                   "samples: .json, .tok/.tokb or directory")
      ->required();
  cmd_evaluate->add_option("--report", evaluate_opts.report, "JSON report")
      ->required();
  cmd_evaluate->add_option("--csv", evaluate_opts.csv, "CSV report");
  cmd_evaluate->add_option("--metric", evaluate_opts.metric)
      ->check(CLI::IsMember({"all", "cp", "cv", "ch", "diversity"}));
  cmd_evaluate->add_option("--group-size", evaluate_opts.group_size,
                           "samples per diversity group");

  StatsOpts stats_opts;
  auto* cmd_stats =
      app.add_subcommand("stats", "corpus statistics grouped by metadata");
  cmd_stats->add_option("--in", stats_opts.in)->required();
  cmd_stats->add_option("--group-by", stats_opts.group_by)
      ->check(CLI::IsMember(std::vector<std::string>(kMetadataFields.begin(),
                                                     kMetadataFields.end())));
  cmd_stats->add_option("--csv", stats_opts.csv);
  cmd_stats->add_option("--report", stats_opts.report, "JSON report");
  cmd_stats->add_option("--cooccur", stats_opts.cooccur,
                        "FIELD_A,FIELD_B co-occurrence counts");
  cmd_stats->add_option("--cooccur-csv", stats_opts.cooccur_csv);

  CombineOpts combine_opts;
  auto* cmd_combine = app.add_subcommand(
      "combine", "merge role-tagged samples into one multi-track MIDI");
  cmd_combine->add_option("--inputs", combine_opts.inputs, "sample JSON files")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_combine->add_option("--out", combine_opts.out, "output .mid")->required();
  cmd_combine->add_option("--manifest", combine_opts.manifest,
                          "per-track manifest JSON");
  cmd_combine->add_option("--division", combine_opts.division)
      ->check(CLI::Range(32, 32767));
  cmd_combine->add_flag("--force", combine_opts.force,
                        "combine despite incompatibilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_encode->parsed()) {
      run_encode(encode_opts);
    } else if (cmd_decode->parsed()) {
      run_decode(decode_opts);
    } else if (cmd_validate->parsed()) {
      run_validate(validate_opts);
    } else if (cmd_augment->parsed()) {
      run_augment(augment_opts);
    } else if (cmd_ingest->parsed()) {
      run_ingest(ingest_opts);
    } else if (cmd_train->parsed()) {
      run_train(train_opts);
    } else if (cmd_generate->parsed()) {
      run_generate(generate_opts);
    } else if (cmd_evaluate->parsed()) {
      run_evaluate(evaluate_opts);
    } else if (cmd_stats->parsed()) {
      run_stats(stats_opts);
    } else if (cmd_combine->parsed()) {
      run_combine(combine_opts);
    } else {
      std::cout << app.help();
    }
  } catch (const CommandFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
