// Copyright 2026 The Abacus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// abacus: dataset synthesis, probing, perturbation, and evaluation driver.
// Every artifact-producing subcommand writes a .manifest.json sidecar with
// the effective config and input/output digests, so runs can be audited and
// reproduced byte for byte.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abacus/arith_gen.hpp"
#include "abacus/client.hpp"
#include "abacus/dataset_io.hpp"
#include "abacus/decode.hpp"
#include "abacus/errors.hpp"
#include "abacus/manifest.hpp"
#include "abacus/perturb.hpp"
#include "abacus/probes.hpp"
#include "abacus/scoring.hpp"
#include "abacus/version.hpp"

namespace {

using abacus::Error;
using FailClass = abacus::Error::FailClass;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitShortfall = 6;

int exit_code_for(FailClass c) {
  switch (c) {
    case FailClass::usage: return 2;
    case FailClass::data: return 3;
    case FailClass::io: return 4;
    case FailClass::endpoint: return 5;
    case FailClass::internal: return 7;
  }
  return 7;
}

std::string join_argv(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

abacus::RunManifest start_manifest(const std::string& command) {
  abacus::RunManifest manifest;
  manifest.command = command;
  manifest.tool_version = std::string(abacus::kVersion);
  manifest.timestamp = abacus::manifest_timestamp();
  return manifest;
}

abacus::AnswerStyle style_from_name(const std::string& name) {
  if (name == "sentence") return abacus::AnswerStyle::sentence;
  if (name == "hash") return abacus::AnswerStyle::hash;
  if (name == "choice") return abacus::AnswerStyle::choice;
  throw abacus::ConfigError("unknown answer style: " + name +
                            " (expected sentence, hash, or choice)");
}

// ---------------------------------------------------------------------------
// gen-arith

struct GenArithOpts {
  std::string out;
  abacus::GeneratorConfig cfg;
  bool allow_negative_sub = false;
  int jobs = 1;
};

int run_gen_arith(const GenArithOpts& opts, const std::string& command) {
  Stopwatch watch;
  abacus::GeneratorConfig cfg = opts.cfg;
  cfg.subtraction_nonnegative = !opts.allow_negative_sub;

  abacus::JsonlFileSink sink(opts.out);
  abacus::DatasetManifest dataset = abacus::build_dataset(cfg, sink, opts.jobs);
  sink.close();

  ordered_json config;
  config["seed"] = cfg.seed;
  config["count"] = cfg.total_count;
  config["max_digits"] = cfg.max_digits;
  config["mix"] = {{"add", cfg.mix.add},           {"sub", cfg.mix.sub},
                   {"mul", cfg.mix.mul},           {"div", cfg.mix.div},
                   {"fraction", cfg.mix.fraction}, {"percent", cfg.mix.percent}};
  config["exact_division_probability"] = cfg.exact_division_probability;
  config["fraction_component_max_digits"] = cfg.fraction_component_max_digits;
  config["subtraction_nonnegative"] = cfg.subtraction_nonnegative;
  config["jobs"] = opts.jobs;
  ordered_json counts;
  for (std::size_t i = 0; i < abacus::kCategories.size(); ++i)
    counts[std::string(abacus::category_name(abacus::kCategories[i]))] = dataset.counts[i];
  config["category_counts"] = std::move(counts);
  config["stream_digest"] = dataset.digest;

  abacus::RunManifest manifest = start_manifest(command);
  manifest.config_json = config.dump();
  abacus::add_file_digest(manifest.outputs, opts.out);
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);

  std::cout << "wrote " << dataset.total << " examples to " << opts.out << " (sha256 "
            << dataset.digest << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split

struct SplitOpts {
  std::string in;
  std::string train_out;
  std::string validation_out;
  std::size_t n = 512;
  std::uint64_t seed = 0;
};

int run_split(const SplitOpts& opts, const std::string& command) {
  Stopwatch watch;
  abacus::SplitCounts counts =
      abacus::split_lines(opts.in, opts.train_out, opts.validation_out, opts.n, opts.seed);

  ordered_json config;
  config["n"] = opts.n;
  config["seed"] = opts.seed;
  abacus::RunManifest manifest = start_manifest(command);
  manifest.config_json = config.dump();
  abacus::add_file_digest(manifest.inputs, opts.in);
  abacus::add_file_digest(manifest.outputs, opts.train_out);
  abacus::add_file_digest(manifest.outputs, opts.validation_out);
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.train_out), manifest);

  std::cout << "train " << counts.train << " -> " << opts.train_out << "\nvalidation "
            << counts.validation << " -> " << opts.validation_out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// probes

struct ProbesOpts {
  std::string in;
  std::string out;
  std::string results_out;
  bool run = false;
  std::string model = "default";
  std::string cache_path;
  int jobs = 1;
};

int run_probes(const ProbesOpts& opts, const std::string& command) {
  Stopwatch watch;
  auto records = abacus::read_gsm_records(opts.in);
  std::vector<abacus::ArithProbe> probes;
  std::size_t skipped = 0;
  for (const auto& record : records) {
    auto built = abacus::build_probes(record);
    skipped += record.annotations.size() - built.size();
    for (auto& probe : built) probes.push_back(std::move(probe));
  }
  abacus::write_probes(opts.out, probes);
  std::cout << "built " << probes.size() << " probes from " << records.size() << " records";
  if (skipped > 0) std::cout << " (" << skipped << " annotations without \"=\" skipped)";
  std::cout << "\n";

  ordered_json config;
  config["run"] = opts.run;
  config["jobs"] = opts.jobs;

  abacus::RunManifest manifest = start_manifest(command);
  abacus::add_file_digest(manifest.inputs, opts.in);
  abacus::add_file_digest(manifest.outputs, opts.out);

  if (opts.run) {
    config["model"] = opts.model;
    std::unique_ptr<abacus::GenerationCache> cache;
    if (!opts.cache_path.empty())
      cache = std::make_unique<abacus::GenerationCache>(opts.cache_path);
    abacus::InferenceClient client(abacus::EndpointConfig::from_env(), cache.get());

    std::vector<abacus::InferenceRequest> requests;
    requests.reserve(probes.size());
    for (const auto& probe : probes) {
      abacus::DecodeParams params;
      params.mode = abacus::DecodeParams::Mode::greedy;
      params.num_samples = 1;
      params.max_new_tokens = probe.max_new_tokens;
      params.trials = 1;
      requests.push_back({opts.model, probe.prompt, params, 0});
    }
    auto generations = client.run_batch(requests, opts.jobs);

    std::vector<abacus::ProbeResult> results;
    results.reserve(probes.size());
    std::vector<std::string> lines;
    lines.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      results.push_back(abacus::score_probe(probes[i], generations[i].generations.at(0)));
      const auto& r = results.back();
      ordered_json j;
      j["source_id"] = probes[i].source_id;
      j["annotation_index"] = probes[i].annotation_index;
      j["expected"] = abacus::canonical_string(probes[i].expected);
      j["generation"] = r.generation;
      if (r.extracted)
        j["extracted"] = abacus::canonical_string(*r.extracted);
      else
        j["extracted"] = nullptr;
      j["correct"] = r.correct;
      lines.push_back(j.dump());
    }
    std::string results_out =
        opts.results_out.empty() ? opts.out + ".results.jsonl" : opts.results_out;
    abacus::write_lines(results_out, lines);
    abacus::add_file_digest(manifest.outputs, results_out);
    std::printf("arithmetic accuracy %.4f over %zu probes -> %s\n",
                abacus::arithmetic_accuracy(results), results.size(), results_out.c_str());
  }

  manifest.config_json = config.dump();
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string in;
  std::string format = "gsm8k";
  std::string out;
  std::string prompt_file;
  std::size_t num_exemplars = 4;
  std::string style;  // empty: sentence, or choice for aqua
  std::string mode = "sc";
  int n = 8;
  double temp = 0.6;
  double top_p = 0.9;
  int max_new = 256;
  int trials = 3;
  bool n_given = false;
  std::string model = "default";
  std::string dataset_name;
  std::string cache_path;
  std::optional<double> baseline;
  int jobs = 1;
};

int run_eval(const EvalOpts& opts, const std::string& command) {
  Stopwatch watch;
  abacus::EvalFormat format = abacus::eval_format_from_name(opts.format);
  auto items = abacus::load_eval_items(opts.in, format);
  if (items.empty()) throw abacus::EmptyInputError("no questions in " + opts.in);

  abacus::DecodeParams params;
  if (opts.mode == "greedy") {
    params.mode = abacus::DecodeParams::Mode::greedy;
    params.num_samples = opts.n_given ? opts.n : 1;
  } else if (opts.mode == "sc") {
    params.mode = abacus::DecodeParams::Mode::sample;
    params.num_samples = opts.n;
  } else {
    throw abacus::ConfigError("unknown mode: " + opts.mode + " (expected greedy or sc)");
  }
  params.temperature = opts.temp;
  params.top_p = opts.top_p;
  params.max_new_tokens = opts.max_new;
  params.trials = opts.trials;
  params.validate();

  abacus::PromptSpec spec;
  spec.exemplars = abacus::load_exemplars(opts.prompt_file);
  spec.num_exemplars = opts.num_exemplars;
  std::string style = opts.style;
  if (style.empty()) style = format == abacus::EvalFormat::aqua ? "choice" : "sentence";
  spec.answer_style = style_from_name(style);

  std::vector<std::string> prompts;
  std::vector<abacus::FinalAnswer> golds;
  prompts.reserve(items.size());
  golds.reserve(items.size());
  for (const auto& item : items) {
    prompts.push_back(abacus::build_fewshot_prompt(spec, item.question));
    golds.push_back(item.gold);
  }

  std::unique_ptr<abacus::GenerationCache> cache;
  if (!opts.cache_path.empty()) cache = std::make_unique<abacus::GenerationCache>(opts.cache_path);
  abacus::InferenceClient client(abacus::EndpointConfig::from_env(), cache.get());

  std::vector<abacus::InferenceRequest> requests;
  requests.reserve(items.size() * static_cast<std::size_t>(params.trials));
  for (int trial = 0; trial < params.trials; ++trial)
    for (const auto& prompt : prompts) requests.push_back({opts.model, prompt, params, trial});
  auto records = client.run_batch(requests, opts.jobs);

  std::vector<std::vector<std::vector<std::string>>> generations(
      static_cast<std::size_t>(params.trials));
  for (int trial = 0; trial < params.trials; ++trial) {
    auto& per_question = generations[static_cast<std::size_t>(trial)];
    per_question.reserve(items.size());
    for (std::size_t q = 0; q < items.size(); ++q)
      per_question.push_back(
          records[static_cast<std::size_t>(trial) * items.size() + q].generations);
  }

  abacus::ScoreOptions score_options;
  score_options.dataset_name = opts.dataset_name.empty() ? opts.in : opts.dataset_name;
  score_options.extract.style = spec.answer_style;
  score_options.baseline = opts.baseline;
  abacus::EvalReport report = abacus::score_dataset(generations, golds, params, score_options);
  abacus::write_eval_report(opts.out, report);

  ordered_json config;
  config["format"] = opts.format;
  config["mode"] = opts.mode;
  config["n"] = params.num_samples;
  config["temp"] = params.temperature;
  config["top_p"] = params.top_p;
  config["max_new"] = params.max_new_tokens;
  config["trials"] = params.trials;
  config["num_exemplars"] = opts.num_exemplars;
  config["style"] = style;
  config["model"] = opts.model;
  config["jobs"] = opts.jobs;
  if (opts.baseline) config["baseline"] = *opts.baseline;

  abacus::RunManifest manifest = start_manifest(command);
  manifest.config_json = config.dump();
  abacus::add_file_digest(manifest.inputs, opts.in);
  abacus::add_file_digest(manifest.inputs, opts.prompt_file);
  abacus::add_file_digest(manifest.outputs, opts.out);
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);

  std::printf("%s %s: mean %.4f sd %.4f over %d trials", report.dataset.c_str(),
              report.mode.c_str(), report.mean, report.sd, params.trials);
  if (report.delta_pct) std::printf(" (delta %+.1f%%)", *report.delta_pct);
  std::printf(" -> %s\n", opts.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// perturb

struct PerturbOpts {
  std::string in;
  std::string out;
  std::string policy = "substitute";
  std::size_t variants = 50;
  int extra_digits = 1;
  std::uint64_t seed = 0;
  int max_retries = 100;
  bool allow_negative = false;
  bool drop_integer_constraint = false;
};

int run_perturb(const PerturbOpts& opts, const std::string& command) {
  Stopwatch watch;
  abacus::PerturbPolicy policy;
  if (opts.policy == "substitute") {
    policy.kind = abacus::PerturbPolicy::Kind::substitute;
  } else if (opts.policy == "digit-expand" || opts.policy == "digit_expand") {
    policy.kind = abacus::PerturbPolicy::Kind::digit_expand;
  } else {
    throw abacus::ConfigError("unknown policy: " + opts.policy +
                              " (expected substitute or digit-expand)");
  }
  policy.variants = opts.variants;
  policy.extra_digits = opts.extra_digits;
  policy.seed = opts.seed;
  policy.max_retries_per_variant = opts.max_retries;
  policy.constraints.require_nonnegative = !opts.allow_negative;
  policy.constraints.require_integer_where_original_integer = !opts.drop_integer_constraint;

  auto records = abacus::read_gsm_records(opts.in);
  std::vector<abacus::GsmRecord> variants;
  abacus::VariantReport totals;
  std::size_t rootless = 0;
  std::size_t shortfall_records = 0;
  ordered_json per_record = ordered_json::array();
  ordered_json skipped = ordered_json::array();
  for (const auto& record : records) {
    abacus::VariantSet set;
    try {
      set = abacus::gen_variants(record, policy);
    } catch (const abacus::NoRootError&) {
      ++rootless;  // no answer-producing step to anchor on; skip, keep going
      skipped.push_back({{"id", record.id}, {"reason", "no_root"}});
      continue;
    }
    totals.requested += set.report.requested;
    totals.produced += set.report.produced;
    totals.rejected_constraint += set.report.rejected_constraint;
    totals.rejected_duplicate += set.report.rejected_duplicate;
    totals.rejected_guard += set.report.rejected_guard;
    totals.rejected_structure += set.report.rejected_structure;
    if (set.report.shortfall()) ++shortfall_records;
    per_record.push_back({{"id", record.id},
                          {"produced", set.report.produced},
                          {"requested", set.report.requested}});
    for (auto& variant : set.records) variants.push_back(std::move(variant));
  }
  abacus::write_gsm_records(opts.out, variants);

  ordered_json config;
  config["policy"] = opts.policy;
  config["variants"] = opts.variants;
  config["extra_digits"] = opts.extra_digits;
  config["seed"] = opts.seed;
  config["max_retries"] = opts.max_retries;
  config["require_nonnegative"] = policy.constraints.require_nonnegative;
  config["require_integer_where_original_integer"] =
      policy.constraints.require_integer_where_original_integer;
  config["per_record"] = std::move(per_record);
  config["skipped"] = std::move(skipped);

  abacus::RunManifest manifest = start_manifest(command);
  manifest.config_json = config.dump();
  abacus::add_file_digest(manifest.inputs, opts.in);
  abacus::add_file_digest(manifest.outputs, opts.out);
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);

  std::cout << "perturbed " << (records.size() - rootless) << " of " << records.size()
            << " records (" << rootless << " without a root step), " << totals.produced << " of "
            << totals.requested << " variants -> " << opts.out << "\n";
  if (totals.produced < totals.requested) {
    std::cerr << "yield shortfall: " << shortfall_records
              << " records produced fewer variants than requested (constraint "
              << totals.rejected_constraint << ", duplicate " << totals.rejected_duplicate
              << ", guard " << totals.rejected_guard << ", structure "
              << totals.rejected_structure << ")\n";
    return kExitShortfall;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// distill-filter

struct DistillOpts {
  std::string in;
  std::string out;
  std::string style = "sentence";
  bool no_fallback = false;
};

int run_distill_filter(const DistillOpts& opts, const std::string& command) {
  Stopwatch watch;
  abacus::ExtractOptions extract;
  extract.style = style_from_name(opts.style);
  extract.fallback = !opts.no_fallback;

  auto items = abacus::read_distill_items(opts.in);
  std::size_t before = 0, after = 0;
  for (auto& item : items) {
    before += item.candidates.size();
    item.candidates =
        abacus::filter_distilled(abacus::FinalAnswer(item.gold), item.candidates, extract);
    after += item.candidates.size();
  }
  abacus::write_distill_items(opts.out, items);

  ordered_json config;
  config["style"] = opts.style;
  config["fallback"] = extract.fallback;

  abacus::RunManifest manifest = start_manifest(command);
  manifest.config_json = config.dump();
  abacus::add_file_digest(manifest.inputs, opts.in);
  abacus::add_file_digest(manifest.outputs, opts.out);
  manifest.duration_seconds = watch.seconds();
  abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);

  std::cout << "kept " << after << " of " << before << " candidates across " << items.size()
            << " questions -> " << opts.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportOpts {
  std::vector<std::string> targets;
  std::string baseline;
  std::string out;
};

int run_report(const ReportOpts& opts, const std::string& command) {
  Stopwatch watch;
  std::optional<abacus::EvalReport> baseline;
  if (!opts.baseline.empty()) baseline = abacus::read_eval_report(opts.baseline);

  std::vector<abacus::EvalReport> rows;
  if (baseline) rows.push_back(*baseline);
  for (const auto& path : opts.targets) rows.push_back(abacus::read_eval_report(path));

  std::vector<std::string> tsv;
  tsv.push_back("dataset\tmode\tquestions\ttrials\tmean\tsd\tdelta_pct");
  std::printf("%-32s %-6s %9s %6s %8s %8s %8s\n", "dataset", "mode", "questions", "trials",
              "mean", "sd", "delta");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::optional<double> delta = row.delta_pct;
    bool is_baseline_row = baseline && i == 0;
    if (baseline && !is_baseline_row && baseline->mean > 0)
      delta = abacus::delta_pct(row.mean, baseline->mean);
    char mean_s[32], sd_s[32], delta_s[32];
    std::snprintf(mean_s, sizeof(mean_s), "%.4f", row.mean);
    std::snprintf(sd_s, sizeof(sd_s), "%.4f", row.sd);
    if (delta)
      std::snprintf(delta_s, sizeof(delta_s), "%+.1f%%", *delta);
    else
      delta_s[0] = '\0';
    tsv.push_back(row.dataset + '\t' + row.mode + '\t' + std::to_string(row.num_questions) +
                  '\t' + std::to_string(row.per_trial_accuracy.size()) + '\t' + mean_s + '\t' +
                  sd_s + '\t' + delta_s);
    std::printf("%-32s %-6s %9d %6zu %8s %8s %8s\n", row.dataset.c_str(), row.mode.c_str(),
                row.num_questions, row.per_trial_accuracy.size(), mean_s, sd_s, delta_s);
  }

  if (!opts.out.empty()) {
    abacus::write_lines(opts.out, tsv);
    abacus::RunManifest manifest = start_manifest(command);
    ordered_json config;
    config["baseline"] = opts.baseline;
    config["targets"] = opts.targets;
    manifest.config_json = config.dump();
    if (!opts.baseline.empty()) abacus::add_file_digest(manifest.inputs, opts.baseline);
    for (const auto& path : opts.targets) abacus::add_file_digest(manifest.inputs, path);
    abacus::add_file_digest(manifest.outputs, opts.out);
    manifest.duration_seconds = watch.seconds();
    abacus::write_run_manifest(abacus::manifest_path_for(opts.out), manifest);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-arithmetic corpora, annotation probes, consistent perturbations, and "
               "LM evaluation"};
  app.set_version_flag("--version", std::string(abacus::kVersion));
  app.set_config("--config", "", "TOML config mirroring all flags; flags take precedence");
  app.require_subcommand(1);
  std::string command = join_argv(argc, argv);
  int rc = 0;

  GenArithOpts gen;
  auto* gen_cmd = app.add_subcommand("gen-arith", "Synthesize an exact-arithmetic corpus");
  gen_cmd->add_option("--out", gen.out, "Output JSONL path")->required();
  gen_cmd->add_option("--count", gen.cfg.total_count, "Total examples")->capture_default_str();
  gen_cmd->add_option("--max-digits", gen.cfg.max_digits, "Operand digit ceiling")->capture_default_str();
  gen_cmd->add_option("--seed", gen.cfg.seed, "Root seed")->capture_default_str();
  gen_cmd->add_option("--exact-div-prob", gen.cfg.exact_division_probability,
                      "Probability a division item divides exactly")->capture_default_str();
  gen_cmd->add_option("--fraction-max-digits", gen.cfg.fraction_component_max_digits,
                      "Digit ceiling for fraction components")->capture_default_str();
  gen_cmd->add_flag("--allow-negative-sub", gen.allow_negative_sub,
                    "Permit negative subtraction results");
  gen_cmd->add_option("--mix-add", gen.cfg.mix.add, "Weight of addition items")->capture_default_str();
  gen_cmd->add_option("--mix-sub", gen.cfg.mix.sub, "Weight of subtraction items")->capture_default_str();
  gen_cmd->add_option("--mix-mul", gen.cfg.mix.mul, "Weight of multiplication items")->capture_default_str();
  gen_cmd->add_option("--mix-div", gen.cfg.mix.div, "Weight of division items")->capture_default_str();
  gen_cmd->add_option("--mix-fraction", gen.cfg.mix.fraction, "Weight of fraction items")->capture_default_str();
  gen_cmd->add_option("--mix-percent", gen.cfg.mix.percent, "Weight of percentage items")->capture_default_str();
  gen_cmd->add_option("--jobs", gen.jobs, "Worker threads")->capture_default_str();
  gen_cmd->callback([&] { rc = run_gen_arith(gen, command); });

  SplitOpts split;
  auto* split_cmd = app.add_subcommand("split", "Sample a validation split without replacement");
  split_cmd->add_option("--in", split.in, "Input JSONL path")->required();
  split_cmd->add_option("--train-out", split.train_out, "Train output path")->required();
  split_cmd->add_option("--validation-out", split.validation_out, "Validation output path")
      ->required();
  split_cmd->add_option("--n", split.n, "Validation size")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Root seed")->capture_default_str();
  split_cmd->callback([&] { rc = run_split(split, command); });

  ProbesOpts probes;
  auto* probes_cmd =
      app.add_subcommand("probes", "Build arithmetic-in-context probes from annotated records");
  probes_cmd->add_option("--in", probes.in, "Annotated records JSONL")->required();
  probes_cmd->add_option("--out", probes.out, "Probe JSONL path")->required();
  probes_cmd->add_flag("--run", probes.run, "Send probes to the endpoint and score them");
  probes_cmd->add_option("--results-out", probes.results_out,
                         "Scored results path (default: <out>.results.jsonl)");
  probes_cmd->add_option("--model", probes.model, "Model name for the endpoint")->capture_default_str();
  probes_cmd->add_option("--cache", probes.cache_path, "Generation cache path");
  probes_cmd->add_option("--jobs", probes.jobs, "Parallel requests")->capture_default_str();
  probes_cmd->callback([&] { rc = run_probes(probes, command); });

  EvalOpts eval;
  auto* eval_cmd = app.add_subcommand("eval", "Few-shot evaluation against an endpoint");
  eval_cmd->add_option("--in", eval.in, "Question file")->required();
  eval_cmd->add_option("--format", eval.format, "Input format: gsm8k, qa, aqua")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Report JSON path")->required();
  eval_cmd->add_option("--prompt-file", eval.prompt_file, "Few-shot exemplar file")->required();
  eval_cmd->add_option("--num-exemplars", eval.num_exemplars, "Exemplars per prompt")->capture_default_str();
  eval_cmd->add_option("--style", eval.style,
                       "Answer style: sentence, hash, choice (default by format)");
  eval_cmd->add_option("--mode", eval.mode, "Decoding: greedy or sc")->capture_default_str();
  auto* n_opt = eval_cmd->add_option("--n", eval.n, "Samples per question (sc)")->capture_default_str();
  eval_cmd->add_option("--temp", eval.temp, "Sampling temperature")->capture_default_str();
  eval_cmd->add_option("--top-p", eval.top_p, "Nucleus mass")->capture_default_str();
  eval_cmd->add_option("--max-new", eval.max_new, "Max new tokens")->capture_default_str();
  eval_cmd->add_option("--trials", eval.trials, "Independent trials")->capture_default_str();
  eval_cmd->add_option("--model", eval.model, "Model name for the endpoint")->capture_default_str();
  eval_cmd->add_option("--dataset-name", eval.dataset_name, "Report label (default: --in)");
  eval_cmd->add_option("--cache", eval.cache_path, "Generation cache path");
  eval_cmd->add_option("--baseline", eval.baseline, "Baseline accuracy for the drop column");
  eval_cmd->add_option("--jobs", eval.jobs, "Parallel requests")->capture_default_str();
  eval_cmd->callback([&] {
    eval.n_given = n_opt->count() > 0;
    rc = run_eval(eval, command);
  });

  PerturbOpts perturb;
  auto* perturb_cmd =
      app.add_subcommand("perturb", "Generate numerically consistent record variants");
  perturb_cmd->add_option("--in", perturb.in, "Annotated records JSONL")->required();
  perturb_cmd->add_option("--out", perturb.out, "Variant JSONL path")->required();
  perturb_cmd->add_option("--policy", perturb.policy, "substitute or digit-expand")->capture_default_str();
  perturb_cmd->add_option("--variants", perturb.variants, "Variants per record")->capture_default_str();
  perturb_cmd->add_option("--extra-digits", perturb.extra_digits,
                          "Digits added by digit-expand")->capture_default_str();
  perturb_cmd->add_option("--seed", perturb.seed, "Root seed")->capture_default_str();
  perturb_cmd->add_option("--max-retries", perturb.max_retries,
                          "Sampling attempts per variant")->capture_default_str();
  perturb_cmd->add_flag("--allow-negative", perturb.allow_negative,
                        "Permit negative intermediate values");
  perturb_cmd->add_flag("--drop-integer-constraint", perturb.drop_integer_constraint,
                        "Do not force integer steps to stay integer");
  perturb_cmd->callback([&] { rc = run_perturb(perturb, command); });

  DistillOpts distill;
  auto* distill_cmd =
      app.add_subcommand("distill-filter", "Keep correct, deduplicated candidate solutions");
  distill_cmd->add_option("--in", distill.in, "Candidate pool JSONL")->required();
  distill_cmd->add_option("--out", distill.out, "Filtered JSONL path")->required();
  distill_cmd->add_option("--style", distill.style, "Answer style: sentence, hash, choice")->capture_default_str();
  distill_cmd->add_flag("--no-fallback", distill.no_fallback,
                        "Disable last-numeral rescue extraction");
  distill_cmd->callback([&] { rc = run_distill_filter(distill, command); });

  ReportOpts report;
  auto* report_cmd = app.add_subcommand("report", "Tabulate eval reports with drop columns");
  report_cmd->add_option("--target", report.targets, "Eval report JSON (repeatable)")
      ->required();
  report_cmd->add_option("--baseline", report.baseline, "Baseline eval report JSON");
  report_cmd->add_option("--out", report.out, "TSV output path");
  report_cmd->callback([&] { rc = run_report(report, command); });

  struct {
    std::string cache_path;
  } compact;
  auto* compact_cmd = app.add_subcommand("cache-compact", "Drop superseded cache lines");
  compact_cmd->add_option("--cache", compact.cache_path, "Generation cache path")->required();
  compact_cmd->callback([&] {
    std::size_t kept = abacus::GenerationCache::compact(compact.cache_path);
    std::cout << "kept " << kept << " records in " << compact.cache_path << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int cli_rc = app.exit(e);
    return cli_rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.fail_class());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_code_for(FailClass::internal);
  }
  return rc;
}
