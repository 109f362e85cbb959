#include "qurate/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qurate/demo.hpp"
#include "qurate/mock_backend.hpp"
#include "qurate/rng.hpp"
#include "qurate/sha256.hpp"
#include "qurate/util.hpp"

namespace qurate::cli {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::string out_base(const RunConfig& config, const std::string& out_dir) {
  std::string dir = out_dir.empty() ? config.resolve(config.paths.out) : out_dir;
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// config hash + input hashes + seed, so a run can be audited and reruns can
// be compared byte for byte. The output directory never appears here.
void write_manifest(
    const std::string& dir, const std::string& command,
    const RunConfig& config,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config_sha256"] = sha256_hex(config_to_json(config));
  json input_hashes = json::object();
  for (const auto& [declared, resolved] : inputs) {
    input_hashes[declared] = sha256_file(resolved);
  }
  manifest["inputs"] = input_hashes;
  manifest["outputs"] = outputs;
  write_file(dir + "/manifest_" + command + ".json",
             manifest.dump(2) + "\n");
}

std::map<std::string, std::string> text_index(
    const ingest::InstancePool& pool) {
  std::map<std::string, std::string> texts;
  for (const auto& x : pool.items) texts[x.id] = x.text;
  return texts;
}

std::map<std::string, size_t> resolve_budgets(
    const RunConfig& config,
    const std::vector<qubo::FrameCandidates>& frames) {
  std::map<std::string, size_t> budgets;
  for (const auto& frame : frames) {
    auto it = config.qubo.budgets.find(frame.frame);
    if (it != config.qubo.budgets.end()) {
      budgets[frame.frame] = it->second;
    } else if (config.qubo.budget > 0) {
      budgets[frame.frame] = config.qubo.budget;
    } else {
      throw std::runtime_error("frame \"" + frame.frame +
                               "\" is present in the pool but missing from "
                               "the budgets config");
    }
  }
  return budgets;
}

std::string frame_slug(size_t index, const std::string& frame) {
  std::string slug = "f" + std::to_string(index) + "_";
  bool last_sep = false;
  for (char ch : frame) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      slug += char(std::tolower(static_cast<unsigned char>(ch)));
      last_sep = false;
    } else if (!last_sep && !slug.empty()) {
      slug += '_';
      last_sep = true;
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug;
}

std::string trajectory_csv(const std::vector<qubo::TrajectoryPoint>& points) {
  std::string out =
      "iteration,energy,hamming_frac,mean_reliability,mean_redundancy,"
      "temperature\n";
  for (const auto& p : points) {
    out += fmt_int(p.iteration) + "," + fmt_double(p.energy) + "," +
           fmt_double(p.hamming_frac) + "," + fmt_double(p.mean_reliability) +
           "," + fmt_double(p.mean_redundancy) + "," +
           fmt_double(p.temperature) + "\n";
  }
  return out;
}

json subset_to_json(const qubo::CuratedSubset& subset,
                    const std::map<std::string, size_t>& budgets,
                    eval::Method method, const RunConfig& config) {
  json j;
  j["method"] = eval::to_string(method);
  j["lambda_rel"] = config.qubo.lambda_rel;
  j["lambda_red"] = config.qubo.lambda_red;
  j["seed"] = config.seed;
  size_t total = 0;
  json frames = json::array();
  for (const auto& f : subset.frames) {
    total += f.ids.size();
    json fj;
    fj["frame"] = f.frame;
    fj["budget"] = budgets.at(f.frame);
    fj["selected"] = f.ids;
    fj["energy"] = f.energy;
    fj["mean_reliability"] = f.mean_reliability;
    fj["mean_redundancy"] = f.mean_redundancy;
    fj["hamming_frac"] = f.hamming_frac;
    fj["boundary_collapsed"] = f.boundary_collapsed;
    frames.push_back(std::move(fj));
  }
  j["frames"] = frames;
  j["total_selected"] = total;
  return j;
}

struct ScoredArtifacts {
  std::vector<reliability::ScoredInstance> pool;
  std::map<std::string, std::string> texts;
  std::map<std::string, std::string> labels;
};

ScoredArtifacts load_scored_with_texts(const RunConfig& config) {
  ScoredArtifacts art;
  art.pool = reliability::load_scored(config.resolve(config.paths.scored));
  ingest::InstancePool instances = ingest::load_instances(
      config.resolve(config.paths.instances), config.frame_taxonomy());
  art.texts = text_index(instances);
  for (const auto& row : art.pool) {
    if (!art.texts.count(row.id))
      throw std::runtime_error("scored instance " + row.id +
                               " has no text in the instance file");
    art.labels[row.id] = row.label;
  }
  return art;
}

qubo::AnnealSchedule schedule_for(const RunConfig& config) {
  qubo::AnnealSchedule schedule = config.anneal;
  schedule.seed = config.seed;
  return schedule;
}

}  // namespace

int cmd_demo(const RunConfig& config, const std::string& out_dir) {
  const std::string dir = out_base(config, out_dir);
  ingest::FrameTaxonomy taxonomy = config.frame_taxonomy();

  auto instances = demo::generate_instances(config.demo, taxonomy, config.seed);
  auto gold = demo::generate_gold(config.demo, taxonomy, config.seed);

  std::string instance_lines;
  for (const auto& x : instances)
    instance_lines += ingest::instance_to_json_line(x) + "\n";
  write_file(dir + "/instances.jsonl", instance_lines);

  std::string gold_lines;
  for (const auto& x : gold)
    gold_lines += ingest::sentiment_to_json_line(x) + "\n";
  write_file(dir + "/gold.jsonl", gold_lines);

  // a ready-to-run config wired to the generated files
  RunConfig runnable = config;
  runnable.paths.instances = "instances.jsonl";
  runnable.paths.annotations = "annotations.jsonl";
  runnable.paths.scored = "scored.jsonl";
  runnable.paths.gold = "gold.jsonl";
  runnable.paths.out = ".";
  runnable.mock.enabled = true;
  write_file(dir + "/config.json", config_to_json(runnable));

  write_manifest(dir, "demo", config, {},
                 {"instances.jsonl", "gold.jsonl", "config.json"});
  std::cout << "demo: wrote " << instances.size() << " instances and "
            << gold.size() << " gold examples to " << dir << "\n";
  return 0;
}

int cmd_annotate(const RunConfig& config, const std::string& out_dir) {
  const std::string dir = out_base(config, out_dir);
  ingest::FrameTaxonomy taxonomy = config.frame_taxonomy();
  const std::string instance_path = config.resolve(config.paths.instances);
  ingest::InstancePool pool = ingest::load_instances(instance_path, taxonomy);
  std::cout << "annotate: loaded " << pool.size() << " instances\n";

  annotation::AnnotationRun run;
  if (config.mock.enabled) {
    std::map<std::string, std::string> planted;
    for (const auto& x : pool.items) {
      if (x.frame) planted[x.id] = *x.frame;
    }
    auto mocks = annotation::make_mock_backends(config.seed, config.mock.noise,
                                                taxonomy, std::move(planted));
    run = annotation::annotate_pool(
        pool.items, mocks.labeler_a, mocks.labeler_b, mocks.critic, taxonomy,
        annotation::kDefaultLabelerTemplate,
        annotation::kDefaultLabelerTemplate,
        annotation::kDefaultCriticTemplate, config.workers);
  } else {
    auto system_of = [](const annotation::BackendConfig& b, const char* fallback) {
      return b.prompt_template.empty() ? std::string(fallback)
                                       : b.prompt_template;
    };
    annotation::HttpBackend a(config.backends.labeler_a);
    annotation::HttpBackend b(config.backends.labeler_b);
    annotation::HttpBackend critic(config.backends.critic);
    run = annotation::annotate_pool(
        pool.items, a, b, critic, taxonomy,
        system_of(config.backends.labeler_a,
                  annotation::kDefaultLabelerTemplate),
        system_of(config.backends.labeler_b,
                  annotation::kDefaultLabelerTemplate),
        system_of(config.backends.critic, annotation::kDefaultCriticTemplate),
        config.workers);
  }

  if (run.records.empty()) {
    std::string reason =
        run.skipped.empty() ? "no instances" : run.skipped.front().reason;
    throw std::runtime_error("annotation produced no records (" + reason +
                             ")");
  }

  annotation::save_records(dir + "/annotations.jsonl", run.records);

  size_t out_of_pair = 0;
  for (const auto& r : run.records) out_of_pair += r.out_of_pair() ? 1 : 0;
  json summary;
  summary["instances"] = pool.size();
  summary["records"] = run.records.size();
  summary["skipped"] = run.skipped.size();
  summary["skip_rate"] = double(run.skipped.size()) / double(pool.size());
  summary["critic_out_of_pair"] = out_of_pair;
  json skipped = json::array();
  for (const auto& s : run.skipped)
    skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  summary["skipped_instances"] = skipped;
  write_file(dir + "/annotate_summary.json", summary.dump(2) + "\n");

  write_manifest(dir, "annotate", config,
                 {{config.paths.instances, instance_path}},
                 {"annotations.jsonl", "annotate_summary.json"});
  std::cout << "annotate: " << run.records.size() << " records, "
            << run.skipped.size() << " skipped\n";
  return 0;
}

int cmd_score(const RunConfig& config, const std::string& out_dir) {
  const std::string dir = out_base(config, out_dir);
  ingest::FrameTaxonomy taxonomy = config.frame_taxonomy();
  const std::string annotation_path =
      config.resolve(config.paths.annotations);
  const std::string instance_path = config.resolve(config.paths.instances);
  auto records = annotation::load_records(annotation_path);
  if (records.empty()) throw std::runtime_error("no annotation records");
  ingest::InstancePool pool = ingest::load_instances(instance_path, taxonomy);
  auto texts = text_index(pool);

  std::vector<reliability::ReliabilityFeatures> features;
  std::vector<int> labels;
  features.reserve(records.size());
  for (const auto& r : records) {
    auto it = texts.find(r.instance_id);
    if (it == texts.end())
      throw std::runtime_error("annotated instance " + r.instance_id +
                               " has no text in the instance file");
    features.push_back(reliability::extract_features(
        r, it->second, config.reliability.text_len_cap));
    labels.push_back(reliability::make_pseudo_label(
                         r, config.reliability.tau_conf,
                         config.reliability.tau_rubric)
                         ? 1
                         : 0);
  }

  const size_t stable = std::accumulate(labels.begin(), labels.end(), size_t(0));
  if (stable == 0 || stable == labels.size()) {
    throw std::runtime_error(
        std::string("all pseudo-labels are ") +
        (stable == 0 ? "unstable" : "stable") +
        "; tighten or loosen tau_conf/tau_rubric so both classes appear "
        "before training the discriminator");
  }

  reliability::ReliabilityModel model = reliability::train_discriminator(
      features, labels, config.reliability.train);

  std::vector<reliability::ScoredInstance> scored;
  scored.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    reliability::ScoredInstance row;
    row.id = records[i].instance_id;
    row.label = records[i].critic.final_label;
    row.critic_score = records[i].critic.score;
    row.reliability = reliability::predict_reliability(model, features[i]);
    row.features = features[i];
    scored.push_back(std::move(row));
  }
  reliability::save_scored(dir + "/scored.jsonl", scored);
  write_file(dir + "/reliability_model.txt", reliability::export_model(model));

  std::map<std::string, double> by_id;
  std::map<std::string, int> critic_by_id;
  for (const auto& row : scored) {
    by_id[row.id] = row.reliability;
    critic_by_id[row.id] = row.critic_score;
  }
  reliability::ReliabilityGroups groups = reliability::group_by_reliability(
      by_id, config.reliability.low_cut, config.reliability.high_cut);

  auto group_stats = [&](const std::vector<std::string>& ids) {
    json g;
    g["n"] = ids.size();
    double r_sum = 0.0, critic_sum = 0.0;
    for (const auto& id : ids) {
      r_sum += by_id[id];
      critic_sum += critic_by_id[id];
    }
    g["mean_reliability"] = ids.empty() ? 0.0 : r_sum / double(ids.size());
    g["mean_critic"] = ids.empty() ? 0.0 : critic_sum / double(ids.size());
    return g;
  };
  json summary;
  summary["pool"] = scored.size();
  summary["stable_pseudo_labels"] = stable;
  summary["low_cut"] = config.reliability.low_cut;
  summary["high_cut"] = config.reliability.high_cut;
  summary["groups"] = {{"low", group_stats(groups.low)},
                       {"mid", group_stats(groups.mid)},
                       {"high", group_stats(groups.high)}};
  summary["epochs_run"] = model.epochs_run;
  summary["final_loss"] = model.final_loss;
  write_file(dir + "/score_summary.json", summary.dump(2) + "\n");

  write_manifest(dir, "score", config,
                 {{config.paths.annotations, annotation_path},
                  {config.paths.instances, instance_path}},
                 {"scored.jsonl", "reliability_model.txt",
                  "score_summary.json"});
  std::cout << "score: " << scored.size() << " instances; groups low/mid/high "
            << groups.low.size() << "/" << groups.mid.size() << "/"
            << groups.high.size() << "\n";
  return 0;
}

int cmd_select(const RunConfig& config, const std::string& out_dir,
               eval::Method method) {
  const std::string dir = out_base(config, out_dir);
  ScoredArtifacts art = load_scored_with_texts(config);

  auto frames = qubo::build_frame_candidates(
      art.pool, art.texts, config.frame_taxonomy(), config.tfidf.min_df,
      config.tfidf.max_features, config.qubo.max_frame_size);
  auto budgets = resolve_budgets(config, frames);

  qubo::QuboParams params;
  params.lambda_rel = config.qubo.lambda_rel;
  params.lambda_red = config.qubo.lambda_red;
  params.budget = config.qubo.budget > 0 ? config.qubo.budget : 1;

  qubo::CuratedSubset subset;
  std::vector<std::string> outputs;
  if (method == eval::Method::qubo) {
    subset = qubo::select_all_frames(frames, budgets, params,
                                     schedule_for(config), config.workers);
    for (size_t f = 0; f < subset.frames.size(); ++f) {
      std::string name =
          "trajectory_" + frame_slug(f, subset.frames[f].frame) + ".csv";
      write_file(dir + "/" + name,
                 trajectory_csv(subset.frames[f].trajectory));
      outputs.push_back(name);
    }
  } else {
    subset = qubo::distmatch_select(frames, budgets, params, config.seed);
  }

  const std::string subset_name =
      std::string("subset_") +
      (method == eval::Method::qubo ? "qubo" : "distmatch") + ".json";
  write_file(dir + "/" + subset_name,
             subset_to_json(subset, budgets, method, config).dump(2) + "\n");
  outputs.insert(outputs.begin(), subset_name);

  write_manifest(
      dir,
      method == eval::Method::qubo ? "select_qubo" : "select_distmatch",
      config,
      {{config.paths.scored, config.resolve(config.paths.scored)},
       {config.paths.instances, config.resolve(config.paths.instances)}},
      outputs);

  size_t total = subset.all_ids().size();
  size_t collapsed = 0;
  for (const auto& f : subset.frames) collapsed += f.boundary_collapsed;
  std::cout << "select(" << eval::to_string(method) << "): " << total
            << " instances across " << subset.frames.size() << " frames ("
            << collapsed << " at the k >= n boundary)\n";
  return 0;
}

int cmd_sweep(const RunConfig& config, const std::string& out_dir) {
  const std::string dir = out_base(config, out_dir);
  ScoredArtifacts art = load_scored_with_texts(config);

  std::vector<std::pair<std::string, std::string>> labeled;
  labeled.reserve(art.pool.size());
  for (const auto& row : art.pool) labeled.emplace_back(row.id, row.label);
  ingest::SplitResult split = ingest::stratified_split(
      labeled, config.sweep.split_ratio, derive_seed(config.seed, "sweep-split"));

  std::map<std::string, bool> in_train;
  for (const auto& id : split.train) in_train[id] = true;
  std::vector<reliability::ScoredInstance> candidates;
  for (const auto& row : art.pool) {
    if (in_train.count(row.id)) candidates.push_back(row);
  }

  eval::SweepContext ctx;
  ctx.frames = qubo::build_frame_candidates(
      candidates, art.texts, config.frame_taxonomy(), config.tfidf.min_df,
      config.tfidf.max_features, config.qubo.max_frame_size);
  ctx.budgets = resolve_budgets(config, ctx.frames);
  ctx.schedule = schedule_for(config);
  ctx.texts = art.texts;
  ctx.weak_labels = art.labels;
  ctx.eval_ids = split.test;
  ctx.taxonomy = config.frame_taxonomy();
  ctx.tfidf = config.tfidf;
  ctx.train_cfg = config.eval_train;
  ctx.workers = config.workers;

  eval::SweepTable table = eval::sweep(ctx, config.sweep.lambda_conf_grid,
                                       config.sweep.lambda_red_grid,
                                       config.sweep.seeds);
  auto delta = eval::delta_f1_map(table.filtered(eval::Method::qubo),
                                  table.filtered(eval::Method::distmatch));

  write_file(dir + "/sweep.csv", eval::sweep_to_csv(table));
  write_file(dir + "/delta_f1.csv", eval::delta_map_to_csv(delta));
  write_file(dir + "/framing_split.json", ingest::split_to_json(split) + "\n");

  write_manifest(
      dir, "sweep", config,
      {{config.paths.scored, config.resolve(config.paths.scored)},
       {config.paths.instances, config.resolve(config.paths.instances)}},
      {"sweep.csv", "delta_f1.csv", "framing_split.json"});
  std::cout << "sweep: " << table.rows.size() << " rows over "
            << config.sweep.lambda_conf_grid.size() << "x"
            << config.sweep.lambda_red_grid.size() << " grid, "
            << config.sweep.seeds.size() << " seeds\n";
  return 0;
}

int cmd_transfer(const RunConfig& config, const std::string& out_dir) {
  const std::string dir = out_base(config, out_dir);
  ScoredArtifacts art = load_scored_with_texts(config);
  const std::string gold_path = config.resolve(config.paths.gold);
  auto gold = ingest::load_gold_sentiment(gold_path);
  if (gold.empty()) throw std::runtime_error("gold file is empty");

  std::vector<std::pair<std::string, std::string>> labeled;
  for (const auto& x : gold)
    labeled.emplace_back(x.id, ingest::to_string(x.sentiment));
  ingest::SplitResult split = ingest::stratified_split(
      labeled, config.sweep.split_ratio, derive_seed(config.seed, "gold-split"));
  std::map<std::string, const ingest::SentimentExample*> gold_by_id;
  for (const auto& x : gold) gold_by_id[x.id] = &x;
  std::vector<ingest::SentimentExample> gold_train, gold_test;
  for (const auto& id : split.train) gold_train.push_back(*gold_by_id.at(id));
  for (const auto& id : split.test) gold_test.push_back(*gold_by_id.at(id));

  // selections are produced on demand; both framing models are trained on
  // their full selected subsets
  auto frames = qubo::build_frame_candidates(
      art.pool, art.texts, config.frame_taxonomy(), config.tfidf.min_df,
      config.tfidf.max_features, config.qubo.max_frame_size);
  auto budgets = resolve_budgets(config, frames);
  qubo::QuboParams params;
  params.lambda_rel = config.qubo.lambda_rel;
  params.lambda_red = config.qubo.lambda_red;
  params.budget = config.qubo.budget > 0 ? config.qubo.budget : 1;

  qubo::CuratedSubset subset_q = qubo::select_all_frames(
      frames, budgets, params, schedule_for(config), config.workers);
  qubo::CuratedSubset subset_d =
      qubo::distmatch_select(frames, budgets, params, config.seed);

  auto training_pairs = [&](const qubo::CuratedSubset& subset) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& id : subset.all_ids()) {
      pairs.emplace_back(art.texts.at(id), art.labels.at(id));
    }
    return pairs;
  };
  eval::FramingModel framing_q = eval::train_framing_classifier(
      training_pairs(subset_q), config.frame_taxonomy(), config.tfidf,
      config.eval_train);
  eval::FramingModel framing_d = eval::train_framing_classifier(
      training_pairs(subset_d), config.frame_taxonomy(), config.tfidf,
      config.eval_train);

  auto results = eval::downstream_experiment(
      gold_train, gold_test, framing_q, framing_d,
      derive_seed(config.seed, "transfer"), config.tfidf, config.eval_train,
      config.workers);

  write_file(dir + "/transfer.csv", eval::transfer_to_csv(results));
  write_file(dir + "/gold_split.json", ingest::split_to_json(split) + "\n");

  write_manifest(
      dir, "transfer", config,
      {{config.paths.scored, config.resolve(config.paths.scored)},
       {config.paths.instances, config.resolve(config.paths.instances)},
       {config.paths.gold, gold_path}},
      {"transfer.csv", "gold_split.json"});
  for (const auto& r : results) {
    std::cout << "transfer: " << eval::to_string(r.config) << " accuracy "
              << r.accuracy << " macro_f1 " << r.macro_f1 << "\n";
  }
  return 0;
}

}  // namespace qurate::cli
