#include "qurate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "qurate/parallel.hpp"
#include "qurate/rng.hpp"
#include "qurate/util.hpp"

namespace qurate::eval {

FramingModel train_framing_classifier(
    const std::vector<std::pair<std::string, std::string>>& text_and_frame,
    const ingest::FrameTaxonomy& taxonomy, const TfidfConfig& tfidf,
    const softmax::Config& train_cfg) {
  if (text_and_frame.empty())
    throw std::invalid_argument("framing classifier: empty training set");
  std::unordered_set<std::string> distinct;
  for (const auto& [text, frame] : text_and_frame) distinct.insert(frame);
  if (distinct.size() < 2)
    throw std::invalid_argument(
        "framing classifier: training subset covers a single frame");

  std::vector<std::vector<std::string>> corpus;
  std::vector<size_t> labels;
  corpus.reserve(text_and_frame.size());
  labels.reserve(text_and_frame.size());
  for (const auto& [text, frame] : text_and_frame) {
    corpus.push_back(textfeat::tokenize(text));
    labels.push_back(taxonomy.index_of(frame));
  }

  FramingModel model;
  model.frames = taxonomy.frames;
  model.vocab = textfeat::fit_tfidf(corpus, tfidf.min_df, tfidf.max_features);
  std::vector<textfeat::SparseVector> rows;
  rows.reserve(corpus.size());
  for (const auto& doc : corpus)
    rows.push_back(textfeat::transform(model.vocab, doc));
  model.head = softmax::train(rows, labels, taxonomy.size(),
                              model.vocab.size(), train_cfg);
  return model;
}

std::vector<std::vector<double>> frame_probabilities(
    const FramingModel& model, const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto row = textfeat::transform(model.vocab, textfeat::tokenize(text));
    out.push_back(softmax::predict_proba(model.head, row));
  }
  return out;
}

std::string predict_frame(const FramingModel& model, const std::string& text) {
  auto row = textfeat::transform(model.vocab, textfeat::tokenize(text));
  return model.frames[softmax::predict_class(model.head, row)];
}

double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& golds,
                const std::vector<std::string>& classes) {
  if (predictions.size() != golds.size())
    throw std::invalid_argument("macro_f1: length mismatch");
  if (classes.empty()) throw std::invalid_argument("macro_f1: no classes");
  std::unordered_map<std::string, size_t> index;
  for (size_t c = 0; c < classes.size(); ++c) index[classes[c]] = c;
  std::vector<double> tp(classes.size(), 0.0), fp(classes.size(), 0.0),
      fn(classes.size(), 0.0);
  for (size_t i = 0; i < predictions.size(); ++i) {
    auto pi = index.find(predictions[i]);
    auto gi = index.find(golds[i]);
    if (pi == index.end() || gi == index.end())
      throw std::invalid_argument("macro_f1: label outside the class set");
    if (pi->second == gi->second) {
      tp[pi->second] += 1.0;
    } else {
      fp[pi->second] += 1.0;
      fn[gi->second] += 1.0;
    }
  }
  double total = 0.0;
  for (size_t c = 0; c < classes.size(); ++c) {
    double precision = tp[c] + fp[c] > 0.0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    double recall = tp[c] + fn[c] > 0.0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    double f1 = precision + recall > 0.0
                    ? 2.0 * precision * recall / (precision + recall)
                    : 0.0;
    total += f1;
  }
  return total / double(classes.size());
}

DiagnosticResult diagnostic_eval(
    const std::vector<std::string>& subset_ids,
    const std::map<std::string, std::string>& texts,
    const std::map<std::string, std::string>& weak_labels,
    const std::vector<std::string>& eval_ids,
    const ingest::FrameTaxonomy& taxonomy, const TfidfConfig& tfidf,
    const softmax::Config& train_cfg, const qubo::QuboParams& params) {
  std::vector<std::pair<std::string, std::string>> training;
  training.reserve(subset_ids.size());
  for (const auto& id : subset_ids) {
    training.emplace_back(texts.at(id), weak_labels.at(id));
  }
  FramingModel model =
      train_framing_classifier(training, taxonomy, tfidf, train_cfg);

  std::vector<std::string> predictions, golds;
  predictions.reserve(eval_ids.size());
  for (const auto& id : eval_ids) {
    predictions.push_back(predict_frame(model, texts.at(id)));
    golds.push_back(weak_labels.at(id));
  }

  // redundancy over the subset's own TF-IDF vectors, same vocabulary as the
  // classifier
  std::vector<textfeat::SparseVector> subset_rows;
  subset_rows.reserve(subset_ids.size());
  for (const auto& id : subset_ids) {
    subset_rows.push_back(
        textfeat::transform(model.vocab, textfeat::tokenize(texts.at(id))));
  }
  textfeat::SimilarityMatrix sim = textfeat::cosine_matrix(subset_rows);
  std::vector<size_t> everyone(subset_ids.size());
  std::iota(everyone.begin(), everyone.end(), size_t(0));

  DiagnosticResult result;
  result.macro_f1 = macro_f1(predictions, golds, taxonomy.frames);
  result.redundancy = textfeat::mean_pairwise_similarity(sim, everyone);
  result.subset_size = subset_ids.size();
  result.lambda_rel = params.lambda_rel;
  result.lambda_red = params.lambda_red;
  return result;
}

const char* to_string(Method m) {
  return m == Method::qubo ? "QUBO" : "DistMatch";
}

SweepTable SweepTable::filtered(Method m) const {
  SweepTable out;
  for (const auto& row : rows) {
    if (row.method == m) out.rows.push_back(row);
  }
  return out;
}

SweepTable sweep(const SweepContext& ctx,
                 const std::vector<double>& lambda_conf_grid,
                 const std::vector<double>& lambda_red_grid,
                 const std::vector<uint64_t>& seeds) {
  if (lambda_conf_grid.empty() || lambda_red_grid.empty() || seeds.empty())
    throw std::invalid_argument("sweep: grids and seeds must be non-empty");
  for (const auto& frame : ctx.frames) {
    if (!ctx.budgets.count(frame.frame))
      throw std::invalid_argument("sweep: no budget for frame \"" +
                                  frame.frame + "\"");
  }

  struct Cell {
    double lambda_conf;
    double lambda_red;
    uint64_t seed;
    Method method;
  };
  std::vector<Cell> cells;
  for (double lc : lambda_conf_grid) {
    for (double lr : lambda_red_grid) {
      for (uint64_t seed : seeds) {
        cells.push_back({lc, lr, seed, Method::qubo});
        cells.push_back({lc, lr, seed, Method::distmatch});
      }
    }
  }

  SweepTable table;
  table.rows.resize(cells.size());
  parallel_for(cells.size(), ctx.workers, [&](size_t i) {
    const Cell& cell = cells[i];
    qubo::QuboParams params;
    params.lambda_rel = cell.lambda_conf;
    params.lambda_red = cell.lambda_red;
    params.budget = 0;  // budgets map must cover every frame here
    qubo::CuratedSubset subset;
    if (cell.method == Method::qubo) {
      qubo::AnnealSchedule schedule = ctx.schedule;
      schedule.seed = cell.seed;
      subset = qubo::select_all_frames(ctx.frames, ctx.budgets, params,
                                       schedule, 1);
    } else {
      subset =
          qubo::distmatch_select(ctx.frames, ctx.budgets, params, cell.seed);
    }
    DiagnosticResult diag = diagnostic_eval(
        subset.all_ids(), ctx.texts, ctx.weak_labels, ctx.eval_ids,
        ctx.taxonomy, ctx.tfidf, ctx.train_cfg, params);
    table.rows[i] = SweepRow{cell.lambda_conf, cell.lambda_red, cell.method,
                             cell.seed,        diag.macro_f1,  diag.redundancy};
  });
  return table;
}

std::vector<size_t> pareto_frontier(
    const std::vector<std::pair<double, double>>& points) {
  // plane sweep: sort by F1 descending, then walk groups of equal F1
  // tracking the lowest redundancy seen among strictly better F1 values
  std::vector<size_t> order(points.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (points[a].first != points[b].first)
      return points[a].first > points[b].first;
    return points[a].second < points[b].second;
  });

  std::vector<size_t> frontier;
  double best_red_above = std::numeric_limits<double>::infinity();
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    double group_min_red = points[order[i]].second;
    while (j < order.size() &&
           points[order[j]].first == points[order[i]].first) {
      group_min_red = std::min(group_min_red, points[order[j]].second);
      ++j;
    }
    for (size_t t = i; t < j; ++t) {
      const double red = points[order[t]].second;
      if (red == group_min_red && red < best_red_above) {
        frontier.push_back(order[t]);
      }
    }
    best_red_above = std::min(best_red_above, group_min_red);
    i = j;
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

std::vector<DeltaCell> delta_f1_map(const SweepTable& qubo_table,
                                    const SweepTable& distmatch_table) {
  struct Key {
    double lc, lr;
    uint64_t seed;
    bool operator<(const Key& o) const {
      if (lc != o.lc) return lc < o.lc;
      if (lr != o.lr) return lr < o.lr;
      return seed < o.seed;
    }
  };
  auto cell_name = [](double lc, double lr, uint64_t seed) {
    return "(lambda_conf=" + fmt_double(lc) + ", lambda_red=" + fmt_double(lr) +
           ", seed=" + std::to_string(seed) + ")";
  };
  std::map<Key, double> baseline;
  for (const auto& row : distmatch_table.rows) {
    baseline[{row.lambda_conf, row.lambda_red, row.seed}] = row.macro_f1;
  }

  struct Acc {
    double sum = 0.0;
    size_t count = 0;
  };
  std::vector<std::pair<double, double>> order;
  std::map<std::pair<double, double>, Acc> cells;
  size_t matched = 0;
  for (const auto& row : qubo_table.rows) {
    Key key{row.lambda_conf, row.lambda_red, row.seed};
    auto it = baseline.find(key);
    if (it == baseline.end())
      throw std::invalid_argument(
          "delta_f1_map: no DistMatch cell " +
          cell_name(row.lambda_conf, row.lambda_red, row.seed));
    ++matched;
    auto grid_key = std::make_pair(row.lambda_conf, row.lambda_red);
    auto [acc, inserted] = cells.try_emplace(grid_key);
    if (inserted) order.push_back(grid_key);
    acc->second.sum += row.macro_f1 - it->second;
    acc->second.count += 1;
  }
  if (matched != baseline.size())
    throw std::invalid_argument(
        "delta_f1_map: DistMatch table has cells with no QUBO counterpart");

  std::vector<DeltaCell> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const Acc& acc = cells[key];
    out.push_back({key.first, key.second, acc.sum / double(acc.count)});
  }
  return out;
}

const char* to_string(ConfigId c) {
  switch (c) {
    case ConfigId::S0: return "S0";
    case ConfigId::SD: return "SD";
    case ConfigId::SQ: return "SQ";
    case ConfigId::SN: return "SN";
    case ConfigId::SQshuf: return "SQshuf";
    case ConfigId::FD: return "FD";
    case ConfigId::FQ: return "FQ";
  }
  throw std::logic_error("bad ConfigId");
}

const std::vector<ConfigId>& all_configs() {
  static const std::vector<ConfigId> configs = {
      ConfigId::S0, ConfigId::SD,     ConfigId::SQ, ConfigId::SN,
      ConfigId::SQshuf, ConfigId::FD, ConfigId::FQ};
  return configs;
}

namespace {

// sparse bow block + dense appended block, as one sparse row
std::vector<textfeat::SparseVector> concat_features(
    const std::vector<textfeat::SparseVector>& bow,
    const std::vector<std::vector<double>>& block) {
  if (bow.size() != block.size())
    throw std::invalid_argument("build_features: row misalignment");
  const size_t bow_dim = bow.empty() ? 0 : bow[0].dimension;
  const size_t width = block.empty() ? 0 : block[0].size();
  std::vector<textfeat::SparseVector> out;
  out.reserve(bow.size());
  for (size_t i = 0; i < bow.size(); ++i) {
    if (block[i].size() != width)
      throw std::invalid_argument("build_features: ragged dense block");
    textfeat::SparseVector row = bow[i];
    row.dimension = bow_dim + width;
    for (size_t j = 0; j < width; ++j) {
      row.entries.emplace_back(bow_dim + j, block[i][j]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<textfeat::SparseVector> dense_only(
    const std::vector<std::vector<double>>& block) {
  std::vector<textfeat::SparseVector> out;
  out.reserve(block.size());
  const size_t width = block.empty() ? 0 : block[0].size();
  for (const auto& values : block) {
    if (values.size() != width)
      throw std::invalid_argument("build_features: ragged dense block");
    textfeat::SparseVector row;
    row.dimension = width;
    for (size_t j = 0; j < width; ++j) row.entries.emplace_back(j, values[j]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<textfeat::SparseVector> build_features(
    ConfigId config, const std::vector<textfeat::SparseVector>& bow,
    const std::vector<std::vector<double>>& frames_q,
    const std::vector<std::vector<double>>& frames_d, uint64_t seed) {
  if (bow.size() != frames_q.size() || bow.size() != frames_d.size())
    throw std::invalid_argument("build_features: row misalignment");
  switch (config) {
    case ConfigId::S0:
      return bow;
    case ConfigId::SD:
      return concat_features(bow, frames_d);
    case ConfigId::SQ:
      return concat_features(bow, frames_q);
    case ConfigId::SN: {
      const size_t width = frames_q.empty() ? 0 : frames_q[0].size();
      Rng rng(derive_seed(seed, "noise-block"));
      std::vector<std::vector<double>> noise(frames_q.size());
      for (auto& row : noise) {
        row.resize(width);
        for (double& v : row) v = rng.normal();
      }
      return concat_features(bow, noise);
    }
    case ConfigId::SQshuf: {
      std::vector<size_t> perm(frames_q.size());
      std::iota(perm.begin(), perm.end(), size_t(0));
      Rng rng(derive_seed(seed, "shuffle-block"));
      rng.shuffle(perm);
      std::vector<std::vector<double>> shuffled(frames_q.size());
      for (size_t i = 0; i < perm.size(); ++i) shuffled[i] = frames_q[perm[i]];
      return concat_features(bow, shuffled);
    }
    case ConfigId::FD:
      return dense_only(frames_d);
    case ConfigId::FQ:
      return dense_only(frames_q);
  }
  throw std::logic_error("bad ConfigId");
}

std::vector<TransferResult> downstream_experiment(
    const std::vector<ingest::SentimentExample>& gold_train,
    const std::vector<ingest::SentimentExample>& gold_test,
    const FramingModel& framing_q, const FramingModel& framing_d,
    uint64_t seed, const TfidfConfig& tfidf, const softmax::Config& backbone,
    unsigned workers) {
  if (gold_train.empty() || gold_test.empty())
    throw std::invalid_argument("downstream_experiment: empty gold split");

  std::vector<std::string> train_texts, test_texts;
  std::vector<size_t> train_labels, test_labels;
  for (const auto& x : gold_train) {
    train_texts.push_back(x.text);
    train_labels.push_back(size_t(x.sentiment));
  }
  for (const auto& x : gold_test) {
    test_texts.push_back(x.text);
    test_labels.push_back(size_t(x.sentiment));
  }

  std::vector<std::vector<std::string>> train_tokens;
  train_tokens.reserve(train_texts.size());
  for (const auto& t : train_texts)
    train_tokens.push_back(textfeat::tokenize(t));
  textfeat::Vocabulary bow_vocab =
      textfeat::fit_tfidf(train_tokens, tfidf.min_df, tfidf.max_features);

  auto bow_rows = [&](const std::vector<std::string>& texts) {
    std::vector<textfeat::SparseVector> rows;
    rows.reserve(texts.size());
    for (const auto& t : texts)
      rows.push_back(textfeat::bow_features(bow_vocab, textfeat::tokenize(t)));
    return rows;
  };
  const std::vector<textfeat::SparseVector> bow_train = bow_rows(train_texts);
  const std::vector<textfeat::SparseVector> bow_test = bow_rows(test_texts);

  const auto frames_q_train = frame_probabilities(framing_q, train_texts);
  const auto frames_q_test = frame_probabilities(framing_q, test_texts);
  const auto frames_d_train = frame_probabilities(framing_d, train_texts);
  const auto frames_d_test = frame_probabilities(framing_d, test_texts);

  const uint64_t train_seed = derive_seed(seed, "gold-train");
  const uint64_t test_seed = derive_seed(seed, "gold-test");
  const std::vector<std::string> classes = {"positive", "neutral", "negative"};

  const auto& configs = all_configs();
  std::vector<TransferResult> results(configs.size());
  parallel_for(configs.size(), workers, [&](size_t i) {
    const ConfigId config = configs[i];
    auto x_train =
        build_features(config, bow_train, frames_q_train, frames_d_train,
                       train_seed);
    auto x_test = build_features(config, bow_test, frames_q_test,
                                 frames_d_test, test_seed);
    const size_t width = x_train.empty() ? 0 : x_train[0].dimension;
    softmax::Model head =
        softmax::train(x_train, train_labels, classes.size(), width, backbone);

    size_t correct = 0;
    std::vector<std::string> predictions, golds;
    predictions.reserve(x_test.size());
    for (size_t t = 0; t < x_test.size(); ++t) {
      size_t predicted = softmax::predict_class(head, x_test[t]);
      if (predicted == test_labels[t]) ++correct;
      predictions.push_back(classes[predicted]);
      golds.push_back(classes[test_labels[t]]);
    }
    results[i] = TransferResult{
        config, double(correct) / double(x_test.size()),
        macro_f1(predictions, golds, classes)};
  });
  return results;
}

std::string sweep_to_csv(const SweepTable& table) {
  // the pareto flag marks non-dominated QUBO configurations
  std::vector<size_t> qubo_rows;
  std::vector<std::pair<double, double>> points;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].method == Method::qubo) {
      qubo_rows.push_back(i);
      points.emplace_back(table.rows[i].macro_f1, table.rows[i].redundancy);
    }
  }
  std::vector<char> flag(table.rows.size(), 0);
  for (size_t p : pareto_frontier(points)) flag[qubo_rows[p]] = 1;

  std::string out = "lambda_conf,lambda_red,method,seed,macro_f1,redundancy,pareto\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& row = table.rows[i];
    out += fmt_double(row.lambda_conf) + "," + fmt_double(row.lambda_red) +
           "," + to_string(row.method) + "," + std::to_string(row.seed) + "," +
           fmt_double(row.macro_f1) + "," + fmt_double(row.redundancy) + "," +
           (flag[i] ? "1" : "0") + "\n";
  }
  return out;
}

std::string delta_map_to_csv(const std::vector<DeltaCell>& cells) {
  std::string out = "lambda_conf,lambda_red,delta_f1\n";
  for (const auto& cell : cells) {
    out += fmt_double(cell.lambda_conf) + "," + fmt_double(cell.lambda_red) +
           "," + fmt_double(cell.delta_f1) + "\n";
  }
  return out;
}

std::string transfer_to_csv(const std::vector<TransferResult>& results) {
  std::string out = "config,accuracy,macro_f1\n";
  for (const auto& r : results) {
    out += std::string(to_string(r.config)) + "," + fmt_double(r.accuracy) +
           "," + fmt_double(r.macro_f1) + "\n";
  }
  return out;
}

}  // namespace qurate::eval
