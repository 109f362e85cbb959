#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "qurate/evaluation.hpp"
#include "qurate/rng.hpp"

using namespace qurate;
using namespace qurate::eval;

TEST_CASE("macro_f1 closed forms") {
  std::vector<std::string> classes = {"a", "b", "c"};

  // perfect over balanced classes
  CHECK(macro_f1({"a", "b", "c"}, {"a", "b", "c"}, classes) == 1.0);

  // TP1=1 FP1=1 FN1=0; TP2=0 FP2=0 FN2=1 -> (2/3 + 0)/2 = 1/3
  CHECK(macro_f1({"a", "a"}, {"a", "b"}, {"a", "b"}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // everything wrong
  CHECK(macro_f1({"b", "c", "a"}, {"a", "b", "c"}, classes) == 0.0);

  // class absent from both sides contributes zero
  CHECK(macro_f1({"a", "a"}, {"a", "a"}, classes) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS(macro_f1({"a"}, {"a", "b"}, classes));
  CHECK_THROWS(macro_f1({"zzz"}, {"a"}, classes));
}

TEST_CASE("macro_f1 is 1 exactly when every class is predicted perfectly") {
  std::vector<std::string> classes = {"a", "b", "c"};
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> golds, preds;
    for (int i = 0; i < 12; ++i) {
      golds.push_back(classes[rng.uniform_index(3)]);
      preds.push_back(rng.uniform() < 0.8 ? golds.back()
                                          : classes[rng.uniform_index(3)]);
    }
    std::set<std::string> present(golds.begin(), golds.end());
    double f1 = macro_f1(preds, golds, classes);
    if (preds == golds && present.size() == classes.size()) {
      CHECK(f1 == 1.0);
    } else {
      CHECK(f1 < 1.0);
    }
  }
}

TEST_CASE("framing classifier separates disjoint vocabularies") {
  auto taxonomy = ingest::make_taxonomy({"X", "Y"});
  std::vector<std::pair<std::string, std::string>> training = {
      {"apple orange banana", "X"}, {"apple kiwi", "X"},
      {"engine brake wheel", "Y"},  {"wheel piston", "Y"}};
  FramingModel model = train_framing_classifier(training, taxonomy);
  CHECK(predict_frame(model, "banana apple") == "X");
  CHECK(predict_frame(model, "piston engine") == "Y");

  auto probs = frame_probabilities(model, {"apple", "wheel", "zzz"});
  REQUIRE(probs.size() == 3);
  for (const auto& row : probs) {
    double sum = 0.0;
    for (double p : row) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  // all-OOV rows are the bias-only distribution, identical across texts
  auto oov = frame_probabilities(model, {"zzz", "qqq www"});
  CHECK(oov[0] == oov[1]);

  CHECK_THROWS(train_framing_classifier({{"apple", "X"}, {"pear", "X"}},
                                        taxonomy));
}

TEST_CASE("pareto frontier on the documented cases") {
  // single point
  CHECK(pareto_frontier({{0.5, 0.5}}) == std::vector<size_t>{0});
  // strict domination
  CHECK(pareto_frontier({{0.8, 0.2}, {0.7, 0.3}}) == std::vector<size_t>{0});
  // trade-off keeps both
  CHECK(pareto_frontier({{0.8, 0.3}, {0.7, 0.1}}) ==
        std::vector<size_t>{0, 1});
  // duplicates of a frontier point are all retained
  CHECK(pareto_frontier({{0.8, 0.2}, {0.8, 0.2}, {0.5, 0.5}}) ==
        std::vector<size_t>{0, 1});
  // equal F1, lower redundancy dominates
  CHECK(pareto_frontier({{0.8, 0.2}, {0.8, 0.1}}) == std::vector<size_t>{1});
}

TEST_CASE("pareto frontier contains the extreme points") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < 60; ++i) {
      points.emplace_back(rng.uniform(), rng.uniform());
    }
    auto frontier = pareto_frontier(points);
    REQUIRE(!frontier.empty());
    std::set<size_t> on(frontier.begin(), frontier.end());

    size_t best_f1 = 0, best_red = 0;
    for (size_t i = 1; i < points.size(); ++i) {
      if (points[i].first > points[best_f1].first) best_f1 = i;
      if (points[i].second < points[best_red].second) best_red = i;
    }
    CHECK(on.count(best_f1) == 1);
    CHECK(on.count(best_red) == 1);
  }
}

TEST_CASE("delta map arithmetic and validation") {
  SweepTable qubo_rows, dist_rows;
  qubo_rows.rows = {{0.5, 0.3, Method::qubo, 1, 0.74, 0.2},
                    {0.5, 0.3, Method::qubo, 2, 0.76, 0.2}};
  dist_rows.rows = {{0.5, 0.3, Method::distmatch, 1, 0.71, 0.3},
                    {0.5, 0.3, Method::distmatch, 2, 0.71, 0.3}};
  auto cells = delta_f1_map(qubo_rows, dist_rows);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].delta_f1 == doctest::Approx(0.04).epsilon(1e-12));

  // identical tables -> identically zero
  auto self_rows = qubo_rows;
  for (auto& row : self_rows.rows) row.method = Method::distmatch;
  auto zero = delta_f1_map(qubo_rows, self_rows);
  for (const auto& cell : zero) CHECK(cell.delta_f1 == 0.0);

  // missing cell errors and names the cell
  SweepTable missing = dist_rows;
  missing.rows.pop_back();
  CHECK_THROWS_WITH_AS(delta_f1_map(qubo_rows, missing),
                       doctest::Contains("seed=2"), std::invalid_argument);
  // extra baseline cells are also a mismatch
  SweepTable extra = dist_rows;
  extra.rows.push_back({0.9, 0.3, Method::distmatch, 1, 0.5, 0.1});
  CHECK_THROWS(delta_f1_map(qubo_rows, extra));
}

namespace {

std::vector<std::vector<double>> constant_rows(size_t n, size_t width,
                                               double value) {
  return std::vector<std::vector<double>>(n,
                                          std::vector<double>(width, value));
}

}  // namespace

TEST_CASE("build_features assembles the seven configurations") {
  std::vector<textfeat::SparseVector> bow(4);
  for (size_t i = 0; i < 4; ++i) {
    bow[i].dimension = 10;
    bow[i].entries = {{i, 1.0}};
  }
  std::vector<std::vector<double>> fq = {{0.9, 0.1}, {0.8, 0.2},
                                         {0.7, 0.3}, {0.6, 0.4}};
  auto fd = constant_rows(4, 2, 0.5);

  auto s0 = build_features(ConfigId::S0, bow, fq, fd, 1);
  CHECK(s0[0].dimension == 10);

  auto sq = build_features(ConfigId::SQ, bow, fq, fd, 1);
  CHECK(sq[0].dimension == 12);
  CHECK(sq[1].entries.back().second == 0.2);

  auto sn = build_features(ConfigId::SN, bow, fq, fd, 1);
  CHECK(sn[0].dimension == 12);
  // seeded noise differs from the frame block and between seeds
  CHECK(sn[0].entries.back().second != sq[0].entries.back().second);
  auto sn_again = build_features(ConfigId::SN, bow, fq, fd, 1);
  CHECK(sn[0].entries == sn_again[0].entries);
  auto sn_other = build_features(ConfigId::SN, bow, fq, fd, 2);
  CHECK(sn[0].entries != sn_other[0].entries);

  auto shuf = build_features(ConfigId::SQshuf, bow, fq, fd, 1);
  CHECK(shuf[0].dimension == 12);
  // the frame blocks form the same multiset, only row order differs
  std::multiset<double> original, shuffled;
  for (size_t i = 0; i < 4; ++i) {
    original.insert(fq[i][0]);
    shuffled.insert(shuf[i].entries[shuf[i].entries.size() - 2].second);
  }
  CHECK(original == shuffled);

  auto fq_only = build_features(ConfigId::FQ, bow, fq, fd, 1);
  CHECK(fq_only[0].dimension == 2);
  CHECK(fq_only[0].entries.size() == 2);
  auto fd_only = build_features(ConfigId::FD, bow, fq, fd, 1);
  CHECK(fd_only[2].entries[0].second == 0.5);

  // misaligned rows are rejected
  std::vector<std::vector<double>> short_block = {{0.5, 0.5}};
  CHECK_THROWS(build_features(ConfigId::SQ, bow, short_block, fd, 1));
}

namespace {

// synthetic scored pool: texts carry their frame's vocabulary; a fraction of
// weak labels are wrong, and reliability tracks label correctness
struct PlantedPool {
  std::vector<reliability::ScoredInstance> scored;
  std::map<std::string, std::string> texts;
  std::map<std::string, std::string> labels;
  std::vector<std::string> eval_ids;
  ingest::FrameTaxonomy taxonomy = ingest::make_taxonomy({"P", "Q", "R"});
};

PlantedPool planted_pool(size_t per_frame, double wrong_rate, uint64_t seed) {
  PlantedPool pool;
  Rng rng(seed);
  const std::vector<std::vector<std::string>> vocab = {
      {"pa", "pb", "pc", "pd", "pe", "pf"},
      {"qa", "qb", "qc", "qd", "qe", "qf"},
      {"ra", "rb", "rc", "rd", "re", "rf"}};
  const std::vector<std::string> shared = {"s1", "s2", "s3", "s4"};
  size_t counter = 0;
  for (size_t f = 0; f < 3; ++f) {
    for (size_t i = 0; i < per_frame + 40; ++i) {
      std::string id = "p" + std::to_string(counter++);
      std::string text;
      for (int t = 0; t < 7; ++t) {
        if (t) text += ' ';
        if (rng.uniform() < 0.7) {
          text += vocab[f][rng.uniform_index(6)] + std::to_string(
              rng.uniform_index(3));
        } else {
          text += shared[rng.uniform_index(4)];
        }
      }
      bool wrong = rng.uniform() < wrong_rate;
      size_t label_idx = f;
      if (wrong) label_idx = (f + 1 + rng.uniform_index(2)) % 3;

      if (i < per_frame) {
        reliability::ScoredInstance s;
        s.id = id;
        s.label = pool.taxonomy.frames[label_idx];
        s.critic_score = wrong ? 4 : 7;
        s.reliability = wrong ? 0.05 + 0.3 * rng.uniform()
                              : 0.7 + 0.29 * rng.uniform();
        pool.scored.push_back(s);
        pool.labels[id] = s.label;
      } else {
        pool.eval_ids.push_back(id);
        pool.labels[id] = pool.taxonomy.frames[label_idx];
      }
      pool.texts[id] = text;
    }
  }
  return pool;
}

}  // namespace

TEST_CASE("sweep emits the full grid in canonical order") {
  PlantedPool pool = planted_pool(30, 0.2, 5);
  SweepContext ctx;
  ctx.frames = qubo::build_frame_candidates(pool.scored, pool.texts,
                                            pool.taxonomy, 1, 2000, 1000);
  ctx.budgets = {{"P", 12}, {"Q", 12}, {"R", 12}};
  ctx.schedule = {1.0, 0.999, 2000, 0, 500};
  ctx.texts = pool.texts;
  ctx.weak_labels = pool.labels;
  ctx.eval_ids = pool.eval_ids;
  ctx.taxonomy = pool.taxonomy;
  ctx.train_cfg.max_epochs = 200;
  ctx.workers = 2;

  SweepTable table = sweep(ctx, {0.0, 0.5}, {0.0}, {1, 2});
  REQUIRE(table.rows.size() == 8);  // 2 lambda_conf x 1 lambda_red x 2 seeds x 2 methods
  CHECK(table.rows[0].method == Method::qubo);
  CHECK(table.rows[1].method == Method::distmatch);
  CHECK(table.rows[0].lambda_conf == 0.0);
  CHECK(table.rows[7].lambda_conf == 0.5);

  // same cells regardless of scheduling
  ctx.workers = 1;
  SweepTable serial = sweep(ctx, {0.0, 0.5}, {0.0}, {1, 2});
  for (size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(serial.rows[i].macro_f1 == table.rows[i].macro_f1);
    CHECK(serial.rows[i].redundancy == table.rows[i].redundancy);
  }

  auto delta = delta_f1_map(table.filtered(Method::qubo),
                            table.filtered(Method::distmatch));
  CHECK(delta.size() == 2);

  std::string csv = sweep_to_csv(table);
  CHECK(csv.find("lambda_conf,lambda_red,method,seed,macro_f1,redundancy,"
                 "pareto") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  // at least one QUBO row carries the pareto flag
  CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("reliability-guided selection beats distmatch on planted pools") {
  // paired 20-seed comparison at a mid lambda_conf
  int qubo_wins_or_ties = 0;
  PlantedPool pool = planted_pool(40, 0.35, 77);
  SweepContext ctx;
  ctx.frames = qubo::build_frame_candidates(pool.scored, pool.texts,
                                            pool.taxonomy, 1, 2000, 1000);
  ctx.budgets = {{"P", 14}, {"Q", 14}, {"R", 14}};
  ctx.schedule = {1.0, 0.999, 4000, 0, 1000};
  ctx.texts = pool.texts;
  ctx.weak_labels = pool.labels;
  ctx.eval_ids = pool.eval_ids;
  ctx.taxonomy = pool.taxonomy;
  ctx.train_cfg.max_epochs = 300;

  qubo::QuboParams params{0.7, 0.1, 14};
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    qubo::AnnealSchedule sched = ctx.schedule;
    sched.seed = seed;
    auto subset_q =
        qubo::select_all_frames(ctx.frames, ctx.budgets, params, sched, 1);
    auto subset_d =
        qubo::distmatch_select(ctx.frames, ctx.budgets, params, seed);
    auto diag_q =
        diagnostic_eval(subset_q.all_ids(), ctx.texts, ctx.weak_labels,
                        ctx.eval_ids, ctx.taxonomy, ctx.tfidf, ctx.train_cfg,
                        params);
    auto diag_d =
        diagnostic_eval(subset_d.all_ids(), ctx.texts, ctx.weak_labels,
                        ctx.eval_ids, ctx.taxonomy, ctx.tfidf, ctx.train_cfg,
                        params);
    qubo_wins_or_ties += diag_q.macro_f1 >= diag_d.macro_f1;
  }
  CHECK(qubo_wins_or_ties > 10);
}

TEST_CASE("diagnostic_eval rejects single-frame subsets") {
  PlantedPool pool = planted_pool(10, 0.0, 3);
  std::vector<std::string> one_frame;
  for (const auto& s : pool.scored) {
    if (s.label == "P") one_frame.push_back(s.id);
  }
  CHECK_THROWS(diagnostic_eval(one_frame, pool.texts, pool.labels,
                               pool.eval_ids, pool.taxonomy, {}, {},
                               qubo::QuboParams{}));
}

TEST_CASE("constant frame probabilities reduce FD/FQ to the class prior") {
  Rng rng(8);
  std::vector<ingest::SentimentExample> train, test;
  const char* words[] = {"alpha", "beta", "gamma", "delta"};
  for (int i = 0; i < 120; ++i) {
    ingest::SentimentExample x;
    x.id = "t" + std::to_string(i);
    x.text = std::string(words[rng.uniform_index(4)]) + " " +
             words[rng.uniform_index(4)];
    x.sentiment = i % 5 == 0 ? ingest::Sentiment::negative
                  : (i % 2 ? ingest::Sentiment::neutral
                           : ingest::Sentiment::positive);
    (i < 90 ? train : test).push_back(x);
  }

  // an untrained framing model yields one constant distribution
  auto taxonomy = ingest::make_taxonomy({"A", "B"});
  FramingModel flat;
  flat.frames = taxonomy.frames;
  flat.vocab = textfeat::fit_tfidf({{"unseen"}});
  flat.head = softmax::Model{};
  flat.head.n_features = flat.vocab.size();
  flat.head.n_classes = 2;
  flat.head.weights.assign(2 * flat.vocab.size(), 0.0);
  flat.head.bias.assign(2, 0.0);

  softmax::Config quick;
  quick.max_epochs = 300;
  auto results = downstream_experiment(train, test, flat, flat, 3, {}, quick);
  REQUIRE(results.size() == 7);

  // majority class of the train split
  std::map<ingest::Sentiment, size_t> dist;
  for (const auto& x : train) ++dist[x.sentiment];
  auto majority =
      std::max_element(dist.begin(), dist.end(),
                       [](auto& a, auto& b) { return a.second < b.second; })
          ->first;
  size_t majority_hits = 0;
  for (const auto& x : test) majority_hits += x.sentiment == majority;
  double prior_accuracy = double(majority_hits) / double(test.size());

  for (const auto& r : results) {
    if (r.config == ConfigId::FD || r.config == ConfigId::FQ) {
      CHECK(r.accuracy == doctest::Approx(prior_accuracy).epsilon(1e-12));
    }
  }
  CHECK(results[0].config == ConfigId::S0);
  CHECK(results[6].config == ConfigId::FQ);

  std::string csv = transfer_to_csv(results);
  CHECK(csv.find("config,accuracy,macro_f1\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}
