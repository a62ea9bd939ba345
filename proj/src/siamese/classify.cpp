#include <algorithm>
#include <numeric>
#include <set>

#include "hopjam/error.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::siamese {

Classification classify(const ModelParameters& params, std::span<const double> query_embedding,
                        const SupportSet& support) {
  Classification out;
  const auto& alpha = params.alpha().values;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& ex = support.exemplars[c];
    if (ex.empty()) throw SamplingError("support set has no exemplar of class " + std::to_string(c));
    double acc = 0.0;
    for (const auto& e : ex) acc += pair_probability(alpha, query_embedding, e);
    out.scores[c] = acc / static_cast<double>(ex.size());
  }
  // max_element returns the first maximum, i.e. the lowest class id on ties.
  out.class_id = static_cast<int>(std::max_element(out.scores.begin(), out.scores.end()) - out.scores.begin());
  return out;
}

std::array<std::vector<std::size_t>, kClassCount> draw_support(const dataset::Manifest& m, std::size_t k,
                                                               std::uint64_t seed) {
  if (k == 0) throw ConfigError("support size per class must be positive");
  std::array<std::vector<std::size_t>, kClassCount> by_class;
  for (std::size_t idx : m.indices(dataset::Split::Train)) {
    const int c = m.records[idx].class_id;
    if (c >= 0 && static_cast<std::size_t>(c) < kClassCount) by_class[static_cast<std::size_t>(c)].push_back(idx);
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    auto& v = by_class[c];
    if (v.empty()) throw SamplingError("train split has no sample of class " + std::to_string(c));
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::shuffle(v.begin(), v.end(), rng);
    v.resize(std::min(k, v.size()));
  }
  return by_class;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json by_jsr = nlohmann::json::array();
  for (const auto& [jsr, acc] : accuracy_by_jsr) {
    by_jsr.push_back({{"jsr_db", jsr}, {"accuracy", acc}, {"queries", queries_by_jsr.at(jsr)}});
  }
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& row : confusion) conf.push_back(row);
  return {{"queries", n_queries},
          {"accuracy", accuracy},
          {"mean_over_jsr", mean_over_jsr},
          {"by_jsr", by_jsr},
          {"confusion", conf}};
}

namespace {

std::vector<std::vector<double>> embed_all(const ModelParameters& params, const ImageStore& images,
                                           std::span<const std::size_t> indices, Exec exec) {
  std::vector<std::vector<double>> out(indices.size());
  for_each_index(exec, indices.size(), [&](std::size_t i) {
    const auto it = images.find(indices[i]);
    if (it == images.end()) throw IoError("no image loaded for record index " + std::to_string(indices[i]));
    out[i] = forward_embed(params, it->second, Exec::serial);
  });
  return out;
}

}  // namespace

EvalReport evaluate(const ModelParameters& params, const dataset::Manifest& support_manifest,
                    const ImageStore& support_images, const dataset::Manifest& query_manifest,
                    const ImageStore& query_images, std::span<const std::size_t> queries, const EvalConfig& cfg,
                    Exec exec) {
  if (queries.empty()) throw SamplingError("no queries to evaluate");
  if (cfg.support_draws == 0) throw ConfigError("support draws must be positive");

  std::vector<std::array<std::vector<std::size_t>, kClassCount>> draws;
  std::set<std::size_t> needed;
  for (std::size_t d = 0; d < cfg.support_draws; ++d) {
    draws.push_back(draw_support(support_manifest, cfg.support_per_class, derive_seed(cfg.seed, d)));
    for (const auto& v : draws.back()) needed.insert(v.begin(), v.end());
  }
  const std::vector<std::size_t> support_idx(needed.begin(), needed.end());
  const auto support_emb = embed_all(params, support_images, support_idx, exec);
  std::map<std::size_t, const std::vector<double>*> emb_of;
  for (std::size_t i = 0; i < support_idx.size(); ++i) emb_of[support_idx[i]] = &support_emb[i];

  std::vector<SupportSet> sets(draws.size());
  for (std::size_t d = 0; d < draws.size(); ++d) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      for (std::size_t idx : draws[d][c]) sets[d].exemplars[c].push_back(*emb_of.at(idx));
    }
  }

  const auto query_emb = embed_all(params, query_images, queries, exec);
  std::vector<std::vector<int>> predicted(queries.size(), std::vector<int>(draws.size()));
  for_each_index(exec, queries.size(), [&](std::size_t q) {
    for (std::size_t d = 0; d < draws.size(); ++d) predicted[q][d] = classify(params, query_emb[q], sets[d]).class_id;
  });

  EvalReport r;
  r.n_queries = queries.size();
  std::map<double, std::size_t> correct_by_jsr;
  std::size_t correct = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& rec = query_manifest.records.at(queries[q]);
    r.queries_by_jsr[rec.jsr_db] += 1;
    correct_by_jsr[rec.jsr_db] += 0;
    for (int p : predicted[q]) {
      r.confusion.at(static_cast<std::size_t>(rec.class_id)).at(static_cast<std::size_t>(p)) += 1;
      if (p == rec.class_id) {
        ++correct;
        ++correct_by_jsr[rec.jsr_db];
      }
    }
  }
  const double per_query = static_cast<double>(draws.size());
  r.accuracy = static_cast<double>(correct) / (per_query * static_cast<double>(queries.size()));
  double sum = 0.0;
  for (const auto& [jsr, n] : r.queries_by_jsr) {
    const double acc = static_cast<double>(correct_by_jsr[jsr]) / (per_query * static_cast<double>(n));
    r.accuracy_by_jsr[jsr] = acc;
    sum += acc;
  }
  r.mean_over_jsr = sum / static_cast<double>(r.accuracy_by_jsr.size());
  return r;
}

}  // namespace hopjam::siamese
