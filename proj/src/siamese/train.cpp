#include <algorithm>
#include <cmath>
#include <exception>

#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::siamese {

using jsonutil::get_or;

void TrainConfig::validate() const {
  if (iterations == 0) throw ConfigError("train.iterations must be positive");
  if (pairs_per_iteration == 0) throw ConfigError("train.pairs_per_iteration must be positive");
  if (!(same_fraction >= 0 && same_fraction <= 1)) throw ConfigError("train.same_fraction must lie in [0, 1]");
  if (!(divergence_factor > 1)) throw ConfigError("train.divergence_factor must exceed 1");
  if (divergence_patience == 0) throw ConfigError("train.divergence_patience must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"iterations", iterations},
          {"pairs_per_iteration", pairs_per_iteration},
          {"same_fraction", same_fraction},
          {"adam", adam.to_json()},
          {"init", init.to_json()},
          {"seed", seed},
          {"data_parallel", data_parallel},
          {"divergence_factor", divergence_factor},
          {"divergence_patience", divergence_patience}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  const std::string where = "train";
  TrainConfig c;
  c.iterations = get_or(j, "iterations", c.iterations, where);
  c.pairs_per_iteration = get_or(j, "pairs_per_iteration", c.pairs_per_iteration, where);
  c.same_fraction = get_or(j, "same_fraction", c.same_fraction, where);
  if (j.is_object() && j.contains("adam")) c.adam = AdamConfig::from_json(j.at("adam"));
  if (j.is_object() && j.contains("init")) c.init = InitConfig::from_json(j.at("init"));
  c.seed = get_or(j, "seed", c.seed, where);
  c.data_parallel = get_or(j, "data_parallel", c.data_parallel, where);
  c.divergence_factor = get_or(j, "divergence_factor", c.divergence_factor, where);
  c.divergence_patience = get_or(j, "divergence_patience", c.divergence_patience, where);
  c.validate();
  return c;
}

ImageStore load_images(const dataset::Manifest& m, const std::string& corpus_dir,
                       std::span<const std::size_t> indices) {
  std::vector<Tensor> tensors(indices.size());
  for_each_index(Exec::parallel, indices.size(), [&](std::size_t k) {
    const auto& rec = m.records.at(indices[k]);
    if (rec.image_path.empty()) throw IoError("record " + std::to_string(rec.id) + " has no rendered image");
    tensors[k] = imgprep::read_composite((std::filesystem::path(corpus_dir) / rec.image_path).string()).to_tensor();
  });
  ImageStore store;
  for (std::size_t k = 0; k < indices.size(); ++k) store.emplace(indices[k], std::move(tensors[k]));
  return store;
}

namespace {

const Tensor& image_of(const ImageStore& images, std::size_t idx) {
  const auto it = images.find(idx);
  if (it == images.end()) throw IoError("no image loaded for record index " + std::to_string(idx));
  return it->second;
}

// Splits the batch into thread_count() contiguous chunks evaluated
// concurrently; chunk gradients are reduced in chunk order.
double data_parallel_step(const ModelParameters& params, std::span<const PairRef> batch, ModelParameters& grads) {
  const std::size_t n_chunks = std::min<std::size_t>(batch.size(), static_cast<std::size_t>(std::max(1, thread_count())));
  std::vector<ModelParameters> partial(n_chunks, grads);
  std::vector<double> losses(n_chunks, 0.0);
  std::vector<std::exception_ptr> errors(n_chunks);
  for (auto& p : partial) p.fill(0.0);
  const double total = static_cast<double>(batch.size());
  for_each_index(Exec::parallel, n_chunks, [&](std::size_t c) {
    const std::size_t lo = c * batch.size() / n_chunks, hi = (c + 1) * batch.size() / n_chunks;
    try {
      const double share = static_cast<double>(hi - lo) / total;
      losses[c] = share * loss_and_gradient(params, batch.subspan(lo, hi - lo), partial[c], Exec::serial);
      partial[c].scale(share);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    grads.add(partial[c]);
    loss += losses[c];
  }
  return loss;
}

}  // namespace

TrainResult train(const Architecture& arch, const TrainConfig& cfg, const dataset::Manifest& m,
                  const ImageStore& images, Exec exec, const ProgressFn& progress) {
  cfg.validate();
  arch.validate();
  if (m.indices(dataset::Split::Train).empty()) throw SamplingError("training split is empty");

  TrainResult result{init_parameters(arch, cfg.init, derive_seed(cfg.seed, "init")), {}, {}, 0};
  ModelParameters& params = result.params;
  ModelParameters grads = ModelParameters::zeros(arch);
  AdamState state = AdamState::fresh(params);
  const std::uint64_t pair_seed = derive_seed(cfg.seed, "pairs");
  std::size_t above = 0;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    try {
      const auto pairs = dataset::sample_pairs(m, cfg.pairs_per_iteration, derive_seed(pair_seed, it), cfg.same_fraction);
      std::vector<PairRef> batch;
      batch.reserve(pairs.size());
      for (const auto& pr : pairs) batch.push_back({image_of(images, pr.a), image_of(images, pr.b), pr.same});

      grads.fill(0.0);
      const double loss =
          cfg.data_parallel ? data_parallel_step(params, batch, grads) : loss_and_gradient(params, batch, grads, exec);
      if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");
      const double lr = cfg.adam.learning_rate(it);
      adam_step(params, grads, state, cfg.adam, lr);
      result.loss_trace.push_back(loss);
      result.lr_trace.push_back(lr);
      result.pairs_consumed += batch.size();

      above = loss > cfg.divergence_factor * result.loss_trace.front() ? above + 1 : 0;
      if (above >= cfg.divergence_patience) {
        throw NumericalError("training diverged: loss " + std::to_string(loss) + " exceeded " +
                             std::to_string(cfg.divergence_factor) + " x initial loss " +
                             std::to_string(result.loss_trace.front()) + " for " + std::to_string(above) +
                             " consecutive iterations");
      }
    } catch (...) {
      rethrow_with_context(std::current_exception(), "iteration " + std::to_string(it));
    }
    if (progress) progress(it, result.loss_trace.back());
  }
  return result;
}

std::vector<double> smooth(std::span<const double> trace, std::size_t window) {
  if (window == 0) window = 1;
  std::vector<double> out(trace.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    acc += trace[i];
    if (i >= window) acc -= trace[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace hopjam::siamese
