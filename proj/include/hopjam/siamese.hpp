#pragma once

// Twin convolutional network with one shared parameter set, a weighted-L1
// similarity head p = sigmoid(sum_j alpha_j |h1_j - h2_j|), binary
// cross-entropy training on matching pairs with Adam, and support-set
// classification.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopjam/dataset.hpp"
#include "hopjam/exec.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/layers.hpp"

namespace hopjam::siamese {

struct ConvSpec {
  std::size_t channels = 16;  // multiple of 16
  std::size_t kernel = 3;
  bool pool = true;  // 2 x 2 max pooling after the ReLU

  bool operator==(const ConvSpec&) const = default;
};

struct Architecture {
  std::size_t input_side = 105;
  std::size_t input_channels = 3;
  std::vector<ConvSpec> convs;
  std::size_t embedding = 4096;

  /// 64@10 -> 128@7 -> 128@4 -> 256@4 on 105 x 105 x 3, pooled after blocks
  /// 1 to 3, 4096-dimensional embedding.
  static Architecture paper();
  /// Reduced network for 48 x 48 inputs, sized for single-core runs.
  static Architecture desk();

  /// Input shape of conv block i (i == convs.size() gives the flattened
  /// feature map shape after the last block).
  std::vector<layers::Shape3> block_shapes() const;
  std::size_t feature_size() const;
  /// Throws ConfigError (bad counts) or DimensionError (maps collapse).
  void validate() const;

  nlohmann::json to_json() const;
  static Architecture from_json(const nlohmann::json& j);
  bool operator==(const Architecture&) const = default;
};

struct ParamGroup {
  std::string name;                 // e.g. "conv1.kernel", "fc.weight", "alpha"
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// The single parameter copy shared by both twins.  Group order is
/// conv1.kernel, conv1.bias, ..., convL.bias, fc.weight, fc.bias, alpha.
struct ModelParameters {
  Architecture arch;
  std::vector<ParamGroup> groups;

  /// Zero-filled parameters (also used as a gradient buffer).
  static ModelParameters zeros(const Architecture& arch);

  ParamGroup& conv_kernel(std::size_t i) { return groups[2 * i]; }
  ParamGroup& conv_bias(std::size_t i) { return groups[2 * i + 1]; }
  ParamGroup& fc_weight() { return groups[2 * arch.convs.size()]; }
  ParamGroup& fc_bias() { return groups[2 * arch.convs.size() + 1]; }
  ParamGroup& alpha() { return groups[2 * arch.convs.size() + 2]; }
  const ParamGroup& conv_kernel(std::size_t i) const { return groups[2 * i]; }
  const ParamGroup& conv_bias(std::size_t i) const { return groups[2 * i + 1]; }
  const ParamGroup& fc_weight() const { return groups[2 * arch.convs.size()]; }
  const ParamGroup& fc_bias() const { return groups[2 * arch.convs.size() + 1]; }
  const ParamGroup& alpha() const { return groups[2 * arch.convs.size() + 2]; }

  std::size_t count() const;
  void fill(double v);
  /// this += other, group by group.
  void add(const ModelParameters& other);
  void scale(double s);
  bool same_shape(const ModelParameters& other) const;
  bool operator==(const ModelParameters& other) const;
};

struct InitConfig {
  // Normal distributions written N(mean, variance) = N(0, 0.01) and
  // N(0.5, 0.01); the standard deviations are therefore 0.1.
  double weight_std = 0.1;
  double bias_mean = 0.5;
  double bias_std = 0.1;
  double alpha_std = 0.1;

  nlohmann::json to_json() const;
  static InitConfig from_json(const nlohmann::json& j);
};

ModelParameters init_parameters(const Architecture& arch, const InitConfig& init, std::uint64_t seed);

// ---- forward / backward -----------------------------------------------------

/// Intermediate values of one embedding pass, kept for backpropagation.
struct EmbedTrace {
  std::vector<std::vector<double>> block_in;       // input of each conv
  std::vector<std::vector<double>> block_act;      // post-ReLU conv output
  std::vector<std::vector<std::uint32_t>> argmax;  // pooling selections
  std::vector<double> features;                    // flattened last block
  std::vector<double> embedding;                   // sigmoid(fc)
};

/// Image tensor in CHW order with values in [0, 1].
using Tensor = std::vector<double>;

/// Throws DimensionError when the tensor does not match the architecture.
std::vector<double> forward_embed(const ModelParameters& params, std::span<const double> image,
                                  Exec exec = Exec::serial);
std::vector<double> forward_embed(const ModelParameters& params, const imgprep::CompositeImage& image,
                                  Exec exec = Exec::serial);
EmbedTrace forward_embed_traced(const ModelParameters& params, std::span<const double> image,
                                Exec exec = Exec::serial);

/// Pre-sigmoid score sum_j alpha_j |h1_j - h2_j|.
double pair_logit(std::span<const double> alpha, std::span<const double> h1, std::span<const double> h2);
double pair_probability(std::span<const double> alpha, std::span<const double> h1, std::span<const double> h2);

double forward_pair(const ModelParameters& params, std::span<const double> a, std::span<const double> b,
                    Exec exec = Exec::serial);

inline constexpr double kLossClamp = 1e-7;

/// -[y ln p + (1 - y) ln(1 - p)] with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, bool same);
double bce_loss(std::span<const double> p, const std::vector<bool>& same);

struct PairRef {
  std::span<const double> a;
  std::span<const double> b;
  bool same = false;
};

/// Mean binary cross-entropy of the batch; accumulates the exact gradient of
/// that mean into `grads` (+=).  Throws NumericalError naming the parameter
/// group if a gradient is not finite.
double loss_and_gradient(const ModelParameters& params, std::span<const PairRef> batch,
                         ModelParameters& grads, Exec exec = Exec::serial);

// ---- optimizer ----------------------------------------------------------------

struct AdamConfig {
  double lr0 = 6e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double decay_factor = 0.99;     // multiplicative decay ...
  std::size_t decay_every = 100;  // ... applied every this many iterations

  /// Learning rate used at (0-based) iteration `it`.
  double learning_rate(std::size_t it) const;
  nlohmann::json to_json() const;
  static AdamConfig from_json(const nlohmann::json& j);
};

struct AdamState {
  ModelParameters m;
  ModelParameters v;
  std::uint64_t step = 0;

  static AdamState fresh(const ModelParameters& like);
};

void adam_step(ModelParameters& params, const ModelParameters& grads, AdamState& state,
               const AdamConfig& cfg, double lr);

// ---- training ---------------------------------------------------------------

struct TrainConfig {
  std::size_t iterations = 2000;
  std::size_t pairs_per_iteration = 180;
  double same_fraction = 0.5;
  AdamConfig adam;
  InitConfig init;
  std::uint64_t seed = 0;
  /// Evaluate pairs of a batch concurrently and reduce their gradients in
  /// chunk order.  Deterministic for a fixed thread count but not bit-equal
  /// to the single-threaded path.
  bool data_parallel = false;
  /// Divergence: loss above factor x initial for `patience` consecutive iterations.
  double divergence_factor = 10.0;
  std::size_t divergence_patience = 50;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainResult {
  ModelParameters params;
  std::vector<double> loss_trace;  // mean batch loss per iteration
  std::vector<double> lr_trace;
  std::size_t pairs_consumed = 0;
};

/// Tensors of every record that has an image, keyed by record index.
using ImageStore = std::map<std::size_t, Tensor>;

/// Loads the composite image of each listed record from the corpus directory.
ImageStore load_images(const dataset::Manifest& m, const std::string& corpus_dir,
                       std::span<const std::size_t> indices);

using ProgressFn = std::function<void(std::size_t iteration, double loss)>;

/// Trains from init_parameters(arch, cfg.init, derive_seed(seed, "init"));
/// iteration i draws its pairs with derive_seed(derive_seed(seed, "pairs"), i).
TrainResult train(const Architecture& arch, const TrainConfig& cfg, const dataset::Manifest& m,
                  const ImageStore& images, Exec exec = Exec::serial, const ProgressFn& progress = {});

/// Trailing moving average with the given window (shorter at the start).
std::vector<double> smooth(std::span<const double> trace, std::size_t window);

// ---- classification -----------------------------------------------------------

inline constexpr std::size_t kClassCount = 10;

struct SupportSet {
  /// Embeddings of the exemplars of each class.
  std::array<std::vector<std::vector<double>>, kClassCount> exemplars;
};

struct Classification {
  int class_id = 0;
  std::array<double, kClassCount> scores{};
};

/// Mean pair probability against each class's exemplars; argmax with ties to
/// the lowest class id.  Throws SamplingError if a class has no exemplar.
Classification classify(const ModelParameters& params, std::span<const double> query_embedding,
                        const SupportSet& support);

/// Record indices of k train exemplars per class, drawn without replacement.
std::array<std::vector<std::size_t>, kClassCount> draw_support(const dataset::Manifest& m, std::size_t k,
                                                               std::uint64_t seed);

struct EvalConfig {
  std::size_t support_per_class = 5;
  std::size_t support_draws = 3;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::size_t n_queries = 0;
  double accuracy = 0.0;  // over all queries and draws
  std::map<double, double> accuracy_by_jsr;
  std::map<double, std::size_t> queries_by_jsr;
  double mean_over_jsr = 0.0;  // unweighted mean of accuracy_by_jsr
  std::array<std::array<std::size_t, kClassCount>, kClassCount> confusion{};  // [true][predicted]

  nlohmann::json to_json() const;
};

/// Classifies every query against `support_draws` independent support sets
/// taken from `support_manifest`.  Queries index into `query_manifest`.
EvalReport evaluate(const ModelParameters& params, const dataset::Manifest& support_manifest,
                    const ImageStore& support_images, const dataset::Manifest& query_manifest,
                    const ImageStore& query_images, std::span<const std::size_t> queries,
                    const EvalConfig& cfg, Exec exec = Exec::parallel);

// ---- checkpoint ---------------------------------------------------------------

inline constexpr int kCheckpointFormatVersion = 1;

/// "HJSIAMCK", u64 header length, header JSON {format_version, architecture,
/// step, groups: [{name, shape}]}, then every group as little-endian f64.
void save_checkpoint(const std::string& path, const ModelParameters& params, std::uint64_t step,
                     const nlohmann::json& extra = {});

struct Checkpoint {
  ModelParameters params;
  std::uint64_t step = 0;
  nlohmann::json extra;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace hopjam::siamese
