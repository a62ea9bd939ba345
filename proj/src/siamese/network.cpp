#include <algorithm>
#include <cmath>
#include <random>

#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::siamese {

using jsonutil::get_field;
using jsonutil::get_or;
using layers::Shape3;

// ---- architecture -------------------------------------------------------------

Architecture Architecture::paper() {
  Architecture a;
  a.input_side = 105;
  a.convs = {{64, 10, true}, {128, 7, true}, {128, 4, true}, {256, 4, false}};
  a.embedding = 4096;
  return a;
}

Architecture Architecture::desk() {
  Architecture a;
  a.input_side = 48;
  a.convs = {{16, 4, true}, {32, 3, true}, {32, 3, true}, {48, 2, false}};
  a.embedding = 256;
  return a;
}

std::vector<Shape3> Architecture::block_shapes() const {
  std::vector<Shape3> shapes{{input_channels, input_side, input_side}};
  for (const auto& c : convs) {
    Shape3 s = layers::conv_output_shape(shapes.back(), c.channels, c.kernel);
    if (c.pool) s = layers::pool_output_shape(s);
    shapes.push_back(s);
  }
  return shapes;
}

std::size_t Architecture::feature_size() const { return block_shapes().back().size(); }

void Architecture::validate() const {
  if (input_side == 0 || input_channels == 0) throw ConfigError("architecture: empty input");
  if (convs.empty()) throw ConfigError("architecture: no convolution blocks");
  if (embedding == 0) throw ConfigError("architecture: embedding size must be positive");
  for (std::size_t i = 0; i < convs.size(); ++i) {
    if (convs[i].channels == 0 || convs[i].channels % 16 != 0) {
      throw ConfigError("architecture: conv" + std::to_string(i + 1) + " channel count must be a positive multiple of 16");
    }
    if (convs[i].kernel == 0) throw ConfigError("architecture: conv" + std::to_string(i + 1) + " kernel must be positive");
  }
  const auto shapes = block_shapes();  // throws DimensionError when maps collapse
  if (shapes.back().size() == 0) throw DimensionError("architecture: feature map is empty");
}

nlohmann::json Architecture::to_json() const {
  nlohmann::json convs_j = nlohmann::json::array();
  for (const auto& c : convs) convs_j.push_back({{"channels", c.channels}, {"kernel", c.kernel}, {"pool", c.pool}});
  return {{"input_side", input_side}, {"input_channels", input_channels}, {"convs", convs_j}, {"embedding", embedding}};
}

Architecture Architecture::from_json(const nlohmann::json& j) {
  const std::string where = "architecture";
  Architecture a;
  a.input_side = get_field<std::size_t>(j, "input_side", where);
  a.input_channels = get_or<std::size_t>(j, "input_channels", 3, where);
  a.embedding = get_field<std::size_t>(j, "embedding", where);
  const auto convs_j = get_field<nlohmann::json>(j, "convs", where);
  if (!convs_j.is_array()) throw ConfigError(where + ".convs: expected an array");
  for (std::size_t i = 0; i < convs_j.size(); ++i) {
    const std::string w = where + ".convs[" + std::to_string(i) + "]";
    a.convs.push_back({get_field<std::size_t>(convs_j[i], "channels", w), get_field<std::size_t>(convs_j[i], "kernel", w),
                       get_or<bool>(convs_j[i], "pool", true, w)});
  }
  a.validate();
  return a;
}

// ---- parameters ---------------------------------------------------------------

ModelParameters ModelParameters::zeros(const Architecture& arch) {
  arch.validate();
  ModelParameters p;
  p.arch = arch;
  const auto shapes = arch.block_shapes();
  const auto make = [](std::string name, std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return ParamGroup{std::move(name), std::move(shape), std::vector<double>(n, 0.0)};
  };
  for (std::size_t i = 0; i < arch.convs.size(); ++i) {
    const auto& c = arch.convs[i];
    const std::string prefix = "conv" + std::to_string(i + 1);
    p.groups.push_back(make(prefix + ".kernel", {c.channels, shapes[i].c, c.kernel, c.kernel}));
    p.groups.push_back(make(prefix + ".bias", {c.channels}));
  }
  p.groups.push_back(make("fc.weight", {arch.embedding, shapes.back().size()}));
  p.groups.push_back(make("fc.bias", {arch.embedding}));
  p.groups.push_back(make("alpha", {arch.embedding}));
  return p;
}

std::size_t ModelParameters::count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.values.size();
  return n;
}

void ModelParameters::fill(double v) {
  for (auto& g : groups) std::fill(g.values.begin(), g.values.end(), v);
}

void ModelParameters::add(const ModelParameters& other) {
  if (!same_shape(other)) throw DimensionError("parameter sets differ in shape");
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    auto& dst = groups[gi].values;
    const auto& src = other.groups[gi].values;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void ModelParameters::scale(double s) {
  for (auto& g : groups) {
    for (auto& v : g.values) v *= s;
  }
}

bool ModelParameters::same_shape(const ModelParameters& other) const {
  if (groups.size() != other.groups.size()) return false;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].name != other.groups[i].name || groups[i].shape != other.groups[i].shape) return false;
  }
  return true;
}

bool ModelParameters::operator==(const ModelParameters& other) const {
  if (!(arch == other.arch) || !same_shape(other)) return false;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].values != other.groups[i].values) return false;
  }
  return true;
}

nlohmann::json InitConfig::to_json() const {
  return {{"weight_std", weight_std}, {"bias_mean", bias_mean}, {"bias_std", bias_std}, {"alpha_std", alpha_std}};
}

InitConfig InitConfig::from_json(const nlohmann::json& j) {
  const std::string where = "init";
  InitConfig c;
  c.weight_std = get_or(j, "weight_std", c.weight_std, where);
  c.bias_mean = get_or(j, "bias_mean", c.bias_mean, where);
  c.bias_std = get_or(j, "bias_std", c.bias_std, where);
  c.alpha_std = get_or(j, "alpha_std", c.alpha_std, where);
  if (!(c.weight_std >= 0 && c.bias_std >= 0 && c.alpha_std >= 0)) throw ConfigError("init: standard deviations must be >= 0");
  return c;
}

ModelParameters init_parameters(const Architecture& arch, const InitConfig& init, std::uint64_t seed) {
  ModelParameters p = ModelParameters::zeros(arch);
  // One stream per group so that resizing one group leaves the others alone.
  for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
    auto& g = p.groups[gi];
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(gi)));
    const bool is_bias = g.name.ends_with(".bias");
    const bool is_alpha = g.name == "alpha";
    const double mean = is_bias ? init.bias_mean : 0.0;
    const double sd = is_bias ? init.bias_std : (is_alpha ? init.alpha_std : init.weight_std);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : g.values) v = mean + sd * dist(rng);
  }
  return p;
}

// ---- forward ------------------------------------------------------------------

EmbedTrace forward_embed_traced(const ModelParameters& params, std::span<const double> image, Exec exec) {
  const Architecture& arch = params.arch;
  const auto shapes = arch.block_shapes();
  if (image.size() != shapes[0].size()) {
    throw DimensionError("image tensor has " + std::to_string(image.size()) + " values, network expects " +
                         std::to_string(shapes[0].size()));
  }
  EmbedTrace t;
  const std::size_t n_blocks = arch.convs.size();
  t.block_in.resize(n_blocks);
  t.block_act.resize(n_blocks);
  t.argmax.resize(n_blocks);
  std::vector<double> x(image.begin(), image.end());
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const auto& c = arch.convs[i];
    const Shape3 conv_shape = layers::conv_output_shape(shapes[i], c.channels, c.kernel);
    std::vector<double> act(conv_shape.size());
    layers::conv2d_forward(x, shapes[i], params.conv_kernel(i).values, params.conv_bias(i).values, c.channels,
                           c.kernel, act, exec);
    layers::relu_forward(act);
    t.block_in[i] = std::move(x);
    if (c.pool) {
      x.assign(shapes[i + 1].size(), 0.0);
      t.argmax[i].resize(x.size());
      layers::maxpool_forward(act, conv_shape, x, t.argmax[i], exec);
    } else {
      x = act;
    }
    t.block_act[i] = std::move(act);
  }
  t.features = std::move(x);
  t.embedding.resize(arch.embedding);
  layers::dense_forward(t.features, params.fc_weight().values, params.fc_bias().values, t.embedding, exec);
  for (auto& v : t.embedding) v = layers::sigmoid(v);
  return t;
}

std::vector<double> forward_embed(const ModelParameters& params, std::span<const double> image, Exec exec) {
  return forward_embed_traced(params, image, exec).embedding;
}

std::vector<double> forward_embed(const ModelParameters& params, const imgprep::CompositeImage& image, Exec exec) {
  if (image.height() != params.arch.input_side || image.width() != params.arch.input_side) {
    throw DimensionError("image is " + std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                         ", network expects side " + std::to_string(params.arch.input_side));
  }
  return forward_embed(params, image.to_tensor(), exec);
}

double pair_logit(std::span<const double> alpha, std::span<const double> h1, std::span<const double> h2) {
  if (h1.size() != alpha.size() || h2.size() != alpha.size()) throw DimensionError("embedding size mismatch");
  double z = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) z += alpha[j] * std::abs(h1[j] - h2[j]);
  return z;
}

double pair_probability(std::span<const double> alpha, std::span<const double> h1, std::span<const double> h2) {
  return layers::sigmoid(pair_logit(alpha, h1, h2));
}

double forward_pair(const ModelParameters& params, std::span<const double> a, std::span<const double> b, Exec exec) {
  const auto h1 = forward_embed(params, a, exec);
  const auto h2 = forward_embed(params, b, exec);
  return pair_probability(params.alpha().values, h1, h2);
}

double bce_loss(double p, bool same) {
  const double q = std::clamp(p, kLossClamp, 1.0 - kLossClamp);
  return same ? -std::log(q) : -std::log1p(-q);
}

double bce_loss(std::span<const double> p, const std::vector<bool>& same) {
  if (p.size() != same.size() || p.empty()) throw DimensionError("loss batch size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += bce_loss(p[i], same[i]);
  return acc / static_cast<double>(p.size());
}

// ---- backward -----------------------------------------------------------------

namespace {

// Backpropagates dL/dh through one embedding pass, accumulating into grads.
void backward_embed(const ModelParameters& params, const EmbedTrace& t, std::vector<double> d_h,
                    ModelParameters& grads, Exec exec) {
  const Architecture& arch = params.arch;
  const auto shapes = arch.block_shapes();
  for (std::size_t o = 0; o < d_h.size(); ++o) d_h[o] *= t.embedding[o] * (1.0 - t.embedding[o]);
  std::vector<double> d(t.features.size());
  layers::dense_backward(t.features, params.fc_weight().values, d_h, grads.fc_weight().values,
                         grads.fc_bias().values, d, exec);
  for (std::size_t i = arch.convs.size(); i-- > 0;) {
    const auto& c = arch.convs[i];
    const Shape3 conv_shape = layers::conv_output_shape(shapes[i], c.channels, c.kernel);
    std::vector<double> d_act;
    if (c.pool) {
      d_act.assign(conv_shape.size(), 0.0);
      layers::maxpool_backward(d, t.argmax[i], d_act);
    } else {
      d_act = std::move(d);
    }
    layers::relu_backward(t.block_act[i], d_act);
    std::vector<double> d_in(i == 0 ? 0 : shapes[i].size());
    layers::conv2d_backward(t.block_in[i], shapes[i], params.conv_kernel(i).values, c.channels, c.kernel, d_act,
                            grads.conv_kernel(i).values, grads.conv_bias(i).values, d_in, exec);
    d = std::move(d_in);
  }
}

// Loss of one pair; accumulates weight x its gradient into grads.
double pair_loss_and_gradient(const ModelParameters& params, const PairRef& pr, double weight,
                              ModelParameters& grads, Exec exec) {
  const EmbedTrace ta = forward_embed_traced(params, pr.a, exec);
  const EmbedTrace tb = forward_embed_traced(params, pr.b, exec);
  const auto& alpha = params.alpha().values;
  const double p = pair_probability(alpha, ta.embedding, tb.embedding);
  const double loss = bce_loss(p, pr.same);
  // d loss / d logit = p - y inside the clamp range and 0 where clamped.
  const bool clamped = p < kLossClamp || p > 1.0 - kLossClamp;
  const double g = clamped ? 0.0 : weight * (p - (pr.same ? 1.0 : 0.0));
  if (g == 0.0) return loss;
  const std::size_t n = alpha.size();
  std::vector<double> d_h1(n), d_h2(n);
  auto& d_alpha = grads.alpha().values;
  for (std::size_t j = 0; j < n; ++j) {
    const double diff = ta.embedding[j] - tb.embedding[j];
    const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    d_alpha[j] += g * std::abs(diff);
    d_h1[j] = g * alpha[j] * sgn;
    d_h2[j] = -d_h1[j];
  }
  backward_embed(params, ta, std::move(d_h1), grads, exec);
  backward_embed(params, tb, std::move(d_h2), grads, exec);
  return loss;
}

}  // namespace

double loss_and_gradient(const ModelParameters& params, std::span<const PairRef> batch, ModelParameters& grads,
                         Exec exec) {
  if (batch.empty()) throw DimensionError("empty training batch");
  if (!grads.same_shape(params)) throw DimensionError("gradient buffer does not match the parameters");
  const double weight = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& pr : batch) total += pair_loss_and_gradient(params, pr, weight, grads, exec);
  for (const auto& g : grads.groups) {
    for (double v : g.values) {
      if (!std::isfinite(v)) throw NumericalError("non-finite gradient in parameter group '" + g.name + "'");
    }
  }
  return total * weight;
}

}  // namespace hopjam::siamese
