#include <fstream>
#include <json.hpp>

#include "elemvae/bvae.hpp"

// Checkpoint container: one "ELEMVAE-CKPT 1" line, one line with the byte
// length of the JSON header, the header itself, then the raw little-endian
// doubles of every tensor in header order. Round-trips bit-exactly.

namespace elemvae::bvae {

namespace {

using nlohmann::json;

json layer_to_json(const nn::LayerSpec& l) {
  json j;
  j["kind"] = nn::to_string(l.kind);
  j["activation"] = nn::to_string(l.activation);
  switch (l.kind) {
    case nn::LayerKind::fully_connected:
      j["units"] = l.units;
      break;
    case nn::LayerKind::conv2d:
    case nn::LayerKind::conv2d_transpose:
      j["filters"] = l.filters;
      j["kernel"] = {l.kernel_h, l.kernel_w};
      j["stride"] = {l.stride_h, l.stride_w};
      j["padding"] = l.padding == nn::Padding::same ? "same" : "valid";
      break;
    case nn::LayerKind::max_pool:
      j["pool"] = {l.pool_h, l.pool_w};
      break;
    case nn::LayerKind::dropout:
      j["rate"] = l.rate;
      break;
    case nn::LayerKind::reshape:
      j["target_shape"] = l.target_shape;
      break;
    case nn::LayerKind::flatten:
      break;
  }
  return j;
}

nn::LayerSpec layer_from_json(const json& j) {
  std::string kind = j.at("kind");
  std::string act_name = j.at("activation");
  nn::Activation act = act_name == "relu"      ? nn::Activation::relu
                       : act_name == "sigmoid" ? nn::Activation::sigmoid
                                               : nn::Activation::none;
  if (kind == "fully_connected") return nn::LayerSpec::dense(j.at("units"), act);
  if (kind == "conv2d" || kind == "conv2d_transpose") {
    auto kernel = j.at("kernel");
    auto stride = j.at("stride");
    nn::Padding pad = j.at("padding") == "same" ? nn::Padding::same : nn::Padding::valid;
    return kind == "conv2d"
               ? nn::LayerSpec::conv(j.at("filters"), kernel[0], kernel[1], stride[0], stride[1],
                                     pad, act)
               : nn::LayerSpec::conv_transpose(j.at("filters"), kernel[0], kernel[1], stride[0],
                                               stride[1], pad, act);
  }
  if (kind == "max_pool") return nn::LayerSpec::pool(j.at("pool")[0], j.at("pool")[1]);
  if (kind == "dropout") return nn::LayerSpec::dropout_layer(j.at("rate"));
  if (kind == "flatten") return nn::LayerSpec::flatten();
  if (kind == "reshape")
    return nn::LayerSpec::reshape(j.at("target_shape").get<std::vector<int>>());
  throw std::runtime_error("checkpoint: unknown layer kind " + kind);
}

json network_to_json(const nn::NetworkSpec& spec) {
  json j;
  j["input_shape"] = spec.input_shape;
  j["layers"] = json::array();
  for (const nn::LayerSpec& l : spec.layers) j["layers"].push_back(layer_to_json(l));
  return j;
}

nn::NetworkSpec network_from_json(const json& j) {
  nn::NetworkSpec spec;
  spec.input_shape = j.at("input_shape").get<std::vector<int>>();
  for (const json& lj : j.at("layers")) spec.layers.push_back(layer_from_json(lj));
  return spec;
}

void collect_tensors(const char* prefix, const nn::ParameterStore& store, json& index,
                     std::vector<const nn::Tensor*>& tensors) {
  for (std::size_t i = 0; i < store.weights.size(); ++i) {
    if (store.weights[i].numel() == 0) continue;
    for (const char* part : {"w", "b"}) {
      const nn::Tensor& t = part[0] == 'w' ? store.weights[i] : store.biases[i];
      json e;
      e["name"] = std::string(prefix) + "." + part + std::to_string(i);
      e["shape"] = t.shape;
      index.push_back(e);
      tensors.push_back(&t);
    }
  }
}

// reattaches tensors to a freshly shaped store (init with zeros first)
void assign_tensors(nn::ParameterStore& store, const nn::NetworkSpec& spec,
                    std::istream& in, const json& index, std::size_t& cursor) {
  store = nn::init_parameters(spec, 0);
  for (std::size_t i = 0; i < store.weights.size(); ++i) {
    if (store.weights[i].numel() == 0) continue;
    for (nn::Tensor* t : {&store.weights[i], &store.biases[i]}) {
      const json& e = index.at(cursor++);
      std::vector<int> shape = e.at("shape").get<std::vector<int>>();
      if (shape != t->shape) throw std::runtime_error("checkpoint: tensor shape mismatch");
      in.read(reinterpret_cast<char*>(t->data.data()),
              static_cast<std::streamsize>(t->data.size() * sizeof(double)));
      if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    }
  }
}

}  // namespace

void save_model(const std::string& path, const TrainedBvae& model) {
  json header;
  header["format"] = "ELEMVAE-CKPT";
  header["format_version"] = 1;
  header["seed"] = model.seed;
  header["recipe"] = model.recipe.to_string();
  header["input_shape"] = model.input_shape;
  header["divisors"] = model.divisors;
  header["loss_reduction"] = "bce sum over features, mean over batch; kl mean over batch";
  header["spec"] = {{"encoder", network_to_json(model.spec.encoder)},
                    {"mu_head", network_to_json(model.spec.mu_head)},
                    {"logvar_head", network_to_json(model.spec.logvar_head)},
                    {"decoder", network_to_json(model.spec.decoder)}};
  header["train_config"] = {
      {"beta", model.config.beta},
      {"epochs", model.config.epochs},
      {"batch_size", model.config.batch_size},
      {"split_fraction", model.config.split_fraction},
      {"seed", model.config.seed},
      {"granularity", model.config.granularity == nn::SplitGranularity::row ? "row" : "entity"}};
  header["optimizer"] = {{"algorithm", nn::to_string(model.optimizer.algorithm)},
                         {"learning_rate", model.optimizer.learning_rate},
                         {"decay1", model.optimizer.decay1},
                         {"decay2", model.optimizer.decay2},
                         {"epsilon", model.optimizer.epsilon}};
  json hist = json::array();
  for (const BvaeEpochStats& s : model.history)
    hist.push_back({s.train_total, s.train_recon, s.train_kl, s.test_total});
  header["history"] = hist;

  json index = json::array();
  std::vector<const nn::Tensor*> tensors;
  collect_tensors("encoder", model.params.encoder, index, tensors);
  collect_tensors("mu_head", model.params.mu_head, index, tensors);
  collect_tensors("logvar_head", model.params.logvar_head, index, tensors);
  collect_tensors("decoder", model.params.decoder, index, tensors);
  header["tensors"] = index;

  std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "ELEMVAE-CKPT 1\n" << head.size() << "\n" << head;
  for (const nn::Tensor* t : tensors)
    out.write(reinterpret_cast<const char*>(t->data.data()),
              static_cast<std::streamsize>(t->data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

TrainedBvae load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "ELEMVAE-CKPT 1") throw std::runtime_error("not an elemvae checkpoint: " + path);
  std::string len_line;
  std::getline(in, len_line);
  std::size_t head_len = std::stoul(len_line);
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw std::runtime_error("checkpoint header truncated: " + path);
  json header = json::parse(head);

  TrainedBvae model;
  model.seed = header.at("seed");
  model.recipe = feat::Recipe::parse(header.at("recipe"));
  model.input_shape = header.at("input_shape").get<std::vector<int>>();
  model.divisors = header.at("divisors").get<std::vector<double>>();
  model.spec.encoder = network_from_json(header.at("spec").at("encoder"));
  model.spec.mu_head = network_from_json(header.at("spec").at("mu_head"));
  model.spec.logvar_head = network_from_json(header.at("spec").at("logvar_head"));
  model.spec.decoder = network_from_json(header.at("spec").at("decoder"));

  const json& tc = header.at("train_config");
  model.config.beta = tc.at("beta");
  model.config.epochs = tc.at("epochs");
  model.config.batch_size = tc.at("batch_size");
  model.config.split_fraction = tc.at("split_fraction");
  model.config.seed = tc.at("seed");
  model.config.granularity =
      tc.at("granularity") == "row" ? nn::SplitGranularity::row : nn::SplitGranularity::entity;

  const json& oj = header.at("optimizer");
  model.optimizer.algorithm = nn::opt_algorithm_from_string(oj.at("algorithm"));
  model.optimizer.learning_rate = oj.at("learning_rate");
  model.optimizer.decay1 = oj.at("decay1");
  model.optimizer.decay2 = oj.at("decay2");
  model.optimizer.epsilon = oj.at("epsilon");

  for (const json& h : header.at("history"))
    model.history.push_back({h[0], h[1], h[2], h[3]});

  const json& index = header.at("tensors");
  std::size_t cursor = 0;
  assign_tensors(model.params.encoder, model.spec.encoder, in, index, cursor);
  assign_tensors(model.params.mu_head, model.spec.mu_head, in, index, cursor);
  assign_tensors(model.params.logvar_head, model.spec.logvar_head, in, index, cursor);
  assign_tensors(model.params.decoder, model.spec.decoder, in, index, cursor);
  if (cursor != index.size()) throw std::runtime_error("checkpoint: tensor index mismatch");
  return model;
}

}  // namespace elemvae::bvae
