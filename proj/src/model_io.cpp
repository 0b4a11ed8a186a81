#include "skelattack/model_io.hpp"

#include <string>

#include "skelattack/error.hpp"
#include "skelattack/motion_io.hpp"

namespace skelattack {

namespace {

json layer_to_json(const DenseLayer& l) {
  json rows = json::array();
  for (int r = 0; r < l.outputs; ++r) {
    auto begin = l.weights.begin() + static_cast<std::ptrdiff_t>(r) * l.inputs;
    rows.push_back(std::vector<double>(begin, begin + l.inputs));
  }
  return json{{"w", std::move(rows)}, {"b", l.bias}, {"activation", activation_name(l.activation)}};
}

DenseLayer layer_from_json(const json& j, const std::filesystem::path& src, const std::string& field) {
  if (!j.is_object()) throw ParseError(src, field, "expected an object");
  DenseLayer l;
  auto w = j.find("w");
  auto b = j.find("b");
  if (w == j.end() || !w->is_array() || w->empty()) throw ParseError(src, field + ".w", "expected a nonempty matrix");
  if (b == j.end() || !b->is_array()) throw ParseError(src, field + ".b", "expected an array");
  l.outputs = static_cast<int>(w->size());
  for (std::size_t r = 0; r < w->size(); ++r) {
    const auto& row = (*w)[r];
    const std::string rf = field + ".w[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) throw ParseError(src, rf, "expected a nonempty row");
    if (r == 0) l.inputs = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != l.inputs) throw ParseError(src, rf, "ragged weight matrix");
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError(src, rf, "expected numbers");
      l.weights.push_back(v.get<double>());
    }
  }
  for (const auto& v : *b) {
    if (!v.is_number()) throw ParseError(src, field + ".b", "expected numbers");
    l.bias.push_back(v.get<double>());
  }
  if (static_cast<int>(l.bias.size()) != l.outputs) throw ParseError(src, field + ".b", "bias length mismatch");
  auto act = j.find("activation");
  if (act == j.end() || !act->is_string()) throw ParseError(src, field + ".activation", "expected a string");
  try {
    l.activation = parse_activation(act->get<std::string>());
    l.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(src, field, e.what());
  }
  return l;
}

struct Header {
  std::string kind;
  int class_count = 0;
  InputShape input;
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;
};

Header header_from_json(const json& j, const std::filesystem::path& src) {
  if (!j.is_object()) throw ParseError(src, "", "expected an object");
  Header h;
  auto get = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(src, key, "missing field");
    return *it;
  };
  if (!get("kind").is_string()) throw ParseError(src, "kind", "expected a string");
  h.kind = get("kind").get<std::string>();
  if (!get("class_count").is_number_integer() || get("class_count").get<int>() <= 0)
    throw ParseError(src, "class_count", "expected a positive integer");
  h.class_count = get("class_count").get<int>();
  const auto& in = get("input");
  if (!in.is_object() || !in.contains("frames") || !in.contains("joints") || !in["frames"].is_number_integer() ||
      !in["joints"].is_number_integer())
    throw ParseError(src, "input", "expected {\"frames\": T, \"joints\": J}");
  h.input = {in["frames"].get<int>(), in["joints"].get<int>()};
  if (h.input.frames <= 0 || h.input.joints <= 0) throw ParseError(src, "input", "shape must be positive");
  if (auto s = j.find("seed"); s != j.end()) {
    if (!s->is_number_integer()) throw ParseError(src, "seed", "expected an integer");
    h.seed = s->get<std::uint64_t>();
  }
  const auto& layers = get("layers");
  if (!layers.is_array() || layers.empty()) throw ParseError(src, "layers", "expected a nonempty array");
  for (std::size_t i = 0; i < layers.size(); ++i)
    h.layers.push_back(layer_from_json(layers[i], src, "layers[" + std::to_string(i) + "]"));
  return h;
}

}  // namespace

json classifier_to_json(const DenseNetwork& model) {
  json layers = json::array();
  for (const auto& l : model.layers()) layers.push_back(layer_to_json(l));
  const auto shape = model.input_shape();
  return json{{"kind", model.kind()},
              {"class_count", model.class_count()},
              {"input", {{"frames", shape.frames}, {"joints", shape.joints}}},
              {"layers", std::move(layers)},
              {"groups", nullptr},
              {"seed", model.seed()}};
}

std::unique_ptr<DenseNetwork> classifier_from_json(const json& j, const std::filesystem::path& src) {
  Header h = header_from_json(j, src);
  if (h.layers.back().outputs != h.class_count)
    throw ParseError(src, "class_count", "does not match the output width of the last layer");
  try {
    if (h.kind == "mlp") return std::make_unique<MlpClassifier>(h.input, std::move(h.layers), h.seed);
    if (h.kind == "linear") {
      if (h.layers.size() != 1 || h.layers[0].activation != Activation::none)
        throw ParseError(src, "layers", "linear classifier expects one layer without activation");
      auto& l = h.layers[0];
      if (l.inputs != static_cast<int>(h.input.flat_size()))
        throw ParseError(src, "layers[0].w", "width does not match input shape");
      return std::make_unique<LinearClassifier>(h.input, std::move(l.weights), std::move(l.bias), h.seed);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(src, "layers", e.what());
  }
  throw ParseError(src, "kind", "expected \"mlp\" or \"linear\", got \"" + h.kind + "\"");
}

json extractor_to_json(const GroupedEmotionExtractor& extractor) {
  json layers = json::array();
  for (const auto& l : extractor.projections()) layers.push_back(layer_to_json(l));
  const auto shape = extractor.input_shape();
  return json{{"kind", "emotion"},
              {"class_count", extractor.feature_dim()},
              {"input", {{"frames", shape.frames}, {"joints", shape.joints}}},
              {"layers", std::move(layers)},
              {"groups", extractor.groups()},
              {"seed", extractor.seed()}};
}

GroupedEmotionExtractor extractor_from_json(const json& j, const std::filesystem::path& src) {
  Header h = header_from_json(j, src);
  if (h.kind != "emotion") throw ParseError(src, "kind", "expected \"emotion\", got \"" + h.kind + "\"");
  auto g = j.find("groups");
  if (g == j.end() || !g->is_array()) throw ParseError(src, "groups", "expected an array of joint index arrays");
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& row = (*g)[i];
    if (!row.is_array()) throw ParseError(src, "groups[" + std::to_string(i) + "]", "expected an array");
    std::vector<int> group;
    for (const auto& v : row) {
      if (!v.is_number_integer()) throw ParseError(src, "groups[" + std::to_string(i) + "]", "expected integers");
      group.push_back(v.get<int>());
    }
    groups.push_back(std::move(group));
  }
  try {
    GroupedEmotionExtractor e(h.input, std::move(groups), std::move(h.layers), h.seed);
    if (e.feature_dim() != h.class_count)
      throw ParseError(src, "class_count", "does not match the total projection width");
    return e;
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(src, "groups", e.what());
  }
}

void save_classifier(const DenseNetwork& model, const std::filesystem::path& path) {
  save_json(classifier_to_json(model), path);
}

std::unique_ptr<DenseNetwork> load_classifier(const std::filesystem::path& path) {
  return classifier_from_json(load_json(path), path);
}

void save_extractor(const GroupedEmotionExtractor& extractor, const std::filesystem::path& path) {
  save_json(extractor_to_json(extractor), path);
}

GroupedEmotionExtractor load_extractor(const std::filesystem::path& path) {
  return extractor_from_json(load_json(path), path);
}

void check_model_matches_dataset(const ClassifierModel& model, const MotionDataset& dataset) {
  if (model.class_count() != dataset.class_count)
    fail_validation("class_count mismatch: model has " + std::to_string(model.class_count()) + ", dataset has " +
                    std::to_string(dataset.class_count));
  if (dataset.motions.empty()) return;
  const auto& m = dataset.motions.front();
  const auto shape = model.input_shape();
  if (m.frame_count() != shape.frames || m.joint_count() != shape.joints)
    fail_validation("model input shape " + std::to_string(shape.frames) + "x" + std::to_string(shape.joints) +
                    " does not match dataset motions " + std::to_string(m.frame_count()) + "x" +
                    std::to_string(m.joint_count()));
}

}  // namespace skelattack
