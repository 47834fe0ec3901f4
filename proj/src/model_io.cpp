#include "spnjd/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spnjd/error.hpp"

namespace spnjd {

namespace {

using nlohmann::json;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

std::vector<std::pair<std::string, Count>> count_map(const json& j, const std::string& path) {
  if (!j.is_object()) throw ModelError(path, "expected an object mapping place names to counts");
  std::vector<std::pair<std::string, Count>> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) throw ModelError(path + "." + it.key(), "expected an integer");
    out.emplace_back(it.key(), it.value().get<Count>());
  }
  return out;
}

}  // namespace

ModelDocument parse_model_document(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string(source) + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": syntax error: " + e.what());
  }
  if (!root.is_object()) throw ModelError("", "model document must be a JSON object");

  ModelDocument doc;
  if (!root.contains("places") || !root["places"].is_array()) throw ModelError("places", "missing or not a list");
  for (std::size_t i = 0; i < root["places"].size(); ++i) {
    const auto& p = root["places"][i];
    if (!p.is_string()) throw ModelError("places[" + std::to_string(i) + "]", "expected a string");
    doc.places.push_back(p.get<std::string>());
  }

  if (!root.contains("transitions") || !root["transitions"].is_array())
    throw ModelError("transitions", "missing or not a list");
  for (std::size_t i = 0; i < root["transitions"].size(); ++i) {
    const auto& t = root["transitions"][i];
    const std::string path = "transitions[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ModelError(path, "expected an object");
    TransitionDoc td;
    if (!t.contains("name") || !t["name"].is_string()) throw ModelError(path + ".name", "missing or not a string");
    td.name = t["name"].get<std::string>();
    if (!t.contains("rate") || !t["rate"].is_number()) throw ModelError(path + ".rate", "missing or not a number");
    td.rate = t["rate"].get<double>();
    if (t.contains("input")) td.input = count_map(t["input"], path + ".input");
    if (t.contains("output")) td.output = count_map(t["output"], path + ".output");
    doc.transitions.push_back(std::move(td));
  }

  if (root.contains("initial_marking")) doc.initial_marking = count_map(root["initial_marking"], "initial_marking");
  if (root.contains("alpha")) doc.alpha = count_map(root["alpha"], "alpha");
  return doc;
}

SpnModel parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("", "cannot read model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return validate_model(parse_model_document(buf.str(), path.string()));
}

std::string serialize_model(const SpnModel& model, const std::vector<std::string>& notes) {
  using ojson = nlohmann::ordered_json;
  const ModelDocument doc = model.to_document();
  auto counts = [](const std::vector<std::pair<std::string, Count>>& entries) {
    ojson o = ojson::object();
    for (const auto& [k, v] : entries) o[k] = v;
    return o;
  };
  ojson root;
  root["places"] = doc.places;
  root["transitions"] = ojson::array();
  for (const auto& td : doc.transitions) {
    ojson t;
    t["name"] = td.name;
    t["rate"] = td.rate;
    t["input"] = counts(td.input);
    t["output"] = counts(td.output);
    root["transitions"].push_back(std::move(t));
  }
  root["initial_marking"] = counts(doc.initial_marking);
  if (doc.alpha) root["alpha"] = counts(*doc.alpha);
  if (!notes.empty()) root["notes"] = notes;
  return root.dump(2) + "\n";
}

}  // namespace spnjd
