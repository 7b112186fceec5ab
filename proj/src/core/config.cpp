#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "error.hpp"
#include "text.hpp"

namespace mortar {

using nlohmann::json;

const std::vector<std::string> &OptionNames() {
  static const std::vector<std::string> kNames = {
      "dataset",          "format",           "perturbations",     "reduce_ratio",
      "duplicate_ratio",  "seed",             "extractor_endpoint", "extractor_model",
      "llm_api_key",      "mock_extractor",   "templates_dir",     "embedder_endpoint",
      "fallback_embedder", "coref_endpoint",  "sut_endpoint",      "sut_model",
      "sut_api_key",      "sut",              "history_policy",    "eps_a",
      "eps_b",            "within_kind",      "all_bugs",          "overlap",
      "parallelism",      "out_dir"};
  return kNames;
}

namespace {

void CheckKey(const std::string &key) {
  const auto &names = OptionNames();
  if (std::find(names.begin(), names.end(), key) == names.end()) {
    throw Error(ErrorKind::kConfig, "unknown setting '" + key + "'");
  }
}

std::string AsString(const std::string &key, const json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  if (v.is_array()) {
    std::vector<std::string> parts;
    for (const json &x : v) parts.push_back(AsString(key, x));
    return text::Join(parts, ",");
  }
  throw Error(ErrorKind::kConfig, "setting '" + key + "' must be a scalar");
}

double AsDouble(const std::string &key, const std::string &s) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception &) {
  }
  throw Error(ErrorKind::kConfig, "setting '" + key + "' expects a number, got '" + s + "'");
}

long long AsInt(const std::string &key, const std::string &s) {
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception &) {
  }
  throw Error(ErrorKind::kConfig, "setting '" + key + "' expects an integer, got '" + s + "'");
}

uint64_t AsUint(const std::string &key, const std::string &s) {
  try {
    size_t used = 0;
    if (!s.empty() && s[0] != '-') {
      unsigned long long v = std::stoull(s, &used);
      if (used == s.size()) return v;
    }
  } catch (const std::exception &) {
  }
  throw Error(ErrorKind::kConfig, "setting '" + key + "' expects an unsigned integer, got '" + s + "'");
}

bool AsBool(const std::string &key, const std::string &s) {
  std::string f = text::Fold(s);
  if (f == "true" || f == "1" || f == "yes" || f == "on" || f.empty()) return true;
  if (f == "false" || f == "0" || f == "no" || f == "off") return false;
  throw Error(ErrorKind::kConfig, "setting '" + key + "' expects a boolean, got '" + s + "'");
}

void Apply(Options &o, const std::string &key, const std::string &v) {
  if (key == "dataset") o.dataset = v;
  else if (key == "format") o.format = ParseDatasetFormat(v);
  else if (key == "perturbations") o.perturbations = ParsePerturbationList(v);
  else if (key == "reduce_ratio") o.reduce_ratio = AsDouble(key, v);
  else if (key == "duplicate_ratio") o.duplicate_ratio = AsDouble(key, v);
  else if (key == "seed") o.seed = AsUint(key, v);
  else if (key == "extractor_endpoint") o.extractor_endpoint = v;
  else if (key == "extractor_model") o.extractor_model = v;
  else if (key == "llm_api_key") o.llm_api_key = v;
  else if (key == "mock_extractor") o.mock_extractor = v.empty() ? "builtin" : v;
  else if (key == "templates_dir") o.templates_dir = v;
  else if (key == "embedder_endpoint") o.embedder_endpoint = v;
  else if (key == "fallback_embedder") o.fallback_embedder = AsBool(key, v);
  else if (key == "coref_endpoint") o.coref_endpoint = v;
  else if (key == "sut_endpoint") o.sut_endpoint = v;
  else if (key == "sut_model") o.sut_model = v;
  else if (key == "sut_api_key") o.sut_api_key = v;
  else if (key == "sut") o.sut = v;
  else if (key == "history_policy") o.history_policy = ParseHistoryPolicy(v);
  else if (key == "eps_a") o.eps_a = AsDouble(key, v);
  else if (key == "eps_b") o.eps_b = AsDouble(key, v);
  else if (key == "within_kind") o.within_kind = AsBool(key, v);
  else if (key == "all_bugs") o.all_bugs = AsBool(key, v);
  else if (key == "overlap") o.overlap = AsBool(key, v);
  else if (key == "parallelism") {
    long long p = AsInt(key, v);
    if (p < 1 || p > 256) throw Error(ErrorKind::kConfig, "parallelism must be in 1..256");
    o.parallelism = static_cast<int>(p);
  } else if (key == "out_dir") o.out_dir = v;
  else throw Error(ErrorKind::kConfig, "unknown setting '" + key + "'");
}

std::string EnvName(const std::string &key) {
  std::string out = "MORTAR_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<PerturbationKind> ParsePerturbationList(std::string_view list) {
  std::vector<PerturbationKind> out;
  std::string cur;
  auto flush = [&] {
    std::string t = text::Trim(cur);
    cur.clear();
    if (t.empty()) return;
    PerturbationKind k = ParsePerturbationKind(t);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  for (char c : list) {
    if (c == ',') flush(); else cur += c;
  }
  flush();
  if (out.empty()) throw Error(ErrorKind::kConfig, "empty perturbation list");
  return out;
}

void OptionLayers::LoadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::kConfig, "config file " + path + " is not a JSON object");
  }
  for (const auto &[key, value] : j.items()) {
    if (key == "inputs") {
      for (const json &x : value) inputs_.push_back(AsString(key, x));
      continue;
    }
    SetFileValue(key, value);
  }
}

void OptionLayers::SetFileValue(const std::string &key, const json &value) {
  CheckKey(key);
  file_[key] = value;
}

void OptionLayers::Set(const std::string &key, const std::string &value) {
  CheckKey(key);
  flags_[key] = value;
}

OptionLayers::EnvLookup OptionLayers::ProcessEnv() {
  return [](const std::string &name) -> std::optional<std::string> {
    const char *v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

Options OptionLayers::Resolve(const EnvLookup &env) const {
  Options o;
  for (const std::string &key : OptionNames()) {
    std::optional<std::string> value;
    if (file_.contains(key)) value = AsString(key, file_[key]);
    if (auto e = env(EnvName(key))) value = *e;
    if (flags_.contains(key)) value = flags_[key].get<std::string>();
    if (value) Apply(o, key, *value);
  }
  o.inputs = inputs_;
  return o;
}

}  // namespace mortar
