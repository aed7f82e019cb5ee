// SPDX-License-Identifier: Apache-2.0
#include "metaseg/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_array(std::string& out, const char* key, const Eigen::VectorXd& v, bool last) {
  out += "  \"";
  out += key;
  out += "\": [";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(v(i));
  }
  out += last ? "]\n" : "],\n";
}

Eigen::VectorXd read_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorKind::MalformedHeader, std::string("model is missing array '") + key + "'");
  }
  const auto& a = j[key];
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) {
      throw Error(ErrorKind::MalformedHeader, std::string("non-numeric entry in '") + key + "'");
    }
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

ModelKind parse_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::LogisticL1, ModelKind::LogisticPlain, ModelKind::Linear}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorKind::MalformedHeader, "unknown model kind '" + s + "'");
}

}  // namespace

std::string format_model(const MetaModel& model, std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  out += "{\n";
  out += "  \"kind\": \"" + std::string(to_string(model.kind)) + "\",\n";
  out += "  \"lambda\": " + fmt17(model.lambda) + ",\n";
  out += "  \"intercept\": " + fmt17(model.intercept) + ",\n";
  append_array(out, "means", model.standardizer.means, false);
  append_array(out, "stds", model.standardizer.stds, false);
  append_array(out, "weights", model.weights, true);
  out += "}\n";
  return out;
}

MetaModel parse_model(std::string_view text) {
  // Drop leading comment lines.
  while (!text.empty() && text.front() == '#') {
    const auto nl = text.find('\n');
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedHeader, std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string() ||
      !j.contains("intercept") || !j["intercept"].is_number()) {
    throw Error(ErrorKind::MalformedHeader, "model lacks kind or intercept");
  }
  MetaModel m;
  m.kind = parse_kind(j["kind"].get<std::string>());
  m.intercept = j["intercept"].get<double>();
  m.lambda = j.contains("lambda") && j["lambda"].is_number() ? j["lambda"].get<double>() : 0.0;
  m.weights = read_array(j, "weights");
  m.standardizer.means = read_array(j, "means");
  m.standardizer.stds = read_array(j, "stds");
  if (m.standardizer.means.size() != m.weights.size() ||
      m.standardizer.stds.size() != m.weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "model arrays differ in length");
  }
  return m;
}

void save_model(const MetaModel& model, const std::filesystem::path& path,
                std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << format_model(model, comment);
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

MetaModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace metaseg
