#include "gmdiv/record.hpp"

#include <sstream>

#include "gmdiv/errors.hpp"
#include "gmdiv/format.hpp"

namespace gmdiv {

std::string to_record(const MixingDistribution& m) {
  std::ostringstream os;
  os << "{\"dim\":" << m.dim() << ",\"atoms\":[";
  bool first_atom = true;
  for (const auto& a : m.atoms()) {
    if (!first_atom) os << ',';
    first_atom = false;
    os << "[[";
    for (std::size_t i = 0; i < a.location.size(); ++i) {
      if (i) os << ',';
      os << fmt17(a.location[i]);
    }
    os << "]," << fmt17(a.weight) << ']';
  }
  os << "],\"class_tag\":";
  if (const auto* c = std::get_if<Compact>(&m.class_tag())) {
    os << "\"compact\",\"params\":{\"M\":" << fmt17(c->M) << '}';
  } else if (const auto* s = std::get_if<Subgaussian>(&m.class_tag())) {
    os << "\"subgaussian\",\"params\":{\"K\":" << fmt17(s->K) << '}';
  } else {
    os << "\"unconstrained\",\"params\":{}";
  }
  os << '}';
  return os.str();
}

std::string to_record(const GaussianMixture& gm) { return to_record(gm.mixing()); }

namespace {

double number_field(const nlohmann::json& params, const char* name) {
  if (!params.is_object() || !params.contains(name) || !params.at(name).is_number()) {
    throw InputError(std::string("mixture record: params.") + name + " must be a number");
  }
  return params.at(name).get<double>();
}

}  // namespace

MixingDistribution mixing_from_record(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("mixture record: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "dim" && key != "atoms" && key != "class_tag" && key != "params") {
      throw InputError("mixture record: unknown field '" + key + "'");
    }
  }
  if (!j.contains("dim") || !j.at("dim").is_number_unsigned()) {
    throw InputError("mixture record: dim must be a positive integer");
  }
  const auto dim = j.at("dim").get<std::size_t>();
  if (!j.contains("atoms") || !j.at("atoms").is_array()) {
    throw InputError("mixture record: atoms must be an array");
  }
  std::vector<Atom> atoms;
  for (const auto& entry : j.at("atoms")) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() || !entry[1].is_number()) {
      throw InputError("mixture record: each atom must be [[loc...], weight]");
    }
    Atom a;
    for (const auto& x : entry[0]) {
      if (!x.is_number()) throw InputError("mixture record: atom location must be numeric");
      a.location.push_back(x.get<double>());
    }
    a.weight = entry[1].get<double>();
    atoms.push_back(std::move(a));
  }

  const std::string tag = j.value("class_tag", std::string("unconstrained"));
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  ClassTag cls = Unconstrained{};
  if (tag == "compact") {
    cls = Compact{number_field(params, "M")};
  } else if (tag == "subgaussian") {
    cls = Subgaussian{number_field(params, "K")};
  } else if (tag != "unconstrained") {
    throw InputError("mixture record: unknown class_tag '" + tag + "'");
  }
  return MixingDistribution(dim, std::move(atoms), cls);
}

MixingDistribution mixing_from_record(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("mixture record: ") + e.what());
  }
  return mixing_from_record(j);
}

GaussianMixture mixture_from_record(const nlohmann::json& j) {
  return GaussianMixture(mixing_from_record(j));
}

}  // namespace gmdiv
