#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "polybound/cli.hpp"

namespace polybound::cli {

namespace {

const std::vector<std::pair<Kind, std::string>>& kind_table() {
  static const std::vector<std::pair<Kind, std::string>> table{
      {Kind::iv_bounds, "iv-bounds"}, {Kind::chsh, "chsh"},       {Kind::membership, "membership"},
      {Kind::npa, "npa"},             {Kind::gap, "gap"},         {Kind::pns, "pns"},
      {Kind::manski, "manski"},       {Kind::frechet, "frechet"}, {Kind::entropic, "entropic"},
      {Kind::audit, "audit"}};
  return table;
}

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw SchemaError(where.empty() ? what : where + ": " + what);
}

void allow_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) schema(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; }))
      schema(where, "unknown key \"" + k + "\"");
  }
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) schema(where, std::string("missing key \"") + key + "\"");
  return obj.at(key);
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) schema(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(where, "number is not finite");
  return d;
}

// Nested 2 x 2 x ... arrays with an explicit "order" naming each axis. The
// canonical form lists the axes in `axes` order.
Json tensor(const Json& j, const std::string& where, const std::vector<std::string>& axes) {
  allow_keys(j, where, {"order", "values"});
  const Json& order = require(j, where, "order");
  if (!order.is_array() || order.size() != axes.size()) schema(where + ".order", "expected " + std::to_string(axes.size()) + " axis names");
  std::vector<std::size_t> position(axes.size());  // canonical axis -> input depth
  std::set<std::string> seen;
  for (std::size_t d = 0; d < order.size(); ++d) {
    if (!order[d].is_string()) schema(where + ".order", "axis names must be strings");
    const auto name = order[d].get<std::string>();
    const auto it = std::find(axes.begin(), axes.end(), name);
    if (it == axes.end() || !seen.insert(name).second) {
      std::string expected;
      for (const auto& a : axes) expected += (expected.empty() ? "" : ", ") + a;
      schema(where + ".order", "must be a permutation of [" + expected + "]");
    }
    position[static_cast<std::size_t>(it - axes.begin())] = d;
  }

  const std::size_t rank = axes.size();
  std::vector<double> flat(std::size_t{1} << rank);
  const Json& values = require(j, where, "values");
  for (std::size_t input = 0; input < flat.size(); ++input) {
    const Json* node = &values;
    std::string path = where + ".values";
    for (std::size_t d = 0; d < rank; ++d) {
      if (!node->is_array() || node->size() != 2) schema(path, "expected an array of length 2");
      const std::size_t bit = (input >> (rank - 1 - d)) & 1;
      node = &(*node)[bit];
      path += "[" + std::to_string(bit) + "]";
    }
    std::size_t canonical = 0;
    for (std::size_t a = 0; a < rank; ++a) canonical |= ((input >> (rank - 1 - position[a])) & 1) << (rank - 1 - a);
    flat[canonical] = number(*node, path);
  }

  std::function<Json(std::size_t, std::size_t)> build = [&](std::size_t depth, std::size_t prefix) -> Json {
    if (depth == rank) return flat[prefix];
    return Json::array({build(depth + 1, prefix << 1), build(depth + 1, (prefix << 1) | 1)});
  };
  Json out;
  out["order"] = axes;
  out["values"] = build(0, 0);
  return out;
}

Json functional(const Json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "chsh") schema(where, "the only named functional is \"chsh\"");
    Json out;
    out["order"] = Json::array({"x", "y"});
    out["values"] = Json::array({Json::array({1.0, 1.0}), Json::array({1.0, -1.0})});
    return out;
  }
  return tensor(j, where, {"x", "y"});
}

Json experimental(const Json& j, const std::string& where) {
  allow_keys(j, where, {"p_yx", "p_yxp"});
  Json out;
  out["p_yx"] = number(require(j, where, "p_yx"), where + ".p_yx");
  out["p_yxp"] = number(require(j, where, "p_yxp"), where + ".p_yxp");
  return out;
}

Json entropy_vector(const Json& j, const std::string& where) {
  allow_keys(j, where, {"n", "values"});
  const Json& n = require(j, where, "n");
  if (!n.is_number_integer() || n.get<int>() < 1 || n.get<int>() > 4) schema(where + ".n", "expected an integer in 1..4");
  const int vars = n.get<int>();
  const Json& values = require(j, where, "values");
  if (!values.is_object()) schema(where + ".values", "expected an object keyed by subsets such as \"0,2\"");
  Json out;
  out["n"] = vars;
  out["values"] = Json::object();
  for (const auto& [key, v] : values.items()) {
    std::set<int> members;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::size_t used = 0;
      int idx = -1;
      try {
        idx = std::stoi(part, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != part.size() || idx < 0 || idx >= vars) schema(where + ".values", "bad subset key \"" + key + "\"");
      members.insert(idx);
    }
    if (members.empty()) schema(where + ".values", "empty subset key");
    std::string canonical;
    for (int m : members) canonical += (canonical.empty() ? "" : ",") + std::to_string(m);
    if (out["values"].contains(canonical)) schema(where + ".values", "subset \"" + canonical + "\" given twice");
    out["values"][canonical] = number(v, where + ".values." + key);
  }
  return out;
}

Json joint(const Json& j, const std::string& where) {
  allow_keys(j, where, {"cardinalities", "values"});
  const Json& card = require(j, where, "cardinalities");
  if (!card.is_array() || card.empty() || card.size() > 4) schema(where + ".cardinalities", "expected 1 to 4 integers");
  std::size_t atoms = 1;
  Json out;
  for (const auto& c : card) {
    if (!c.is_number_integer() || c.get<int>() < 1 || c.get<int>() > 16) schema(where + ".cardinalities", "expected integers in 1..16");
    atoms *= c.get<std::size_t>();
    out["cardinalities"].push_back(c.get<int>());
  }
  const Json& values = require(j, where, "values");
  if (!values.is_array() || values.size() != atoms) schema(where + ".values", "expected " + std::to_string(atoms) + " probabilities");
  out["values"] = Json::array();
  for (std::size_t k = 0; k < atoms; ++k) out["values"].push_back(number(values[k], where + ".values[" + std::to_string(k) + "]"));
  return out;
}

// Exactly one of `alternatives` (each a set of keys that appear together).
std::size_t pick(const Json& p, const std::vector<std::vector<const char*>>& alternatives) {
  std::size_t found = alternatives.size();
  for (std::size_t a = 0; a < alternatives.size(); ++a)
    if (p.contains(alternatives[a].front())) {
      if (found != alternatives.size()) schema("payload", "give exactly one input form");
      found = a;
    }
  if (found == alternatives.size()) {
    std::string names;
    for (const auto& alt : alternatives) names += (names.empty() ? "" : " | ") + std::string(alt.front());
    schema("payload", "expected one of: " + names);
  }
  return found;
}

Json behavior(const Json& j, const std::string& where) { return tensor(j, where, {"a", "b", "x", "y"}); }
Json iv_table(const Json& j, const std::string& where) { return tensor(j, where, {"y", "x", "z"}); }
Json xy_table(const Json& j, const std::string& where) { return tensor(j, where, {"x", "y"}); }

Json payload_for(Kind kind, const Json& p) {
  if (!p.is_object()) schema("payload", "expected an object");
  Json out = Json::object();
  switch (kind) {
    case Kind::iv_bounds:
      allow_keys(p, "payload", {"table"});
      out["table"] = iv_table(require(p, "payload", "table"), "payload.table");
      break;
    case Kind::chsh:
      allow_keys(p, "payload", {"correlations", "behavior"});
      if (pick(p, {{"correlations"}, {"behavior"}}) == 0)
        out["correlations"] = xy_table(p.at("correlations"), "payload.correlations");
      else
        out["behavior"] = behavior(p.at("behavior"), "payload.behavior");
      break;
    case Kind::membership:
      allow_keys(p, "payload", {"behavior"});
      out["behavior"] = behavior(require(p, "payload", "behavior"), "payload.behavior");
      break;
    case Kind::npa:
      allow_keys(p, "payload", {"functional"});
      out["functional"] = functional(require(p, "payload", "functional"), "payload.functional");
      break;
    case Kind::gap:
      allow_keys(p, "payload", {"functional", "behavior", "table"});
      switch (pick(p, {{"functional"}, {"behavior"}, {"table"}})) {
        case 0: out["functional"] = functional(p.at("functional"), "payload.functional"); break;
        case 1: out["behavior"] = behavior(p.at("behavior"), "payload.behavior"); break;
        default: out["table"] = iv_table(p.at("table"), "payload.table"); break;
      }
      break;
    case Kind::pns:
      allow_keys(p, "payload", {"experimental", "observational"});
      out["experimental"] = experimental(require(p, "payload", "experimental"), "payload.experimental");
      out["observational"] = xy_table(require(p, "payload", "observational"), "payload.observational");
      break;
    case Kind::manski:
      allow_keys(p, "payload", {"e1", "e0", "px1"});
      for (const char* k : {"e1", "e0", "px1"}) out[k] = number(require(p, "payload", k), std::string("payload.") + k);
      break;
    case Kind::frechet:
      allow_keys(p, "payload", {"u", "v"});
      for (const char* k : {"u", "v"}) out[k] = number(require(p, "payload", k), std::string("payload.") + k);
      break;
    case Kind::entropic:
      allow_keys(p, "payload", {"behavior", "settings", "entropy_vector", "joint"});
      switch (pick(p, {{"behavior", "settings"}, {"entropy_vector"}, {"joint"}})) {
        case 0:
          out["behavior"] = behavior(p.at("behavior"), "payload.behavior");
          if (p.contains("settings")) out["settings"] = xy_table(p.at("settings"), "payload.settings");
          break;
        case 1: out["entropy_vector"] = entropy_vector(p.at("entropy_vector"), "payload.entropy_vector"); break;
        default: out["joint"] = joint(p.at("joint"), "payload.joint"); break;
      }
      if (p.contains("settings") && !p.contains("behavior")) schema("payload.settings", "only valid with a behavior");
      break;
    case Kind::audit:
      allow_keys(p, "payload", {"table", "behavior", "correlations", "functional", "experimental", "observational"});
      switch (pick(p, {{"table"}, {"behavior"}, {"correlations"}, {"functional"}, {"experimental", "observational"}})) {
        case 0: out["table"] = iv_table(p.at("table"), "payload.table"); break;
        case 1: out["behavior"] = behavior(p.at("behavior"), "payload.behavior"); break;
        case 2: out["correlations"] = xy_table(p.at("correlations"), "payload.correlations"); break;
        case 3: out["functional"] = functional(p.at("functional"), "payload.functional"); break;
        default:
          out["experimental"] = experimental(p.at("experimental"), "payload.experimental");
          out["observational"] = xy_table(require(p, "payload", "observational"), "payload.observational");
          break;
      }
      if (p.contains("observational") && !p.contains("experimental")) schema("payload", "observational data needs experimental data");
      break;
  }
  return out;
}

Options options_from(const Json& o) {
  allow_keys(o, "options", {"npa_level", "tolerance", "variant", "renormalize", "audit"});
  Options out;
  if (o.contains("npa_level")) {
    const Json& l = o.at("npa_level");
    if (l == "1")
      out.npa_level = NpaLevel::L1;
    else if (l == "1ab")
      out.npa_level = NpaLevel::L1AB;
    else
      schema("options.npa_level", "expected \"1\" or \"1ab\"");
  }
  if (o.contains("tolerance")) {
    const double t = number(o.at("tolerance"), "options.tolerance");
    if (!(t > 0.0 && t < 1.0)) schema("options.tolerance", "expected a value in (0, 1)");
    out.tolerance = t;
  }
  if (o.contains("variant")) {
    const Json& v = o.at("variant");
    if (v == "standard")
      out.variant = Variant::standard;
    else if (v == "paper-literal")
      out.variant = Variant::literal;
    else
      schema("options.variant", "expected \"standard\" or \"paper-literal\"");
  }
  for (const char* flag : {"renormalize", "audit"})
    if (o.contains(flag)) {
      if (!o.at(flag).is_boolean()) schema(std::string("options.") + flag, "expected true or false");
      (std::string(flag) == "audit" ? out.audit : out.renormalize) = o.at(flag).get<bool>();
    }
  return out;
}

}  // namespace

const char* to_string(Kind k) {
  for (const auto& [kind, name] : kind_table())
    if (kind == k) return name.c_str();
  return "unknown";
}

std::optional<Kind> parse_kind(std::string_view s) {
  for (const auto& [kind, name] : kind_table())
    if (name == s) return kind;
  return std::nullopt;
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [kind, name] : kind_table()) out.push_back(name);
    return out;
  }();
  return names;
}

Request parse_request(const Json& doc, std::optional<Kind> kind_override, const OptionOverrides& overrides) {
  allow_keys(doc, "", {"schema", "kind", "payload", "options"});
  const Json& version = require(doc, "", "schema");
  if (!version.is_number_integer() || version.get<long long>() != 1) schema("schema", "unsupported schema version (expected 1)");

  Request r;
  std::optional<Kind> kind = kind_override;
  if (doc.contains("kind")) {
    if (!doc.at("kind").is_string()) schema("kind", "expected a string");
    const auto named = parse_kind(doc.at("kind").get<std::string>());
    if (!named) schema("kind", "unknown kind \"" + doc.at("kind").get<std::string>() + "\"");
    if (kind && *kind != *named) schema("kind", "document kind does not match the command");
    kind = named;
  }
  if (!kind) schema("kind", "no analysis kind given");
  r.kind = *kind;
  r.payload = payload_for(r.kind, require(doc, "", "payload"));
  if (doc.contains("options")) r.options = options_from(doc.at("options"));

  if (overrides.npa_level) r.options.npa_level = *overrides.npa_level;
  if (overrides.tolerance) {
    if (!(*overrides.tolerance > 0.0 && *overrides.tolerance < 1.0)) schema("--tolerance", "expected a value in (0, 1)");
    r.options.tolerance = overrides.tolerance;
  }
  if (overrides.variant) r.options.variant = *overrides.variant;
  if (overrides.renormalize) r.options.renormalize = *overrides.renormalize;
  if (overrides.audit) r.options.audit = *overrides.audit;
  return r;
}

Json to_json(const Request& r) {
  Json out;
  out["schema"] = 1;
  out["kind"] = to_string(r.kind);
  out["payload"] = r.payload;
  Json o;
  o["npa_level"] = to_string(r.options.npa_level);
  o["variant"] = r.options.variant == Variant::standard ? "standard" : "paper-literal";
  o["renormalize"] = r.options.renormalize;
  o["audit"] = r.options.audit;
  if (r.options.tolerance) o["tolerance"] = *r.options.tolerance;
  out["options"] = o;
  return out;
}

}  // namespace polybound::cli
