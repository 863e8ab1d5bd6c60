#include "risingts/instance_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace risingts {

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

std::int64_t parse_int(std::string_view text, const std::string& where) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(where + ": '" + std::string(text) + "' is not an integer");
  return v;
}

Json curve_to_json(const RewardCurve& curve) {
  struct Visitor {
    Json operator()(const RewardCurve::Exponential& f) const { return {{"c", f.c}, {"a", f.a}}; }
    Json operator()(const RewardCurve::Polynomial& f) const { return {{"c", f.c}, {"b", f.b}, {"rho", f.rho}}; }
    Json operator()(const RewardCurve::LinearCapped& f) const {
      return {{"slope", rational_to_string(f.slope)},
              {"cap", rational_to_string(f.cap)},
              {"offset", rational_to_string(f.offset)}};
    }
    Json operator()(const RewardCurve::Constant& f) const { return {{"value", f.value}}; }
    Json operator()(const RewardCurve::Tabulated& f) const { return {{"values", f.values}}; }
  };
  return std::visit(Visitor{}, curve.family());
}

RewardCurve curve_from_json(const std::string& family, const Json& p, const std::string& where) {
  if (!p.is_object()) throw ConfigError(where + ": params must be an object");
  try {
    if (family == "exponential") {
      reject_unknown(p, {"c", "a"}, where);
      return RewardCurve::exponential(number(p, "c", where), number(p, "a", where));
    }
    if (family == "polynomial") {
      reject_unknown(p, {"c", "b", "rho"}, where);
      return RewardCurve::polynomial(number(p, "c", where), number(p, "b", where), number(p, "rho", where));
    }
    if (family == "linear_capped") {
      reject_unknown(p, {"slope", "cap", "offset"}, where);
      return RewardCurve::linear_capped(rational_from_json(field(p, "slope", where), where + ".slope"),
                                        rational_from_json(field(p, "cap", where), where + ".cap"),
                                        rational_from_json(field(p, "offset", where), where + ".offset"));
    }
    if (family == "constant") {
      reject_unknown(p, {"value"}, where);
      return RewardCurve::constant(number(p, "value", where));
    }
    if (family == "tabulated") {
      reject_unknown(p, {"values"}, where);
      const Json& values = field(p, "values", where);
      if (!values.is_array()) throw ConfigError(where + ".values: expected an array");
      std::vector<double> table;
      for (const auto& v : values) {
        if (!v.is_number()) throw ConfigError(where + ".values: expected numbers");
        table.push_back(v.get<double>());
      }
      return RewardCurve::tabulated(std::move(table));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown curve family '" + family + "'");
}

Json law_params_to_json(const RewardLaw& law) {
  if (law.kind() == LawKind::Bernoulli) return Json::object();
  return {{"half_width", law.half_width()},
          {"proxy", law.proxy() == SubgaussianProxy::Hoeffding ? "hoeffding" : "tight"}};
}

RewardLaw law_from_json(const std::string& name, const Json& p, const std::string& where) {
  if (!p.is_object()) throw ConfigError(where + ": law_params must be an object");
  if (name == "bernoulli") {
    reject_unknown(p, {}, where);
    return RewardLaw::bernoulli();
  }
  if (name == "bounded_uniform") {
    reject_unknown(p, {"half_width", "proxy"}, where);
    auto proxy = SubgaussianProxy::Tight;
    if (auto it = p.find("proxy"); it != p.end()) {
      if (*it == "hoeffding") {
        proxy = SubgaussianProxy::Hoeffding;
      } else if (*it != "tight") {
        throw ConfigError(where + ".proxy: expected \"tight\" or \"hoeffding\"");
      }
    }
    try {
      return RewardLaw::bounded_uniform(number(p, "half_width", where), proxy);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": unknown reward law '" + name + "'");
}

}  // namespace

std::string rational_to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from_json(const Json& value, const std::string& where) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_number()) {
    try {
      return to_rational(value.get<double>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (!value.is_string()) throw ConfigError(where + ": expected a number or a \"p/q\" string");
  const auto text = value.get<std::string>();
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text, where));
  const std::int64_t num = parse_int(std::string_view(text).substr(0, slash), where);
  const std::int64_t den = parse_int(std::string_view(text).substr(slash + 1), where);
  if (den == 0) throw ConfigError(where + ": zero denominator");
  return Rational(num, den);
}

Json instance_to_json(const Instance& instance) {
  Json arms = Json::array();
  for (const auto& arm : instance.arms()) {
    arms.push_back({{"family", std::string(arm.curve.family_name())},
                    {"params", curve_to_json(arm.curve)},
                    {"law", arm.law.binary() ? "bernoulli" : "bounded_uniform"},
                    {"law_params", law_params_to_json(arm.law)}});
  }
  return {{"horizon", instance.horizon()}, {"arms", std::move(arms)}};
}

Instance instance_from_json(const Json& doc) {
  const std::string root = "instance";
  if (!doc.is_object()) throw ConfigError(root + ": expected an object");
  reject_unknown(doc, {"horizon", "arms"}, root);
  const Json& horizon = field(doc, "horizon", root);
  const bool integral = horizon.is_number_unsigned() || (horizon.is_number_integer() && horizon.get<std::int64_t>() > 0);
  if (!integral || horizon.get<std::uint64_t>() == 0) {
    throw ConfigError(root + ".horizon: expected a positive integer");
  }
  const Json& arms = field(doc, "arms", root);
  if (!arms.is_array() || arms.empty()) throw ConfigError(root + ".arms: expected a non-empty array");

  std::vector<Arm> parsed;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::string where = root + ".arms[" + std::to_string(i) + "]";
    const Json& a = arms[i];
    if (!a.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown(a, {"family", "params", "law", "law_params"}, where);
    const Json& family = field(a, "family", where);
    if (!family.is_string()) throw ConfigError(where + ".family: expected a string");
    RewardCurve curve = curve_from_json(family.get<std::string>(), field(a, "params", where), where + ".params");
    std::string law = "bernoulli";
    if (auto it = a.find("law"); it != a.end()) {
      if (!it->is_string()) throw ConfigError(where + ".law: expected a string");
      law = it->get<std::string>();
    }
    const Json empty = Json::object();
    auto lp = a.find("law_params");
    parsed.push_back({std::move(curve), law_from_json(law, lp == a.end() ? empty : *lp, where + ".law_params")});
  }
  return Instance(std::move(parsed), horizon.get<std::uint64_t>());
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  write_json_file(path, instance_to_json(instance));
}

std::string instance_hash(const Instance& instance) {
  const std::string canonical = instance_to_json(instance).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace risingts
