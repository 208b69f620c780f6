#include "topoqfi/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace topoqfi {

namespace {

using nlohmann::json;

const std::map<std::string, std::vector<std::string>> kFamilyParams = {
    {"qwz", {"m"}},
    {"haldane", {"t1", "t2", "phi", "M"}},
    {"winding", {"N", "m"}},
};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path, std::vector<std::string>& errors) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      errors.push_back(path + item.key() + ": unknown key");
    }
  }
}

ModelConfig parse_model(const json& j, std::vector<std::string>& errors) {
  ModelConfig model;
  if (!j.is_object()) {
    errors.push_back("model: must be an object");
    return model;
  }
  if (!j.contains("family") || !j.at("family").is_string()) {
    errors.push_back("model.family: required string");
    return model;
  }
  model.family = j.at("family").get<std::string>();
  const auto family_it = kFamilyParams.find(model.family);
  if (family_it == kFamilyParams.end()) {
    errors.push_back("model.family: unknown model family '" + model.family + "'");
    return model;
  }

  std::set<std::string> allowed = {"family", "flatten", "flat_energies"};
  for (const auto& p : family_it->second) allowed.insert(p);
  reject_unknown_keys(j, allowed, "model.", errors);

  for (const auto& p : family_it->second) {
    if (!j.contains(p) || !j.at(p).is_number()) {
      errors.push_back("model." + p + ": required numeric parameter for family '" +
                       model.family + "'");
      continue;
    }
    const double value = j.at(p).get<double>();
    if (!std::isfinite(value)) {
      errors.push_back("model." + p + ": must be finite");
      continue;
    }
    model.params[p] = value;
  }

  if (model.family == "haldane" && model.params.count("t1") && model.params.at("t1") == 0.0) {
    errors.push_back("model.t1: must be nonzero");
  }
  if (model.family == "winding" && model.params.count("N")) {
    const double n = model.params.at("N");
    if (n < 1.0 || n != std::floor(n)) {
      errors.push_back("model.N: must be an integer >= 1");
    }
  }

  if (j.contains("flatten")) {
    if (!j.at("flatten").is_boolean()) {
      errors.push_back("model.flatten: must be a boolean");
    } else {
      model.flatten = j.at("flatten").get<bool>();
    }
  }
  if (j.contains("flat_energies")) {
    if (!j.at("flat_energies").is_array()) {
      errors.push_back("model.flat_energies: must be an array of reals");
    } else {
      std::vector<double> energies;
      bool ok = true;
      for (const auto& e : j.at("flat_energies")) {
        if (!e.is_number()) {
          errors.push_back("model.flat_energies: must be an array of reals");
          ok = false;
          break;
        }
        energies.push_back(e.get<double>());
      }
      if (ok) {
        for (std::size_t i = 1; i < energies.size(); ++i) {
          if (!(energies[i] > energies[i - 1])) {
            errors.push_back("model.flat_energies: must be strictly increasing");
            ok = false;
            break;
          }
        }
      }
      if (ok) model.flat_energies = energies;
    }
  }
  return model;
}

double parse_beta(const json& j, std::vector<std::string>& errors) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    errors.push_back("qfi.beta: must be a positive number or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  if (j.is_number()) {
    const double beta = j.get<double>();
    if (!(beta > 0.0)) {
      errors.push_back("qfi.beta: must be > 0");
      return std::numeric_limits<double>::infinity();
    }
    return beta;
  }
  errors.push_back("qfi.beta: must be a positive number or \"inf\"");
  return std::numeric_limits<double>::infinity();
}

}  // namespace

int model_dim(const ModelConfig& model) {
  (void)model;  // every registered family is two-band
  return 2;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax error: ") + e.what()});
  }
  return parse_config(j);
}

RunConfig parse_config(const nlohmann::json& j) {
  std::vector<std::string> errors;
  RunConfig config;

  if (!j.is_object()) {
    throw ConfigError({"config root must be an object"});
  }
  reject_unknown_keys(
      j, {"model", "grid", "filled", "qfi", "bounds", "speedlimit", "output", "seed"}, "",
      errors);

  if (!j.contains("model")) {
    errors.push_back("model: required block");
  } else {
    config.model = parse_model(j.at("model"), errors);
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) {
      errors.push_back("grid: must be an object {nx, ny}");
    } else {
      reject_unknown_keys(g, {"nx", "ny"}, "grid.", errors);
      auto read_dim = [&](const char* key, int& out) {
        if (!g.contains(key)) return;
        if (!g.at(key).is_number_integer()) {
          errors.push_back(std::string("grid.") + key + ": must be an integer");
          return;
        }
        out = g.at(key).get<int>();
        if (out < 8) {
          errors.push_back(std::string("grid.") + key + ": " + key + " below minimum 8");
        }
      };
      read_dim("nx", config.nx);
      read_dim("ny", config.ny);
    }
  }

  const int dim = model_dim(config.model);
  if (j.contains("filled")) {
    const auto& f = j.at("filled");
    if (!f.is_array() || f.empty()) {
      errors.push_back("filled: must be a nonempty array of band indices (1-based)");
    } else {
      config.filled.clear();
      for (const auto& b : f) {
        if (!b.is_number_integer()) {
          errors.push_back("filled: entries must be integers");
          break;
        }
        config.filled.push_back(b.get<int>());
      }
    }
  }
  for (int b : config.filled) {
    if (b < 1 || b > dim) {
      errors.push_back("filled: band index " + std::to_string(b) + " outside 1.." +
                       std::to_string(dim));
    }
  }
  if (static_cast<int>(config.filled.size()) >= dim) {
    errors.push_back("filled: must be a proper subset of the bands");
  }

  if (j.contains("qfi")) {
    const auto& q = j.at("qfi");
    if (!q.is_object()) {
      errors.push_back("qfi: must be an object");
    } else {
      reject_unknown_keys(q, {"q_list", "directions", "n_alpha", "beta"}, "qfi.", errors);
      if (q.contains("q_list")) {
        if (!q.at("q_list").is_array()) {
          errors.push_back("qfi.q_list: must be an array of reals");
        } else {
          config.q_list.clear();
          for (const auto& v : q.at("q_list")) {
            if (!v.is_number() || !(v.get<double>() >= 0.0)) {
              errors.push_back("qfi.q_list: entries must be reals >= 0");
              break;
            }
            config.q_list.push_back(v.get<double>());
          }
        }
      }
      if (q.contains("directions")) {
        const std::string d = q.at("directions").is_string()
                                  ? q.at("directions").get<std::string>()
                                  : std::string();
        if (d == "x") {
          config.directions = Direction::X;
        } else if (d == "y") {
          config.directions = Direction::Y;
        } else if (d == "averaged") {
          config.directions = Direction::Averaged;
        } else {
          errors.push_back("qfi.directions: must be one of \"x\", \"y\", \"averaged\"");
        }
      }
      if (q.contains("n_alpha")) {
        if (!q.at("n_alpha").is_number_integer() || q.at("n_alpha").get<int>() < 1) {
          errors.push_back("qfi.n_alpha: must be an integer >= 1");
        } else {
          config.n_alpha = q.at("n_alpha").get<int>();
        }
      }
      if (q.contains("beta")) config.beta = parse_beta(q.at("beta"), errors);
    }
  }

  if (j.contains("bounds")) {
    if (!j.at("bounds").is_boolean()) {
      errors.push_back("bounds: must be a boolean");
    } else {
      config.bounds = j.at("bounds").get<bool>();
    }
  }

  if (j.contains("speedlimit")) {
    const auto& s = j.at("speedlimit");
    if (!s.is_object()) {
      errors.push_back("speedlimit: must be an object");
    } else {
      reject_unknown_keys(s, {"q_min", "q_max", "n_q", "v0"}, "speedlimit.", errors);
      auto read_real = [&](const char* key, double& out) {
        if (!s.contains(key)) return;
        if (!s.at(key).is_number() || !std::isfinite(s.at(key).get<double>())) {
          errors.push_back(std::string("speedlimit.") + key + ": must be a finite number");
          return;
        }
        out = s.at(key).get<double>();
      };
      read_real("q_min", config.speedlimit.q_min);
      read_real("q_max", config.speedlimit.q_max);
      read_real("v0", config.speedlimit.v0);
      if (s.contains("n_q")) {
        if (!s.at("n_q").is_number_integer() || s.at("n_q").get<int>() < 1) {
          errors.push_back("speedlimit.n_q: must be an integer >= 1");
        } else {
          config.speedlimit.n_q = s.at("n_q").get<int>();
        }
      }
      if (!(config.speedlimit.q_min > 0.0)) {
        errors.push_back("speedlimit.q_min: must be > 0 (the 1/q potential is singular at 0)");
      }
      if (!(config.speedlimit.q_max >= config.speedlimit.q_min)) {
        errors.push_back("speedlimit.q_max: must be >= q_min");
      }
    }
  }

  if (j.contains("output")) {
    if (!j.at("output").is_string() || j.at("output").get<std::string>().empty()) {
      errors.push_back("output: must be a nonempty string");
    } else {
      config.output = j.at("output").get<std::string>();
    }
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      errors.push_back("seed: must be a nonnegative integer");
    } else if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0) {
      errors.push_back("seed: must be a nonnegative integer");
    } else {
      config.seed = j.at("seed").get<std::uint64_t>();
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  return config;
}

nlohmann::json serialize_config(const RunConfig& config) {
  json model{{"family", config.model.family}, {"flatten", config.model.flatten}};
  for (const auto& [key, value] : config.model.params) model[key] = value;
  if (config.model.flat_energies) model["flat_energies"] = *config.model.flat_energies;

  json qfi{{"q_list", config.q_list},
           {"directions", to_string(config.directions)},
           {"n_alpha", config.n_alpha}};
  if (std::isinf(config.beta)) {
    qfi["beta"] = "inf";
  } else {
    qfi["beta"] = config.beta;
  }

  return json{{"model", model},
              {"grid", {{"nx", config.nx}, {"ny", config.ny}}},
              {"filled", config.filled},
              {"qfi", qfi},
              {"bounds", config.bounds},
              {"speedlimit",
               {{"q_min", config.speedlimit.q_min},
                {"q_max", config.speedlimit.q_max},
                {"n_q", config.speedlimit.n_q},
                {"v0", config.speedlimit.v0}}},
              {"output", config.output},
              {"seed", config.seed}};
}

}  // namespace topoqfi
