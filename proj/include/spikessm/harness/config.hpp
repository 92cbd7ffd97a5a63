#pragma once

// Harness configuration: one JSON document with the top-level sections
// {neuron, ssm, bench, energy, seed}. Every section is optional; unknown keys
// at any level are rejected so typos fail loudly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "spikessm/block.hpp"
#include "spikessm/energy.hpp"
#include "spikessm/error.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"

namespace spikessm::harness {

using Json = nlohmann::json;

struct BenchSettings {
  std::vector<std::size_t> lengths{1024, 8192};
  std::size_t channels = 64;
  std::size_t iters = 3;
  FireMode fire_mode = FireMode::kAllZero;
  ConvEngine engine = ConvEngine::kRecurrence;
  std::size_t repeats = 5;
  std::size_t warmup = 2;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

enum class MixInit { kIdentity, kRandom };

struct SsmSettings {
  std::size_t layers = 2;
  std::size_t channels = 4;
  std::size_t state_size = 8;
  double delta = 0.1;
  std::size_t length = 256;
  double input_scale = 1.0;
  NormKind norm = NormKind::kNone;
  bool residual = true;
  MixInit mix = MixInit::kRandom;
  double mix_scale = 1.0;  // random weights ~ N(0, mix_scale^2 / D)
};

struct EnergySettings {
  EnergyModel model;
  std::vector<LayerOps> layers;  // empty: derive from a demo stack run
};

struct Config {
  std::uint64_t seed = 0;
  NeuronParams neuron{0.1, 0.0, 1.0, 1.0, ResetMode::kSoft, 0.0};
  SsmSettings ssm;
  BenchSettings bench;
  EnergySettings energy;

  void validate() const {
    neuron.validate();
    if (bench.lengths.empty()) throw ConfigError("bench.lengths is empty");
    for (auto l : bench.lengths)
      if (l == 0) throw ConfigError("bench.lengths entries must be >= 1");
    if (bench.channels == 0) throw ConfigError("bench.channels must be >= 1");
    if (bench.iters == 0) throw ConfigError("bench.iters must be >= 1");
    if (bench.repeats == 0) throw ConfigError("bench.repeats must be >= 1");
    if (ssm.layers == 0 || ssm.channels == 0 || ssm.state_size == 0 ||
        ssm.length == 0)
      throw ConfigError("ssm layers, channels, state_size, length must be >= 1");
    if (!(ssm.delta > 0.0)) throw ConfigError("ssm.delta must be positive");
    if (!std::isfinite(ssm.input_scale) || !std::isfinite(ssm.mix_scale))
      throw ConfigError("ssm scales must be finite");
    energy.model.validate();
  }
};

namespace detail {

inline void check_keys(const Json& j, std::string_view section,
                       std::initializer_list<std::string_view> allowed) {
  if (!j.is_object())
    throw ConfigError(std::string(section) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known |= key == a;
    if (!known)
      throw ConfigError("unknown key '" + key + "' in " + std::string(section));
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, std::string_view section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

inline std::size_t read_count(const Json& j, const char* key, std::size_t fallback,
                              std::string_view section) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(std::string(section) + "." + key +
                      " must be a non-negative integer");
  return v.get<std::size_t>();
}

template <typename Parse>
auto read_enum(const Json& j, const char* key, decltype(std::declval<Parse>()(""))
               fallback, Parse parse, std::string_view section) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw ConfigError(std::string(section) + "." + key + " must be a string");
  try {
    return parse(j.at(key).get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

inline MixInit parse_mix_init(std::string_view name) {
  if (name == "identity") return MixInit::kIdentity;
  if (name == "random") return MixInit::kRandom;
  throw ParameterError("unknown mix init '" + std::string(name) + "'");
}

inline LayerOps parse_layer(const Json& j) {
  check_keys(j, "energy.layers[]", {"name", "ops", "kind", "spiking_rate"});
  LayerOps layer;
  read(j, "name", layer.name, "energy.layers[]");
  if (!j.contains("ops") || !j.at("ops").is_number())
    throw ConfigError("energy.layers[] needs a numeric 'ops'");
  layer.dense_ops = j.at("ops").get<double>();
  std::string kind = "mac";
  read(j, "kind", kind, "energy.layers[]");
  if (kind != "mac" && kind != "ac")
    throw ConfigError("energy.layers[].kind must be 'mac' or 'ac'");
  layer.spike_input = kind == "ac";
  read(j, "spiking_rate", layer.spiking_rate, "energy.layers[]");
  return layer;
}

}  // namespace detail

inline Config config_from_json(const Json& doc) {
  using detail::check_keys;
  using detail::read;
  using detail::read_count;
  using detail::read_enum;

  Config c;
  check_keys(doc, "config", {"neuron", "ssm", "bench", "energy", "seed"});
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned())
      throw ConfigError("seed must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("neuron")) {
    const Json& n = doc.at("neuron");
    check_keys(n, "neuron", {"tau", "tau_r", "v_th", "u_th", "reset_mode", "u_r"});
    read(n, "tau", c.neuron.tau, "neuron");
    read(n, "tau_r", c.neuron.tau_r, "neuron");
    read(n, "v_th", c.neuron.v_th, "neuron");
    read(n, "u_th", c.neuron.u_th, "neuron");
    read(n, "u_r", c.neuron.u_r, "neuron");
    c.neuron.reset_mode =
        read_enum(n, "reset_mode", c.neuron.reset_mode, parse_reset_mode, "neuron");
  }

  if (doc.contains("ssm")) {
    const Json& s = doc.at("ssm");
    check_keys(s, "ssm", {"layers", "channels", "state_size", "delta", "length",
                          "input_scale", "norm", "residual", "mix", "mix_scale"});
    c.ssm.layers = read_count(s, "layers", c.ssm.layers, "ssm");
    c.ssm.channels = read_count(s, "channels", c.ssm.channels, "ssm");
    c.ssm.state_size = read_count(s, "state_size", c.ssm.state_size, "ssm");
    c.ssm.length = read_count(s, "length", c.ssm.length, "ssm");
    read(s, "delta", c.ssm.delta, "ssm");
    read(s, "input_scale", c.ssm.input_scale, "ssm");
    read(s, "residual", c.ssm.residual, "ssm");
    read(s, "mix_scale", c.ssm.mix_scale, "ssm");
    c.ssm.norm = read_enum(s, "norm", c.ssm.norm, parse_norm_kind, "ssm");
    c.ssm.mix = read_enum(s, "mix", c.ssm.mix, detail::parse_mix_init, "ssm");
  }

  if (doc.contains("bench")) {
    const Json& b = doc.at("bench");
    check_keys(b, "bench", {"lengths", "channels", "iters", "fire_mode", "engine",
                            "repeats", "warmup", "threads"});
    if (b.contains("lengths")) {
      const Json& l = b.at("lengths");
      if (!l.is_array()) throw ConfigError("bench.lengths must be an array");
      c.bench.lengths.clear();
      for (const auto& v : l) {
        if (!v.is_number_unsigned())
          throw ConfigError("bench.lengths entries must be positive integers");
        c.bench.lengths.push_back(v.get<std::size_t>());
      }
    }
    c.bench.channels = read_count(b, "channels", c.bench.channels, "bench");
    c.bench.iters = read_count(b, "iters", c.bench.iters, "bench");
    c.bench.repeats = read_count(b, "repeats", c.bench.repeats, "bench");
    c.bench.warmup = read_count(b, "warmup", c.bench.warmup, "bench");
    c.bench.threads = read_count(b, "threads", c.bench.threads, "bench");
    c.bench.fire_mode =
        read_enum(b, "fire_mode", c.bench.fire_mode, parse_fire_mode, "bench");
    c.bench.engine =
        read_enum(b, "engine", c.bench.engine, parse_conv_engine, "bench");
  }

  if (doc.contains("energy")) {
    const Json& e = doc.at("energy");
    check_keys(e, "energy", {"e_mac", "e_ac", "layers"});
    read(e, "e_mac", c.energy.model.e_mac, "energy");
    read(e, "e_ac", c.energy.model.e_ac, "energy");
    if (e.contains("layers")) {
      if (!e.at("layers").is_array())
        throw ConfigError("energy.layers must be an array");
      for (const auto& l : e.at("layers"))
        c.energy.layers.push_back(detail::parse_layer(l));
    }
  }

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline Config config_from_string(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_string(text.str());
}

inline Json config_to_json(const Config& c) {
  Json layers = Json::array();
  for (const auto& l : c.energy.layers) {
    layers.push_back({{"name", l.name},
                      {"ops", l.dense_ops},
                      {"kind", l.spike_input ? "ac" : "mac"},
                      {"spiking_rate", l.spiking_rate}});
  }
  return {
      {"seed", c.seed},
      {"neuron",
       {{"tau", c.neuron.tau},
        {"tau_r", c.neuron.tau_r},
        {"v_th", c.neuron.v_th},
        {"u_th", c.neuron.u_th},
        {"u_r", c.neuron.u_r},
        {"reset_mode", std::string(to_string(c.neuron.reset_mode))}}},
      {"ssm",
       {{"layers", c.ssm.layers},
        {"channels", c.ssm.channels},
        {"state_size", c.ssm.state_size},
        {"delta", c.ssm.delta},
        {"length", c.ssm.length},
        {"input_scale", c.ssm.input_scale},
        {"norm", std::string(to_string(c.ssm.norm))},
        {"residual", c.ssm.residual},
        {"mix", c.ssm.mix == MixInit::kIdentity ? "identity" : "random"},
        {"mix_scale", c.ssm.mix_scale}}},
      {"bench",
       {{"lengths", c.bench.lengths},
        {"channels", c.bench.channels},
        {"iters", c.bench.iters},
        {"fire_mode", std::string(to_string(c.bench.fire_mode))},
        {"engine", std::string(to_string(c.bench.engine))},
        {"repeats", c.bench.repeats},
        {"warmup", c.bench.warmup},
        {"threads", c.bench.threads}}},
      {"energy",
       {{"e_mac", c.energy.model.e_mac},
        {"e_ac", c.energy.model.e_ac},
        {"layers", layers}}},
  };
}

}  // namespace spikessm::harness
