// Copyright 2026 The Tripart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripart/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tripart/error.hpp"

namespace tripart {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw ArgumentError("config key '" + key + "': not a number: '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ArgumentError("config key '" + key + "': expected true or false, got '" +
                      v + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, p);
}

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct KeyDef {
  Setter set;
  Getter get;
};

const std::map<std::string, KeyDef>& keys() {
  static const std::map<std::string, KeyDef> table = [] {
    std::map<std::string, KeyDef> m;
    auto integer = [&](const std::string& k, auto member) {
      m[k] = {[k, member](Config& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(c.*member)>;
                c.*member = parse_number<T>(k, v);
              },
              [member](const Config& c) { return std::to_string(c.*member); }};
    };
    integer("ring_bits", &Config::ring_bits);
    integer("fraction_bits", &Config::fraction_bits);
    integer("steps", &Config::steps);
    integer("schedule_steps", &Config::schedule_steps);
    integer("seed", &Config::seed);
    integer("image_w", &Config::image_w);
    integer("image_h", &Config::image_h);
    integer("timeout_ms", &Config::timeout_ms);
    m["t_exp"] = {[](Config& c, const std::string& v) {
                    c.t_exp = parse_number<double>("t_exp", v);
                  },
                  [](const Config& c) { return format_double(c.t_exp); }};
    m["exp_coefficients"] = {
        [](Config& c, const std::string& v) { c.exp_coefficients = v; },
        [](const Config& c) { return c.exp_coefficients; }};
    m["activation"] = {
        [](Config& c, const std::string& v) {
          c.activation = parse_activation(v);
        },
        [](const Config& c) { return activation_name(c.activation); }};
    m["sampler"] = {
        [](Config& c, const std::string& v) { c.sampler = parse_sampler(v); },
        [](const Config& c) { return sampler_name(c.sampler); }};
    m["masked_denominator"] = {
        [](Config& c, const std::string& v) {
          c.masked_denominator = parse_bool("masked_denominator", v);
        },
        [](const Config& c) {
          return std::string(c.masked_denominator ? "true" : "false");
        }};
    for (int i = 0; i < 3; ++i) {
      m["party" + std::to_string(i)] = {
          [i](Config& c, const std::string& v) {
            Endpoint::parse(v);
            c.parties[i] = v;
          },
          [i](const Config& c) { return c.parties[i]; }};
    }
    return m;
  }();
  return table;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) {
    throw ArgumentError("unknown config key '" + key + "'");
  }
  try {
    it->second.set(*this, value);
  } catch (const ArgumentError& e) {
    const std::string what = e.what();
    if (what.find("'" + key + "'") != std::string::npos) throw;
    throw ArgumentError("config key '" + key + "': " + what);
  }
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ArgumentError(where + ": expected key=value");
    }
    try {
      c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ArgumentError& e) {
      throw ArgumentError(where + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::validate() const {
  encoding().validate();
  if (t_exp >= 0.0) throw ArgumentError("config key 't_exp': must be negative");
  if (t_exp != -14.0 && exp_coefficients.empty()) {
    throw ArgumentError(
        "config key 't_exp': values other than -14 need exp_coefficients");
  }
  if (timeout_ms <= 0) {
    throw ArgumentError("config key 'timeout_ms': must be positive");
  }
  sampler_config().validate();
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [k, def] : keys()) out += k + "=" + def.get(*this) + "\n";
  return out;
}

std::uint32_t Config::hash() const {
  Handshake h;
  h.config_text = canonical_text();
  return h.config_hash();
}

FixedEncoding Config::encoding() const {
  return FixedEncoding{ring_bits, fraction_bits};
}

SoftMaxConfig Config::softmax() const {
  SoftMaxConfig s;
  s.masked_denominator = masked_denominator;
  if (!exp_coefficients.empty()) {
    s.fit = load_exp_coefficients(exp_coefficients, t_exp);
  }
  return s;
}

SamplerConfig Config::sampler_config() const {
  SamplerConfig s;
  s.kind = sampler;
  s.steps = steps;
  s.schedule_steps = schedule_steps;
  s.image_w = image_w;
  s.image_h = image_h;
  s.seed = seed;
  s.denoiser.activation = activation;
  s.denoiser.softmax = softmax();
  return s;
}

std::array<Endpoint, 3> Config::endpoints() const {
  return {Endpoint::parse(parties[0]), Endpoint::parse(parties[1]),
          Endpoint::parse(parties[2])};
}

}  // namespace tripart
