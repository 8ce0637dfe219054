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

// tripart: fitting, sampling, party daemon, benchmarks and accuracy reports.
//
// Exit codes: 0 ok, 1 unexpected, 2 argument, 3 I/O, 4 checksum, 5 handshake,
// 6 transport, 7 protocol abort, 8 integrity, 9 range.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tripart/config.hpp"
#include "tripart/error.hpp"
#include "tripart/fit.hpp"
#include "tripart/reference.hpp"
#include "tripart/service.hpp"

using namespace tripart;
using nlohmann::json;

namespace {

// Flat key=value report; --json prints the same keys as one object.
class Report {
 public:
  void add(const std::string& key, const json& value) {
    rows_.emplace_back(key, value);
  }
  void add_cost(const CostReport& cost) {
    std::istringstream in(cost.to_text());
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      add(line.substr(0, eq), std::stoull(line.substr(eq + 1)));
    }
  }
  void print(std::ostream& os, bool as_json) const {
    if (as_json) {
      json j = json::object();
      for (const auto& [k, v] : rows_) j[k] = v;
      os << j.dump(2) << "\n";
      return;
    }
    for (const auto& [k, v] : rows_) {
      os << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump())
         << "\n";
    }
  }

 private:
  std::vector<std::pair<std::string, json>> rows_;
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  bool json_out = false;
  bool progress = false;

  Config load() const {
    Config c = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ArgumentError("--set expects key=value, got '" + kv + "'");
      }
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
  }

  StepCallback callback() const {
    if (!progress) return {};
    return [](int step, int total) {
      std::cerr << "step " << step << "/" << total << "\n";
    };
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "Config file (key=value lines)");
  cmd->add_option("--set", c.overrides, "Override a config key: key=value");
  cmd->add_flag("--json", c.json_out, "Print the report as JSON");
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- fit

struct FitArgs {
  std::string function;
  std::vector<double> interval;
  int degree = -1;
  int samples = 4096;
  std::string out;
  bool json_out = false;
};

void write_piece(const std::string& path, const std::string& function,
                 double lo, double hi, const std::vector<double>& c,
                 const std::vector<int>& powers) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write coefficient file '" + path + "'");
  os << "# " << function << " on [" << lo << ", " << hi
     << "], monomial coefficients\n"
     << std::setprecision(17);
  for (std::size_t j = 0; j < c.size(); ++j) {
    os << c[j] << "  # x^" << powers[j] << "\n";
  }
  if (!os) throw IoError("write failed for '" + path + "'");
}

int cmd_fit(const FitArgs& a) {
  Report r;
  r.add("function", a.function);
  std::function<double(double)> exact;
  if (a.function == "exp") {
    exact = reference::exact_exp;
  } else if (a.function == "silu") {
    exact = reference::exact_silu;
  } else if (a.function == "mish") {
    exact = reference::exact_mish;
  } else {
    throw ArgumentError("unknown function '" + a.function +
                        "' (expected exp, silu or mish)");
  }
  if (!a.interval.empty() && a.interval.size() != 2) {
    throw ArgumentError("--interval takes two numbers");
  }

  if (a.function == "exp") {
    const double lo = a.interval.empty() ? -14.0 : a.interval[0];
    const double hi = a.interval.empty() ? 0.0 : a.interval[1];
    if (!(lo < hi)) throw ArgumentError("degenerate fit interval");
    if (hi != 0.0) throw ArgumentError("exp fits use an interval [t_exp, 0]");
    const auto fit = fit_exp_chebyshev(lo, a.degree < 0 ? 7 : a.degree, a.samples);
    const auto rep = fit_report(
        [&](double x) { return approx_chebyshev(x, fit); }, exact, lo, hi,
        a.samples);
    if (!a.out.empty()) save_exp_coefficients(a.out, fit);
    r.add("interval", json::array({lo, hi}));
    r.add("degree", fit.degree());
    for (std::size_t j = 0; j < fit.coeffs.size(); ++j) {
      r.add("C_" + std::to_string(j), fit.coeffs[j]);
    }
    r.add("max_abs", rep.max_abs);
    r.add("mse", rep.mse);
    r.add("worst_x", rep.worst_x);
  } else if (a.interval.empty()) {
    const Activation kind = parse_activation(a.function);
    const auto fit = fit_piecewise(kind, a.samples);
    const auto rep = fit_report(
        [&](double x) { return approx_activation(x, fit); }, exact, -8.0, 8.0,
        a.samples);
    if (!a.out.empty()) save_activation_coefficients(a.out, fit);
    const char* f0[] = {"c0", "c1", "c2"};
    const char* f1[] = {"c0", "c1", "c2", "c4", "c6"};
    for (int j = 0; j < 3; ++j) r.add(std::string("F0.") + f0[j], fit.f0[j]);
    for (int j = 0; j < 5; ++j) r.add(std::string("F1.") + f1[j], fit.f1[j]);
    r.add("max_abs", rep.max_abs);
    r.add("mse", rep.mse);
    r.add("worst_x", rep.worst_x);
  } else {
    const double lo = a.interval[0];
    const double hi = a.interval[1];
    const auto powers = piece_powers(a.degree < 0 ? 2 : a.degree);
    const auto c = fit_monomials(exact, lo, hi, powers, a.samples);
    const auto rep = fit_report(
        [&](double x) { return eval_monomials(x, c, powers); }, exact, lo, hi,
        a.samples);
    if (!a.out.empty()) write_piece(a.out, a.function, lo, hi, c, powers);
    r.add("interval", json::array({lo, hi}));
    for (std::size_t j = 0; j < c.size(); ++j) {
      r.add("x^" + std::to_string(powers[j]), c[j]);
    }
    r.add("max_abs", rep.max_abs);
    r.add("mse", rep.mse);
    r.add("worst_x", rep.worst_x);
  }
  r.print(std::cout, a.json_out);
  return 0;
}

// ---- init-params

struct InitArgs {
  Common common;
  std::string out;
  std::uint64_t seed = 11;
};

int cmd_init_params(const InitArgs& a) {
  const Config cfg = a.common.load();
  DenoiserShape shape;
  shape.pixels = cfg.image_w * cfg.image_h;
  save_params(a.out, init_params(shape, a.seed));
  Report r;
  r.add("params", a.out);
  r.add("pixels", shape.pixels);
  r.add("seed", a.seed);
  r.print(std::cout, a.common.json_out);
  return 0;
}

// ---- sample

struct SampleArgs {
  Common common;
  std::string params;
  std::string mode = "mpc-local";
  std::string out = "sample";
};

int cmd_sample(const SampleArgs& a) {
  const Config cfg = a.common.load();
  const DenoiserParams params = load_params(a.params);
  const SamplerConfig sc = cfg.sampler_config();
  Report r;
  r.add("mode", a.mode);
  r.add("sampler", sampler_name(cfg.sampler));
  r.add("steps", cfg.steps);
  r.add("activation", activation_name(cfg.activation));
  r.add("seed", cfg.seed);
  r.add("config_hash", cfg.hash());

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> x;
  std::optional<CostReport> cost;
  if (a.mode == "plain" || a.mode == "plain-exact") {
    const auto flavor = a.mode == "plain" ? reference::Flavor::kApproximated
                                          : reference::Flavor::kExact;
    x = sample_plain(params, sc,
                     reference::plain_ops(flavor, sc.denoiser, cfg.encoding()),
                     a.common.callback())
            .data;
  } else if (a.mode == "mpc-local" || a.mode == "mpc-tcp") {
    const Job job = make_sample_job(cfg, params);
    const JobOutput out = a.mode == "mpc-local"
                              ? run_local_job(cfg, job, a.common.callback())
                              : run_tcp_client(cfg, job, a.common.callback());
    x = cfg.encoding().decode(out.value.data);
    cost = out.cost;
  } else {
    throw ArgumentError("unknown mode '" + a.mode +
                        "' (expected plain, plain-exact, mpc-local or mpc-tcp)");
  }
  const double wall = elapsed_ms(t0);

  const std::string pgm = a.out + ".pgm";
  const std::string raw = a.out + ".raw";
  save_pgm(pgm, cfg.image_w, cfg.image_h, to_grayscale(x));
  save_raw(raw, x);
  r.add("image", pgm);
  r.add("raw", raw);
  r.add("wall_ms", std::round(wall * 1000.0) / 1000.0);
  if (cost) r.add_cost(*cost);
  r.print(std::cout, a.common.json_out);
  return 0;
}

// ---- party

struct PartyArgs {
  Common common;
  int id = -1;
};

int cmd_party(const PartyArgs& a) {
  if (a.id < 0 || a.id > 2) {
    throw ArgumentError("party id " + std::to_string(a.id) +
                        " outside {0, 1, 2}");
  }
  const Config cfg = a.common.load();
  const LabelCosts costs = run_tcp_party(a.id, cfg, nullptr, a.common.callback());
  Report r;
  r.add("party", a.id);
  r.add("config_hash", cfg.hash());
  PartyCost total;
  for (const auto& [label, c] : costs) total += c;
  r.add("bytes", total.bytes);
  r.add("payload", total.payload);
  r.add("messages", total.messages);
  r.add("rounds", total.rounds);
  for (const auto& [label, c] : costs) {
    r.add("protocol." + label + ".bytes", c.bytes);
    r.add("protocol." + label + ".rounds", c.rounds);
  }
  r.print(std::cout, a.common.json_out);
  return 0;
}

// ---- bench

struct BenchArgs {
  Common common;
  std::vector<std::string> protocols;
  std::vector<std::size_t> sizes{64};
  int trials = 3;
};

int cmd_bench(const BenchArgs& a) {
  const Config cfg = a.common.load();
  for (const auto& p : a.protocols) find_op(p);
  if (a.trials < 1) throw ArgumentError("--trials must be at least 1");
  std::vector<BenchResult> rows;
  for (std::size_t n : a.sizes) {
    for (const auto& p : a.protocols) {
      rows.push_back(bench_protocol(cfg, p, n, a.trials));
    }
  }
  // Communication ratio of each baseline to its counterpart, when both ran.
  json ratios = json::array();
  for (const auto& b : rows) {
    if (b.protocol.rfind("baseline-", 0) != 0) continue;
    const std::string ours = b.protocol.substr(9);
    for (const auto& o : rows) {
      if (o.protocol == ours && o.size == b.size) {
        ratios.push_back({{"protocol", ours},
                          {"size", o.size},
                          {"bytes_ratio", b.bytes / o.bytes}});
      }
    }
  }
  if (a.common.json_out) {
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"protocol", r.protocol}, {"size", r.size},
                   {"trials", r.trials}, {"bytes", r.bytes},
                   {"payload", r.payload}, {"messages", r.messages},
                   {"rounds", r.rounds}, {"wall_ms", r.wall_ms}});
    }
    std::cout << json{{"results", j}, {"baseline_ratios", ratios}}.dump(2)
              << "\n";
    return 0;
  }
  std::printf("%-18s %8s %12s %12s %8s %10s\n", "protocol", "size", "bytes",
              "payload", "rounds", "wall_ms");
  for (const auto& r : rows) {
    std::printf("%-18s %8zu %12.0f %12.0f %8.0f %10.3f\n", r.protocol.c_str(),
                r.size, r.bytes, r.payload, r.rounds, r.wall_ms);
  }
  if (!ratios.empty()) {
    std::printf("\n%-18s %8s %12s\n", "baseline/ours", "size", "bytes");
    for (const auto& q : ratios) {
      std::printf("%-18s %8zu %12.3f\n",
                  q["protocol"].get<std::string>().c_str(),
                  q["size"].get<std::size_t>(), q["bytes_ratio"].get<double>());
    }
  }
  return 0;
}

// ---- accuracy

struct AccuracyArgs {
  std::string activation;
  std::size_t grid = 100000;
  std::vector<double> range;
  bool json_out = false;
};

int cmd_accuracy(const AccuracyArgs& a) {
  std::function<double(double)> approx, exact;
  double lo = -8.0, hi = 8.0;
  if (a.activation == "silu") {
    approx = approx_silu;
    exact = reference::exact_silu;
  } else if (a.activation == "mish") {
    approx = approx_mish;
    exact = reference::exact_mish;
  } else if (a.activation == "exp") {
    approx = [](double x) { return approx_negexp(x); };
    exact = reference::exact_exp;
    lo = -14.0;
    hi = 0.0;
  } else {
    throw ArgumentError("unknown activation '" + a.activation +
                        "' (expected silu, mish or exp)");
  }
  if (!a.range.empty()) {
    if (a.range.size() != 2) throw ArgumentError("--range takes two numbers");
    lo = a.range[0];
    hi = a.range[1];
  }
  if (a.grid < 2) throw ArgumentError("--grid must be at least 2");
  const auto g = reference::grid_error(approx, exact, lo, hi, a.grid);
  Report r;
  r.add("activation", a.activation);
  r.add("grid", a.grid);
  r.add("lo", lo);
  r.add("hi", hi);
  r.add("mse", g.mse);
  r.add("max_abs", g.max_abs);
  r.add("worst_x", g.worst_x);
  r.print(std::cout, a.json_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-party secure sampling for a toy diffusion model"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Least-squares coefficient fit");
  c_fit->add_option("function", fit.function, "exp, silu or mish")->required();
  c_fit->add_option("--interval", fit.interval, "lo hi")->expected(2);
  c_fit->add_option("--degree", fit.degree, "Polynomial degree");
  c_fit->add_option("--samples", fit.samples, "Grid points")->capture_default_str();
  c_fit->add_option("-o,--output", fit.out, "Coefficient file to write");
  c_fit->add_flag("--json", fit.json_out, "Print the report as JSON");

  InitArgs init;
  auto* c_init = app.add_subcommand("init-params", "Write a seeded random model");
  add_common(c_init, init.common);
  c_init->add_option("-o,--output", init.out, "Parameter file")->required();
  c_init->add_option("--seed", init.seed, "Weight seed")->capture_default_str();

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Generate one image");
  add_common(c_sample, sample.common);
  c_sample->add_option("-p,--params", sample.params, "Parameter file")->required();
  c_sample->add_option("-m,--mode", sample.mode,
                       "plain, plain-exact, mpc-local or mpc-tcp")
      ->capture_default_str();
  c_sample->add_option("-o,--output", sample.out,
                       "Output prefix for .pgm and .raw")
      ->capture_default_str();
  c_sample->add_flag("--progress", sample.common.progress, "Report each step");

  PartyArgs party;
  auto* c_party = app.add_subcommand("party", "Run one TCP party for one job");
  add_common(c_party, party.common);
  c_party->add_option("--id", party.id, "Party index 0, 1 or 2")->required();
  c_party->add_flag("--progress", party.common.progress, "Report each step");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Communication benchmark");
  add_common(c_bench, bench.common);
  c_bench->add_option("--protocol", bench.protocols,
                      "softmax, silu, mish, relu, mul, fixed_mul, neg_exp, "
                      "baseline-softmax, baseline-silu, baseline-mish")
      ->required()
      ->delimiter(',');
  c_bench->add_option("--size", bench.sizes, "Vector sizes")
      ->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--trials", bench.trials, "Trials per entry")
      ->capture_default_str();

  AccuracyArgs acc;
  auto* c_acc = app.add_subcommand("accuracy", "Approximation error on a grid");
  c_acc->add_option("--activation", acc.activation, "silu, mish or exp")
      ->required();
  c_acc->add_option("--grid", acc.grid, "Grid points")->capture_default_str();
  c_acc->add_option("--range", acc.range, "lo hi")->expected(2);
  c_acc->add_flag("--json", acc.json_out, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kArgument);
  }

  try {
    if (c_fit->parsed()) return cmd_fit(fit);
    if (c_init->parsed()) return cmd_init_params(init);
    if (c_sample->parsed()) return cmd_sample(sample);
    if (c_party->parsed()) return cmd_party(party);
    if (c_bench->parsed()) return cmd_bench(bench);
    if (c_acc->parsed()) return cmd_accuracy(acc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
