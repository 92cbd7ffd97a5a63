// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spikessm/energy.hpp"
#include "spikessm/harness/commands.hpp"
#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"
#include "support/oracles.hpp"

using namespace spikessm;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Lif {
  NeuronParams params;
  oracle::Lif ref;
  oracle::Vec input;
};

// Parameters drawn as in the neuron property tests; instances whose serial
// trajectory has |k_t - m_t| < 1e-12 at any step are redrawn.
Lif draw(std::mt19937_64& rng, bool refractory, std::size_t length, std::size_t& redraws) {
  std::uniform_real_distribution<double> tau(0.05, 0.95), tau_r(0.0, 0.95),
      v_th(0.5, 2.0), u_th(0.0, 2.0);
  std::normal_distribution<double> gauss;
  while (true) {
    Lif c;
    c.ref = {tau(rng), refractory ? tau_r(rng) : 0.0, v_th(rng), u_th(rng), refractory};
    c.params = refractory
                   ? NeuronParams::refractory(c.ref.tau, c.ref.tau_r, c.ref.v_th, c.ref.u_th)
                   : NeuronParams::soft(c.ref.tau, c.ref.v_th, c.ref.u_th);
    c.input.resize(length);
    for (auto& v : c.input) v = gauss(rng);
    const auto run = oracle::simulate(c.ref, c.input);
    const auto [k, m] = oracle::split(c.ref, c.input, run.s);
    if (oracle::min_gap(k, m) >= 1e-12) return c;
    ++redraws;
  }
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(1);
  const std::size_t lengths[] = {16, 64, 256};
  std::size_t ok_fft = 0, ok_rec = 0, redraws = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = lengths[i % 3];
    const auto c = draw(rng, i % 2 == 1, len, redraws);
    const auto truth = oracle::simulate(c.ref, c.input).s;
    auto matches = [&](ConvEngine engine) {
      PmbcOptions o;
      o.max_iters = len;
      o.engine = engine;
      const auto r = pmbc_solve(c.params, Trace(c.input), o);
      if (r.fuzzy_rate != 0.0) return false;
      for (std::size_t t = 0; t < len; ++t)
        if (r.spikes[t] != (truth[t] == 1)) return false;
      return true;
    };
    ok_fft += matches(ConvEngine::kFft);
    ok_rec += matches(ConvEngine::kRecurrence);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "fft %zu/%zu, recurrence %zu/%zu, %zu tie redraws",
                ok_fft, n, ok_rec, n, redraws);
  return {ok_fft == n && ok_rec == n, buf};
}

Verdict decomposition_identity() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> len(1, 256);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    std::size_t unused = 0;
    const auto c = draw(rng, i % 2 == 1, len(rng), unused);
    const auto run = oracle::simulate(c.ref, c.input);
    SpikeTrain s(run.s.size());
    for (std::size_t t = 0; t < s.size(); ++t) s.set(t, run.s[t] == 1);
    const auto d = decompose(c.params, Trace(c.input), s);
    for (std::size_t t = 0; t < s.size(); ++t) {
      const double scale = std::max({1.0, std::abs(d.k[t]), std::abs(d.m[t])});
      worst = std::max(worst,
                       std::abs(run.u[t] - (d.k[t] - d.m[t] + c.ref.v_th)) / scale);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "500 instances, worst relative error %.3g", worst);
  return {worst <= 1e-9, buf};
}

Verdict convergence_at_three() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<Trace> inputs(64, Trace(1024));
  for (auto& in : inputs)
    for (auto& v : in) v = gauss(rng);
  PmbcOptions o;
  o.max_iters = 3;
  o.threads = 0;
  double worst = 1.0;
  std::string detail;
  for (auto engine : {ConvEngine::kFft, ConvEngine::kRecurrence}) {
    o.engine = engine;
    double mean = 0.0;
    for (const auto& r : pmbc_solve_batch(NeuronParams::soft(0.1, 1.0, 1.0), inputs, o))
      mean += 1.0 - r.fuzzy_rate;
    mean /= 64.0;
    worst = std::min(worst, mean);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s %.4f", detail.empty() ? "" : ", ",
                  std::string(to_string(engine)).c_str(), mean);
    detail += buf;
  }
  return {worst >= 0.95, "explicit fraction " + detail};
}

Verdict speedup_trend() {
  harness::Config c;
  c.bench.channels = 64;
  c.bench.repeats = 31;
  c.bench.warmup = 3;
  const auto short_run = harness::bench_length(c, 1024);
  const auto long_run = harness::bench_length(c, 8192);
  const double s1 = short_run.speedup(), s2 = long_run.speedup();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "speedup %.3f at L=1024, %.3f at L=8192 (%s engine, 64 channels)", s1, s2,
                std::string(to_string(c.bench.engine)).c_str());
  return {s1 > 1.0 && s2 > s1, buf};
}

Verdict fft_correctness() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t lengths[] = {16, 64, 256, 1024, 4096};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = lengths[i % 5];
    oracle::Vec x(n), h(n);
    for (auto& v : x) v = u(rng);
    for (auto& v : h) v = u(rng);
    const auto y = causal_conv(Trace(x), Kernel{Trace(h)});
    const auto ref = oracle::direct_conv(x, h);
    for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(y[t] - ref[t]));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "200 pairs up to L=4096, worst abs error %.3g", worst);
  return {worst <= 1e-8, buf};
}

Verdict ssm_equivalence() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> re(-2.0, -0.1), dt(0.001, 0.1), u(-1, 1);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<std::size_t> nn(1, 16), ll(1, 128);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    SsmLayerParams p;
    const std::size_t n = nn(rng);
    for (std::size_t k = 0; k < n; ++k) {
      p.a.emplace_back(re(rng), std::numbers::pi * static_cast<double>(k) * u(rng));
      p.b.emplace_back(gauss(rng), gauss(rng));
      p.c.emplace_back(gauss(rng), gauss(rng));
    }
    p.delta = dt(rng);
    const std::size_t len = ll(rng);
    oracle::Vec x(len);
    for (auto& v : x) v = gauss(rng);
    const auto y = causal_conv(Trace(x), ssm_kernel(p, len));
    const auto ref = oracle::ssm_run(p.a, p.b, p.c, p.delta, x);
    double err = 0.0, scale = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      err = std::max(err, std::abs(y[t] - ref[t]));
      scale = std::max(scale, std::abs(ref[t]));
    }
    worst = std::max(worst, scale > 0.0 ? err / scale : err);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "100 SSMs, worst relative error %.3g", worst);
  return {worst <= 1e-6, buf};
}

Verdict energy_reproduction() {
  const auto r = estimate_energy({{"ann", 275e9, false, 1.0}, {"snn", 72.66e9, true, 1.0}});
  const double mac_mj = r.energy_mac * 1e3, ac_mj = r.energy_ac * 1e3;
  const bool ok = std::abs(mac_mj - 1265.0) <= 1265.0 * 1e-3 &&
                  std::abs(ac_mj - 65.40) <= 65.40 * 1e-3;
  char buf[96];
  std::snprintf(buf, sizeof buf, "MAC %.4f mJ (want 1265), AC %.4f mJ (want 65.40)", mac_mj,
                ac_mj);
  return {ok, buf};
}

Verdict surrogate_gradient() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  const double alpha = 1.0, h = 1e-6;
  double worst = 0.0;
  int checked = 0;
  while (checked < 100) {
    const double v = x(rng);
    if (std::abs(std::abs(v) - 1.0 / alpha) < 1e-3) continue;
    const double fd = (oracle::g(v + h, alpha) - oracle::g(v - h, alpha)) / (2 * h);
    const double lib_fd = (surrogate(v + h, alpha) - surrogate(v - h, alpha)) / (2 * h);
    worst = std::max({worst, std::abs(fd - surrogate_grad(v, alpha)),
                      std::abs(lib_fd - surrogate_grad(v, alpha))});
    ++checked;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "100 points, worst abs deviation %.3g", worst);
  return {worst <= 1e-4, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "decomposition identity", decomposition_identity},
      {3, "convergence at M=3", convergence_at_three},
      {4, "speedup trend", speedup_trend},
      {5, "FFT correctness", fft_correctness},
      {6, "SSM kernel vs recurrence", ssm_equivalence},
      {7, "energy reproduction", energy_reproduction},
      {8, "surrogate gradient", surrogate_gradient},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%s, %.2fs)\n", c.id, v.pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str(), secs);
    failed += !v.pass;
  }
  std::printf(
      "criterion 9 N/A: LRA, WikiText-103 and ablation accuracies need full training; "
      "not reproducible, out of scope\n");
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
