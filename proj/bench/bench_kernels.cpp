// Serial vs OpenMP kernels, plus service throughput on the demo deployment.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>
#include <unistd.h>

#include <filesystem>
#include <random>

#include "assist/config.hpp"
#include "assist/intent_cnn.hpp"
#include "assist/kernels.hpp"
#include "assist/pipeline.hpp"
#include "assist/service.hpp"
#include "httplib.h"

using namespace assist;

namespace {

Eigen::MatrixXd unit_columns(Eigen::Index dim, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(dim, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  m.colwise().normalize();
  return m;
}

template <Eigen::MatrixXd (*Kernel)(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>
void BM_Cosine(benchmark::State& state) {
  const auto a = unit_columns(64, state.range(0), 1);
  const auto b = unit_columns(64, 2000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2000);
}

std::vector<std::vector<std::int32_t>> random_sets(int n, int universe, int lo, int hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::int32_t>> out(static_cast<std::size_t>(n));
  for (auto& s : out) {
    for (std::int32_t i = 0; i < universe; ++i)
      if (static_cast<int>(rng() % universe) < lo + static_cast<int>(rng() % (hi - lo + 1))) s.push_back(i);
  }
  return out;
}

template <std::vector<std::int64_t> (*Kernel)(std::span<const std::vector<std::int32_t>>,
                                              std::span<const std::vector<std::int32_t>>)>
void BM_Support(benchmark::State& state) {
  const auto tx = random_sets(static_cast<int>(state.range(0)), 40, 8, 20, 3);
  const auto cands = random_sets(500, 40, 1, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(tx, cands));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 500);
}

const IntentModel& bench_intent_model() {
  static const IntentModel m = [] {
    IntentConfig cfg;
    return IntentModel::init(cfg, 5000, 10);
  }();
  return m;
}

template <std::vector<Eigen::VectorXd> (*Kernel)(const IntentModel&, std::span<const std::vector<std::int32_t>>)>
void BM_IntentForward(benchmark::State& state) {
  const auto& m = bench_intent_model();
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::int32_t>> inputs(static_cast<std::size_t>(state.range(0)));
  for (auto& in : inputs) {
    in.resize(static_cast<std::size_t>(m.config.max_len));
    for (auto& id : in) id = static_cast<std::int32_t>(2 + rng() % 4998);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m, inputs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::shared_ptr<const Engines> demo_engines() {
  static const auto engines = [] {
    auto cfg = AppConfig::load(std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "config.json");
    const auto dir = std::filesystem::temp_directory_path() / ("assist_bench_" + std::to_string(::getpid()));
    for (const char* key : {"intent_model", "chat_model", "kb_index", "chat_index"})
      cfg.set(key, (dir / (std::string(key) + ".bin")).string());
    prepare_artifacts(cfg, 7);
    return std::make_shared<const Engines>(load_engines(cfg));
  }();
  return engines;
}

// One question per branch, cycled within a single session.
const std::vector<std::string>& mixed_questions() {
  static const std::vector<std::string> q{"I forgot my login password", "cancel my refund", "I am unhappy",
                                          "red envelopes", "freeze my membership points"};
  return q;
}

void BM_ServiceInProcess(benchmark::State& state) {
  AssistService svc(demo_engines());
  const auto id = svc.store().create();
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = svc.handle_message(MessageRequest{id, mixed_questions()[i++ % mixed_questions().size()], false, 1700000000});
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_ServiceHttp(benchmark::State& state) {
  auto svc = std::make_shared<AssistService>(demo_engines());
  HttpServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client cli("127.0.0.1", port);
  const auto id = svc->store().create();
  std::size_t i = 0;
  for (auto _ : state) {
    const json body{{"session_id", id}, {"text", mixed_questions()[i++ % mixed_questions().size()]}};
    auto r = cli.Post("/v1/message", body.dump(), "application/json");
    if (!r || r->status != 200) state.SkipWithError("request failed");
  }
  server.stop();
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_Cosine<kernels::cosine_matrix_serial>)->Name("cosine_matrix/serial")->Arg(200)->Arg(1000);
BENCHMARK(BM_Cosine<kernels::cosine_matrix_omp>)->Name("cosine_matrix/omp")->Arg(200)->Arg(1000);
BENCHMARK(BM_Support<kernels::itemset_support_serial>)->Name("itemset_support/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_Support<kernels::itemset_support_omp>)->Name("itemset_support/omp")->Arg(1000)->Arg(10000);
BENCHMARK(BM_IntentForward<kernels::intent_forward_serial>)->Name("intent_forward/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_IntentForward<kernels::intent_forward_omp>)->Name("intent_forward/omp")->Arg(256)->Arg(2048);
BENCHMARK(BM_ServiceInProcess)->Name("service/in_process");
BENCHMARK(BM_ServiceHttp)->Name("service/http")->UseRealTime();

BENCHMARK_MAIN();
