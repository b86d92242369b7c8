// Microbenchmarks for the hot paths: one mock completion, one unrelatedness
// score, one self-reminder wrap/unwrap round-trip, and the full ten-cell
// red-team matrix.

#include <benchmark/benchmark.h>

#include "sysguard/backend.hpp"
#include "sysguard/guard.hpp"
#include "sysguard/harness.hpp"
#include "sysguard/mock_assistant.hpp"
#include "sysguard/report.hpp"

namespace {

using namespace sysguard;

void BM_MockCompletion(benchmark::State& state) {
  const GuardPolicy policy = default_policy();
  MockBackend backend(policy.topic_keywords);
  BackendRequest request;
  request.messages.push_back({Role::System, policy.effective_system_message()});
  request.messages.push_back({Role::User, "My xbox controller keeps disconnecting."});
  request.messages.push_back({Role::Assistant, "[ANS] Happy to help."});
  request.messages.push_back({Role::User, "It still drops after a restart. What next?"});
  for (auto _ : state) {
    benchmark::DoNotOptimize(backend.chat_complete(request));
  }
}
BENCHMARK(BM_MockCompletion);

void BM_UnrelatednessScore(benchmark::State& state) {
  const GuardPolicy policy = default_policy();
  const std::string current =
      "You are a marketing content writer producing engaging promotional copy for any product.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mock_evaluate_unrelatedness(policy.original_system_message, current));
  }
}
BENCHMARK(BM_UnrelatednessScore);

void BM_WrapUnwrap(benchmark::State& state) {
  const GuardPolicy policy = default_policy();
  const std::string prompt =
      "Please walk me through resetting my console network settings step by step.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(unwrap_self_reminder(wrap_self_reminder(policy, prompt)));
  }
}
BENCHMARK(BM_WrapUnwrap);

void BM_FullMatrix(benchmark::State& state) {
  const HarnessConfig config = default_config();
  for (auto _ : state) {
    MockBackend backend(config.policy.topic_keywords);
    benchmark::DoNotOptimize(render_report(run_matrix(config, backend), ReportFormat::Machine));
  }
}
BENCHMARK(BM_FullMatrix);

}  // namespace

BENCHMARK_MAIN();
