#include "guiwb/harness/orchestrator.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "guiwb/error.hpp"
#include "guiwb/sim/generator.hpp"

namespace guiwb::harness {

TaskInstance instantiate(const sim::TemplateParams& t) {
  auto [w, task] = sim::generate_from_template(t);
  return TaskInstance{std::move(w), std::move(task)};
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw Error(ErrorKind::Config, "workers must be >= 1");
  const auto k = static_cast<std::size_t>(workers);
  if (k == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::min(k, n));
  for (std::size_t t = 0; t < std::min(k, n); ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<rl::Trajectory> run_jobs(const std::vector<EpisodeJob>& jobs, const DecisionFn& decide,
                                     const EpisodeSettings& base, int workers) {
  std::vector<rl::Trajectory> out(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    EpisodeSettings s = base;
    s.seed = jobs[i].seed;
    out[i] = run_episode(*jobs[i].world, *jobs[i].task, decide, s);
    out[i].attempt = jobs[i].attempt;
  });
  return out;
}

}  // namespace guiwb::harness
