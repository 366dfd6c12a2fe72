#include "guiwb/harness/remote.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <deque>
#include <mutex>

#include "../sim/json_codec.hpp"
#include "guiwb/error.hpp"
#include "guiwb/sim/serialize.hpp"

namespace guiwb::harness {

bool StreamChannel::send(const std::string& line) {
  if (closed_) return false;
  out_ << line << '\n';
  out_.flush();
  return static_cast<bool>(out_);
}

std::optional<std::string> StreamChannel::receive() {
  if (closed_) return std::nullopt;
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  return line;
}

namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> lines;
  bool closed = false;
};

class PipeEnd final : public LineChannel {
 public:
  PipeEnd(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~PipeEnd() override { close(); }

  bool send(const std::string& line) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) return false;
    out_->lines.push_back(line);
    out_->cv.notify_all();
    return true;
  }

  std::optional<std::string> receive() override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->lines.empty() || in_->closed; });
    if (in_->lines.empty()) return std::nullopt;
    auto line = std::move(in_->lines.front());
    in_->lines.pop_front();
    return line;
  }

  // Closing either end tears down both directions, like a socket.
  void close() override {
    for (auto* q : {in_.get(), out_.get()}) {
      std::lock_guard lock(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Queue> in_, out_;
};

class ProcessChannel final : public LineChannel {
 public:
  ProcessChannel(pid_t pid, FILE* to, FILE* from) : pid_(pid), to_(to), from_(from) {}
  ~ProcessChannel() override {
    close();
    int status = 0;
    waitpid(pid_, &status, 0);
  }

  bool send(const std::string& line) override {
    if (!to_) return false;
    if (std::fputs(line.c_str(), to_) < 0 || std::fputc('\n', to_) == EOF || std::fflush(to_) != 0) return false;
    return true;
  }

  std::optional<std::string> receive() override {
    if (!from_) return std::nullopt;
    std::string line;
    for (int c; (c = std::fgetc(from_)) != EOF;) {
      if (c == '\n') return line;
      line.push_back(static_cast<char>(c));
    }
    return std::nullopt;
  }

  void close() override {
    if (to_) std::fclose(to_);
    if (from_) std::fclose(from_);
    to_ = from_ = nullptr;
  }

 private:
  pid_t pid_;
  FILE* to_;
  FILE* from_;
};

ErrorKind error_kind_from(std::string_view s) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
    if (to_string(static_cast<ErrorKind>(k)) == s) return static_cast<ErrorKind>(k);
  }
  return ErrorKind::Config;
}

std::string error_line(ErrorKind kind, const std::string& message) {
  sim::codec::Json j;
  j["ok"] = false;
  j["error"] = {{"kind", std::string(to_string(kind))}, {"message", message}};
  return j.dump();
}

std::string result_line(const sim::StepResult& r, bool screenHasFlag) {
  sim::codec::Json j;
  j["ok"] = true;
  j["observation"] = sim::codec::to_json(r.observation);
  j["done"] = r.done;
  j["judge"] = sim::codec::to_json(r.judge);
  j["missedClick"] = r.missedClick;
  j["screenHasFlag"] = screenHasFlag;
  return j.dump();
}

}  // namespace

std::pair<std::unique_ptr<LineChannel>, std::unique_ptr<LineChannel>> make_pipe() {
  auto a = std::make_shared<Queue>();
  auto b = std::make_shared<Queue>();
  return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

std::unique_ptr<LineChannel> spawn_process(const std::string& command) {
  int down[2], up[2];
  if (pipe(down) != 0) throw Error(ErrorKind::Io, "pipe failed");
  if (pipe(up) != 0) {
    ::close(down[0]);
    ::close(down[1]);
    throw Error(ErrorKind::Io, "pipe failed");
  }
  std::signal(SIGPIPE, SIG_IGN);
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorKind::Io, "fork failed");
  if (pid == 0) {
    dup2(down[0], STDIN_FILENO);
    dup2(up[1], STDOUT_FILENO);
    ::close(down[0]);
    ::close(down[1]);
    ::close(up[0]);
    ::close(up[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(down[0]);
  ::close(up[1]);
  return std::make_unique<ProcessChannel>(pid, fdopen(down[1], "w"), fdopen(up[0], "r"));
}

bool DroppingChannel::send(const std::string& line) {
  if (dropped_) return false;
  if (left_ == 0) {
    dropped_ = true;
    inner_.close();
    return false;
  }
  --left_;
  return inner_.send(line);
}

std::optional<std::string> DroppingChannel::receive() {
  if (dropped_) return std::nullopt;
  return inner_.receive();
}

std::optional<std::string> WorkerSession::handle(const std::string& line) {
  try {
    const auto req = nlohmann::json::parse(line);
    const std::string op = req.at("op").get<std::string>();
    if (op == "close") return std::nullopt;
    if (op == "reset") {
      const auto [world, task] = sim::parse_world_task_line(req.at("task").dump());
      sim::StepResult r;
      r.observation = env_.reset(world, task);
      r.judge = env_.judge();
      return result_line(r, env_.screen_has_flag_element());
    }
    if (op == "step") {
      const auto r = env_.step(dsl::parse_action(req.at("action").get<std::string>()));
      return result_line(r, env_.screen_has_flag_element());
    }
    if (op == "skip") {
      const auto r = env_.skip_step();
      return result_line(r, env_.screen_has_flag_element());
    }
    return error_line(ErrorKind::Config, "unknown op '" + op + "'");
  } catch (const Error& e) {
    return error_line(e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_line(ErrorKind::Config, e.what());
  }
}

void serve(LineChannel& channel) {
  WorkerSession session;
  while (auto line = channel.receive()) {
    if (line->empty()) continue;
    auto resp = session.handle(*line);
    if (!resp) break;
    if (!channel.send(*resp)) break;
  }
}

sim::StepResult RemoteBackend::exchange(const std::string& request) {
  if (!channel_.send(request)) throw TransportLost{};
  const auto line = channel_.receive();
  if (!line) throw TransportLost{};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*line);
  } catch (const nlohmann::json::exception&) {
    throw TransportLost{};
  }
  if (!j.value("ok", false)) {
    const auto& err = j.at("error");
    throw Error(error_kind_from(err.value("kind", "")), err.value("message", "worker error"));
  }
  sim::StepResult r;
  r.observation = sim::codec::observation_from(j.at("observation"));
  r.done = j.at("done").get<bool>();
  r.judge = sim::codec::judge_from(j.at("judge"));
  r.missedClick = j.at("missedClick").get<bool>();
  screenHasFlag_ = j.at("screenHasFlag").get<bool>();
  return r;
}

sim::Observation RemoteBackend::reset(const sim::World& world, const sim::TaskSpec& task, std::uint64_t seed) {
  nlohmann::ordered_json req;
  req["op"] = "reset";
  req["task"] = nlohmann::ordered_json::parse(sim::world_task_line(world, task));
  req["seed"] = seed;
  return exchange(req.dump()).observation;
}

sim::StepResult RemoteBackend::step(const dsl::Action& grounded) {
  nlohmann::ordered_json req;
  req["op"] = "step";
  req["action"] = dsl::render_action(grounded);
  return exchange(req.dump());
}

sim::StepResult RemoteBackend::skip_step() { return exchange(R"({"op":"skip"})"); }

void RemoteBackend::close() { channel_.send(R"({"op":"close"})"); }

}  // namespace guiwb::harness
