#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "guiwb/harness/episode.hpp"
#include "guiwb/sim/environment.hpp"

namespace guiwb::harness {

/// A newline-delimited message stream. receive() returns nullopt once the peer
/// is gone; send() returns false in that case.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual bool send(const std::string& line) = 0;
  virtual std::optional<std::string> receive() = 0;
  virtual void close() = 0;
};

/// Over a pair of iostreams (stdin/stdout for the worker subcommand).
class StreamChannel final : public LineChannel {
 public:
  StreamChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  bool send(const std::string& line) override;
  std::optional<std::string> receive() override;
  void close() override { closed_ = true; }

 private:
  std::istream& in_;
  std::ostream& out_;
  bool closed_ = false;
};

/// Two connected in-memory ends, safe to use from two threads.
std::pair<std::unique_ptr<LineChannel>, std::unique_ptr<LineChannel>> make_pipe();

/// Runs a child process and talks to its stdin/stdout.
std::unique_ptr<LineChannel> spawn_process(const std::string& command);

/// Wraps a channel and drops the connection after `sendsBeforeDrop` sends.
class DroppingChannel final : public LineChannel {
 public:
  DroppingChannel(LineChannel& inner, std::size_t sendsBeforeDrop) : inner_(inner), left_(sendsBeforeDrop) {}
  bool send(const std::string& line) override;
  std::optional<std::string> receive() override;
  void close() override { inner_.close(); }

 private:
  LineChannel& inner_;
  std::size_t left_;
  bool dropped_ = false;
};

/// Worker side of the protocol. Requests:
///   {"op":"reset","task":{"world":...,"task":...},"seed":n}
///   {"op":"step","action":"<canonical DSL>"}
///   {"op":"skip"}
///   {"op":"close"}
/// Responses: {"ok":true,"observation":...,"done":b,"judge":...,"missedClick":b,"screenHasFlag":b}
/// or {"ok":false,"error":{"kind":...,"message":...}}.
class WorkerSession {
 public:
  /// Response line, or nullopt after close.
  std::optional<std::string> handle(const std::string& line);

 private:
  sim::Environment env_;
};

/// Serves requests until close or end of stream.
void serve(LineChannel& channel);

/// Coordinator side: drives a worker over a channel. A dropped connection
/// raises TransportLost; an error response is rethrown as guiwb::Error.
class RemoteBackend final : public EpisodeBackend {
 public:
  explicit RemoteBackend(LineChannel& channel) : channel_(channel) {}
  sim::Observation reset(const sim::World& world, const sim::TaskSpec& task, std::uint64_t seed) override;
  sim::StepResult step(const dsl::Action& grounded) override;
  sim::StepResult skip_step() override;
  bool screen_has_flag_element() const override { return screenHasFlag_; }
  /// Sends close; the channel stays open for the caller to tear down.
  void close();

 private:
  sim::StepResult exchange(const std::string& request);

  LineChannel& channel_;
  bool screenHasFlag_ = false;
};

}  // namespace guiwb::harness
