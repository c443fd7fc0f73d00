// Copyright 2026 The Corrective IL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Session protocol for recording human demonstrations against the live
// environment. Transport-free: a TeleopSession consumes decoded messages
// and returns the replies, so the protocol can be driven without sockets.
//
// Wire format: each frame is a 4-byte big-endian payload length followed by
// a UTF-8 JSON object with a "kind" field.
//
//   client -> server                 server -> client
//   hello {schema_version}           hello {schema_version, tick_hz, ...}
//   action {d_gripper, d_aperture}   state {...}  (exactly one per action)
//   task_advance {skip?}             record_done {demo_id, success, recorded}
//                                    error {code, message}
//
// Actions are in policy units: each component is clipped to [-1, 1] and
// scaled by a_max on the server.

#ifndef CORRECTIVE_IL_TELEOP_HPP_
#define CORRECTIVE_IL_TELEOP_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrective_il/demo.hpp"
#include "corrective_il/demo_io.hpp"
#include "corrective_il/env.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/rng.hpp"

namespace corrective_il {

inline constexpr int kTeleopSchemaVersion = 1;
inline constexpr int kTeleopTickHz = 20;
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 20;
// Task ids for human demonstrations, above the oracle pools and below the
// evaluation block.
inline constexpr TaskId kHumanIdBase = 300'000;

// --- Framing -----------------------------------------------------------------

inline std::string EncodeFrame(const json& message) {
  const std::string body = message.dump();
  if (body.size() > kMaxFrameBytes) throw ValidationError("frame too large");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((n >> shift) & 0xff));
  }
  out += body;
  return out;
}

inline std::uint32_t DecodeFrameLength(const std::array<unsigned char, 4>& header) {
  return (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
         (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
}

// Incremental decoder for a byte stream split at arbitrary points.
class FrameDecoder {
 public:
  void Feed(std::string_view bytes) { buffer_.append(bytes); }

  // Next complete message, if any. Throws ValidationError on an oversized
  // frame or a payload that is not a JSON object.
  std::optional<json> Next() {
    if (buffer_.size() < 4) return std::nullopt;
    std::array<unsigned char, 4> header;
    for (int i = 0; i < 4; ++i) header[i] = static_cast<unsigned char>(buffer_[i]);
    const std::uint32_t n = DecodeFrameLength(header);
    if (n > kMaxFrameBytes) throw ValidationError("frame length " + std::to_string(n) + " too large");
    if (buffer_.size() < 4 + std::size_t{n}) return std::nullopt;
    json msg = json::parse(buffer_.begin() + 4, buffer_.begin() + 4 + n, nullptr, false);
    buffer_.erase(0, 4 + std::size_t{n});
    if (msg.is_discarded() || !msg.is_object()) {
      throw ValidationError("frame payload is not a JSON object");
    }
    return msg;
  }

  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

// --- Triage queue --------------------------------------------------------------

// Reads the tasks a pilot policy failed on. Accepts a triage.json file, a
// stage directory containing one, or a run directory with stage1/.
inline std::vector<TaskInstance> LoadTriageQueue(const fs::path& from) {
  fs::path file = from;
  if (fs::is_directory(from)) {
    file = fs::exists(from / "triage.json") ? from / "triage.json"
                                             : from / "stage1" / "triage.json";
  }
  std::ifstream in(file);
  if (!in) throw ValidationError("no triage queue at " + from.string());
  std::vector<TaskInstance> queue;
  try {
    const json j = json::parse(in);
    for (const auto& item : j.at("tasks")) queue.push_back(TaskFromJson(item.at("task")));
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return queue;
}

// --- Storage -----------------------------------------------------------------------

// Appends recorded demonstrations to named demo sets under one root. All
// appends go through one mutex, so concurrent sessions may share a set.
class DemoStore {
 public:
  DemoStore(fs::path root, std::uint64_t config_hash)
      : root_(std::move(root)), config_hash_(config_hash) {}

  // Assigns the next free task id in the set and appends. Returns the id.
  TaskId Append(const std::string& set_name, Demonstration demo) {
    std::lock_guard lock(mu_);
    const fs::path dir = root_ / set_name;
    std::size_t existing = 0;
    if (fs::exists(dir / kManifestFile)) existing = LoadDemoSet(dir).demos.size();
    demo.task.task_id = kHumanIdBase + static_cast<TaskId>(existing);
    AppendDemo(dir, demo, 0, config_hash_);
    return demo.task.task_id;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::uint64_t config_hash_;
  std::mutex mu_;
};

inline bool ValidSetName(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

// --- Session -----------------------------------------------------------------------

struct TeleopOptions {
  EnvConfig env;
  bool keep_failures = false;
  // Tasks to correct, in order. Empty means free recording on sampled tasks.
  std::vector<TaskInstance> queue;
  Region region = Region::kFull;
  std::uint64_t seed = 0;
};

class TeleopSession {
 public:
  TeleopSession(const TeleopOptions& opts, DemoStore& store, std::uint64_t session_id)
      : opts_(opts),
        store_(store),
        session_id_(session_id),
        rng_(MakeRng(DeriveSeed(opts.seed, session_id))),
        set_name_("session-" + std::to_string(session_id)) {}

  // Handles one client message; returns the replies in send order.
  std::vector<json> Handle(const json& msg) {
    std::vector<json> out;
    const std::string kind = msg.value("kind", std::string());
    if (!hello_done_) {
      if (kind != "hello") return {Error("expected_hello", "first message must be hello")};
      return Hello(msg);
    }
    if (kind == "action") return Action(msg);
    if (kind == "task_advance") return Advance(msg);
    if (kind == "hello") return {Error("duplicate_hello", "session already open")};
    return {Error("unknown_kind", "unknown message kind '" + kind + "'")};
  }

  // True once the session should be closed by the transport.
  bool closed() const { return closed_; }
  const std::string& set_name() const { return set_name_; }
  int recorded() const { return recorded_; }
  bool episode_active() const { return state_.has_value() && !episode_over_; }

 private:
  static json Error(std::string_view code, std::string_view message) {
    return {{"kind", "error"}, {"code", code}, {"message", message}};
  }

  bool HasQueue() const { return !opts_.queue.empty(); }

  std::vector<json> Hello(const json& msg) {
    if (msg.value("schema_version", -1) != kTeleopSchemaVersion) {
      closed_ = true;
      return {Error("schema_version",
                    "server speaks schema_version " + std::to_string(kTeleopSchemaVersion))};
    }
    if (msg.contains("demo_set")) {
      const std::string name = msg["demo_set"].is_string() ? msg["demo_set"].get<std::string>() : "";
      if (!ValidSetName(name)) {
        closed_ = true;
        return {Error("demo_set", "demo_set must match [A-Za-z0-9_-]{1,64}")};
      }
      set_name_ = name;
    }
    hello_done_ = true;
    json hello = {{"kind", "hello"},
                  {"schema_version", kTeleopSchemaVersion},
                  {"tick_hz", kTeleopTickHz},
                  {"horizon", opts_.env.horizon},
                  {"a_max", opts_.env.a_max},
                  {"keep_failures", opts_.keep_failures},
                  {"session", session_id_},
                  {"demo_set", set_name_},
                  {"queue_size", opts_.queue.size()}};
    StartEpisode(NextTask());
    return {hello, State(0.0)};
  }

  TaskInstance NextTask() {
    if (HasQueue()) return opts_.queue[queue_pos_];
    return SampleTask(opts_.region, rng_, kHumanIdBase + episode_, opts_.env);
  }

  void StartEpisode(const TaskInstance& task) {
    state_ = Reset(task, opts_.env);
    steps_.clear();
    episode_over_ = false;
    last_recorded_ = false;
    ++episode_;
  }

  std::vector<json> Action(const json& msg) {
    if (episode_over_) return {Error("episode_over", "episode finished; send task_advance")};
    PolicyAction u;
    try {
      const auto& g = msg.at("d_gripper");
      if (!g.is_array() || g.size() != 2) throw ValidationError("d_gripper must be [dx, dy]");
      u << g[0].get<double>(), g[1].get<double>(), msg.at("d_aperture").get<double>();
    } catch (const json::exception& e) {
      return {Error("bad_action", e.what())};
    } catch (const ValidationError& e) {
      return {Error("bad_action", e.what())};
    }
    if (!u.allFinite()) return {Error("bad_action", "action components must be finite")};
    u = u.cwiseMax(-1.0).cwiseMin(1.0);

    steps_.push_back({Observe(*state_), u});
    StepResult r = Step(*state_, ToEnvAction(u, opts_.env), opts_.env);
    state_ = r.next;
    std::vector<json> out{State(r.reward, r.done, r.success)};
    if (r.done) {
      episode_over_ = true;
      out.push_back(Finish(r.success));
    }
    return out;
  }

  json Finish(bool success) {
    json done = {{"kind", "record_done"}, {"success", success}, {"demo_id", nullptr},
                 {"recorded", false}};
    if (!success && !opts_.keep_failures) return done;
    Demonstration demo;
    demo.task = state_->task;
    demo.steps = steps_;
    demo.success = success;
    demo.source = DemoSource::kHuman;
    if (HasQueue()) demo.corrective_of = opts_.queue[queue_pos_].task_id;
    const TaskId id = store_.Append(set_name_, std::move(demo));
    ++recorded_;
    last_recorded_ = true;
    done["demo_id"] = id;
    done["recorded"] = true;
    done["demo_set"] = set_name_;
    return done;
  }

  // Moves to the next task. With a queue, a task is only left behind once
  // it was recorded or the client asks to skip it; otherwise it is retried.
  std::vector<json> Advance(const json& msg) {
    const bool skip = msg.value("skip", false);
    if (HasQueue()) {
      if (last_recorded_ || skip) ++queue_pos_;
      if (queue_pos_ >= opts_.queue.size()) {
        state_.reset();
        episode_over_ = true;
        return {Error("queue_exhausted", "all queued tasks are done")};
      }
    }
    StartEpisode(NextTask());
    return {State(0.0)};
  }

  json State(double reward, bool done = false, bool success = false) const {
    const EnvState& s = *state_;
    json queue = nullptr;
    if (HasQueue()) {
      queue = {{"position", queue_pos_},
               {"size", opts_.queue.size()},
               {"remaining", opts_.queue.size() - queue_pos_}};
    }
    return {{"kind", "state"},
            {"episode", episode_},
            {"t", s.t},
            {"gripper", {s.gripper_pos.x(), s.gripper_pos.y()}},
            {"aperture", s.aperture},
            {"ball", {s.ball_pos.x(), s.ball_pos.y()}},
            {"held", s.held},
            {"task", TaskToJson(s.task)},
            {"queue", queue},
            {"reward", reward},
            {"done", done},
            {"success", success},
            {"recorded", recorded_}};
  }

  TeleopOptions opts_;
  DemoStore& store_;
  std::uint64_t session_id_;
  Rng rng_;
  std::string set_name_;
  bool hello_done_ = false;
  bool closed_ = false;
  std::optional<EnvState> state_;
  std::vector<DemoStep> steps_;
  bool episode_over_ = false;
  bool last_recorded_ = false;
  std::size_t queue_pos_ = 0;
  int episode_ = 0;
  int recorded_ = 0;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_TELEOP_HPP_
