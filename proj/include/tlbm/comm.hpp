#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace tlbm {

/// Which halo of the receiving rank a message fills.
enum class HaloSide : std::uint8_t { Left, Right, Bottom, Top, Snapshot };

std::string_view to_string(HaloSide side);

struct MessageTag {
  long long step = 0;
  HaloSide side = HaloSide::Left;
  friend auto operator<=>(const MessageTag&, const MessageTag&) = default;
};

/// Point-to-point, ordered, reliable channels between in-process ranks.
///
/// Mirrors blocking MPI semantics: send never blocks (unbounded queues);
/// recv blocks until a message with the matching (source, tag) arrives. A
/// recv that waits longer than the heartbeat timeout raises RuntimeError naming
/// the stalled pair; abort() wakes every waiter with RuntimeError.
class Communicator {
 public:
  explicit Communicator(int ranks, std::chrono::milliseconds heartbeat = std::chrono::seconds(60));

  int size() const noexcept { return static_cast<int>(boxes_.size()); }

  void send(int src, int dst, MessageTag tag, std::vector<double> payload);
  std::vector<double> recv(int dst, int src, MessageTag tag);

  /// Marks the run as failed; pending and future recv calls throw.
  void abort(const std::string& reason);
  bool aborted() const noexcept { return aborted_.load(); }

  /// Counts of messages and payload bytes delivered so far.
  long long messages() const noexcept { return messages_.load(); }
  long long bytes() const noexcept { return bytes_.load(); }

 private:
  struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::tuple<int, MessageTag>, std::deque<std::vector<double>>> queues;
  };

  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::chrono::milliseconds heartbeat_;
  std::atomic<bool> aborted_{false};
  std::atomic<long long> messages_{0};
  std::atomic<long long> bytes_{0};
  std::mutex reason_mu_;
  std::string reason_;
};

}  // namespace tlbm
