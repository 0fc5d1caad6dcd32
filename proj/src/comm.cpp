#include "tlbm/comm.hpp"

#include "tlbm/error.hpp"

namespace tlbm {

std::string_view to_string(HaloSide side) {
  switch (side) {
    case HaloSide::Left:
      return "left";
    case HaloSide::Right:
      return "right";
    case HaloSide::Bottom:
      return "bottom";
    case HaloSide::Top:
      return "top";
    case HaloSide::Snapshot:
      return "snapshot";
  }
  return "?";
}

Communicator::Communicator(int ranks, std::chrono::milliseconds heartbeat) : heartbeat_(heartbeat) {
  if (ranks < 1) throw ConfigError("communicator needs at least one rank");
  for (int r = 0; r < ranks; ++r) boxes_.push_back(std::make_unique<Mailbox>());
}

void Communicator::send(int src, int dst, MessageTag tag, std::vector<double> payload) {
  if (dst < 0 || dst >= size() || src < 0 || src >= size()) throw ProtocolError("send to an unknown rank");
  bytes_ += static_cast<long long>(payload.size() * sizeof(double));
  ++messages_;
  Mailbox& box = *boxes_[dst];
  {
    std::lock_guard lock(box.mu);
    box.queues[{src, tag}].push_back(std::move(payload));
  }
  box.cv.notify_all();
}

std::vector<double> Communicator::recv(int dst, int src, MessageTag tag) {
  if (dst < 0 || dst >= size() || src < 0 || src >= size()) throw ProtocolError("recv from an unknown rank");
  Mailbox& box = *boxes_[dst];
  std::unique_lock lock(box.mu);
  const auto key = std::make_tuple(src, tag);
  const auto deadline = std::chrono::steady_clock::now() + heartbeat_;
  for (;;) {
    if (aborted_) {
      std::lock_guard rl(reason_mu_);
      throw RuntimeError("rank " + std::to_string(dst) + " aborted: " + reason_);
    }
    auto it = box.queues.find(key);
    if (it != box.queues.end() && !it->second.empty()) {
      std::vector<double> msg = std::move(it->second.front());
      it->second.pop_front();
      if (it->second.empty()) box.queues.erase(it);
      return msg;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw RuntimeError("rank " + std::to_string(dst) + " stalled at step " + std::to_string(tag.step) +
                         " waiting for its " + std::string(to_string(tag.side)) + " halo from rank " +
                         std::to_string(src));
    }
    box.cv.wait_for(lock, std::chrono::milliseconds(50));
  }
}

void Communicator::abort(const std::string& reason) {
  {
    std::lock_guard lock(reason_mu_);
    if (!aborted_) reason_ = reason;
  }
  aborted_ = true;
  for (auto& box : boxes_) {
    std::lock_guard lock(box->mu);
    box->cv.notify_all();
  }
}

}  // namespace tlbm
