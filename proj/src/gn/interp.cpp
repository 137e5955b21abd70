#include "netsync/gn/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace netsync::gn {

InterpBuffer::InterpBuffer(sim::TimeUs render_delay_us,
                           sim::TimeUs extrapolation_cap_us)
    : render_delay_us_(render_delay_us),
      extrapolation_cap_us_(extrapolation_cap_us) {
  if (render_delay_us < 0 || extrapolation_cap_us < 0) {
    throw std::invalid_argument("interp delays must be >= 0");
  }
}

void InterpBuffer::insert(sim::TimeUs server_time_us,
                          const proto::EntityState& state) {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), server_time_us,
      [](const Entry& e, sim::TimeUs t) { return e.t_us < t; });
  if (it != entries_.end() && it->t_us == server_time_us) {
    it->state = state;
    return;
  }
  entries_.insert(it, {server_time_us, state});
}

std::optional<proto::EntityState> InterpBuffer::sample(
    sim::TimeUs render_time_us) const {
  if (entries_.empty()) {
    return std::nullopt;
  }
  if (render_time_us <= entries_.front().t_us) {
    return entries_.front().state;
  }
  const Entry& newest = entries_.back();
  if (render_time_us >= newest.t_us) {
    const sim::TimeUs ahead =
        std::min(render_time_us - newest.t_us, extrapolation_cap_us_);
    proto::EntityState out = newest.state;
    out.position =
        out.position + out.velocity * (static_cast<double>(ahead) * 1e-6);
    return out;
  }
  const auto hi = std::upper_bound(
      entries_.begin(), entries_.end(), render_time_us,
      [](sim::TimeUs t, const Entry& e) { return t < e.t_us; });
  const Entry& b = *hi;
  const Entry& a = *std::prev(hi);
  return proto::lerp_state(a.state, b.state, a.t_us, b.t_us, render_time_us);
}

void InterpBuffer::prune_before(sim::TimeUs cutoff_us) {
  while (entries_.size() >= 2 && entries_[1].t_us <= cutoff_us) {
    entries_.erase(entries_.begin());
  }
}

}  // namespace netsync::gn
