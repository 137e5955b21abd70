#include "netsync/proto/kinematics.hpp"

namespace netsync::proto {

bool apply_input(EntityState& state, const InputCommand& cmd, double dt_s,
                 const MotionParams& params) {
  if (cmd.input_seq != state.last_input_seq + 1) {
    return false;
  }
  switch (cmd.action) {
    case ActionKind::kMove: {
      const Vec2 dir = Vec2{cmd.payload_x, cmd.payload_y}.normalized();
      state.velocity = dir * params.move_speed;
      state.position = state.position + state.velocity * dt_s;
      break;
    }
    case ActionKind::kIdle:
      state.velocity = {};
      break;
    case ActionKind::kFire:
      break;
  }
  state.last_input_seq = cmd.input_seq;
  return true;
}

}  // namespace netsync::proto
