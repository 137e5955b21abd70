#pragma once

#include "netsync/proto/messages.hpp"

namespace netsync::proto {

struct MotionParams {
  double move_speed = 5.0;  // units/s applied to normalized move directions
};

// Shared client/server input integrator; both sides must call this exact
// function for prediction to reconcile bit-for-bit.
//
// Accepts only cmd.input_seq == state.last_input_seq + 1 and returns
// whether the command was applied. move sets velocity toward the payload
// direction and advances position by one dt; idle stops; fire leaves the
// kinematic state untouched (hit resolution happens elsewhere).
bool apply_input(EntityState& state, const InputCommand& cmd, double dt_s,
                 const MotionParams& params);

}  // namespace netsync::proto
