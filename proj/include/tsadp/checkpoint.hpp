#ifndef TSADP_CHECKPOINT_HPP
#define TSADP_CHECKPOINT_HPP

#include <string>

#include "tsadp/model.hpp"

namespace tsadp {

/// Binary checkpoint, little-endian throughout:
///   magic "TSDP", version u32, parameter count u32, then per parameter:
///   name length u32, UTF-8 name, rows u32, cols u32, row-major float64
///   data. Parameters appear in the model's canonical order
///   (w_q, w_k, w_v, w_p, u_v, u_l, mask_token, predictor).
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const TsadpModel& model, const std::string& path);
TsadpModel load_checkpoint(const std::string& path);

}  // namespace tsadp

#endif  // TSADP_CHECKPOINT_HPP
