#ifndef TSADP_COMMANDS_HPP
#define TSADP_COMMANDS_HPP

#include <ostream>
#include <string>

#include "tsadp/config.hpp"

namespace tsadp::cli {

/// Exit-code contract: 0 success, 1 validation/assertion failure,
/// 2 I/O or format failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Generate a synthetic dataset and write it to `out` (or paths.dataset).
int cmd_gen_data(const CliConfig& cfg, const std::string& out,
                 std::ostream& os);

/// Train on paths.dataset, write checkpoint (paths.checkpoint or `out`)
/// and per-epoch JSONL metrics (paths.metrics).
int cmd_train(const CliConfig& cfg, const std::string& out, std::ostream& os);

/// Evaluate a checkpoint against a dataset; prints one JSON record and
/// optionally writes it to `out`.
int cmd_eval(const std::string& checkpoint_path,
             const std::string& dataset_path, const CliConfig& cfg,
             const std::string& out, std::ostream& os);

/// Finite-difference verification of the analytic gradients. Returns
/// kExitOk iff the check passes.
int cmd_gradcheck(const CliConfig& cfg, bool plant_fault, std::ostream& os);

/// List checkpoint parameters, shapes and norms.
int cmd_inspect(const std::string& checkpoint_path, std::ostream& os);

/// Maps an exception to the exit-code contract, printing the diagnostic.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace tsadp::cli

#endif  // TSADP_COMMANDS_HPP
