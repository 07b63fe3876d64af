#pragma once

#include "run_context.hpp"

namespace molcert::cli {

void cmd_sample(RunContext& ctx);
void cmd_qoi(RunContext& ctx);
void cmd_certify(RunContext& ctx);
void cmd_saturate(RunContext& ctx);
void cmd_bound(RunContext& ctx);
void cmd_bindsite(RunContext& ctx);
void cmd_volmap(RunContext& ctx);
void cmd_modes(RunContext& ctx);

/// Runs `command` and writes its sidecar.
void run_command(RunContext& ctx);

}  // namespace molcert::cli
