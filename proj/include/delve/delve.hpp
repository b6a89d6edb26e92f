#pragma once
// Umbrella header for the library (HTTP-backed pieces are opt-in via
// http_provider.hpp / service.hpp).

#include "delve/core.hpp"
#include "delve/db.hpp"
#include "delve/eval.hpp"
#include "delve/executor.hpp"
#include "delve/gateway.hpp"
#include "delve/orchestrator.hpp"
#include "delve/prompts.hpp"
#include "delve/report.hpp"
#include "delve/schemas.hpp"
#include "delve/store.hpp"
#include "delve/util.hpp"
#include "delve/web.hpp"
