#pragma once

#include "ptvar/bandwidth.hpp"
#include "ptvar/series.hpp"

#include "json.hpp"

#include <string>

namespace ptvar {

/// Sidecar for an MCReport: aggregates, standard errors, and the lambda histogram.
[[nodiscard]] inline nlohmann::json to_json(const MCReport& r) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [lambda, count] : r.lambda_histogram()) {
        hist.push_back({{"lambda", lambda}, {"count", count}});
    }
    return {
        {"n", r.n},
        {"T", r.period},
        {"function", r.function_id},
        {"noise", r.noise_id},
        {"kernel", r.kernel_id},
        {"replications", r.replications},
        {"dropped", r.dropped},
        {"master_seed", r.master_seed},
        {"lambda_bar", r.lambda_bar},
        {"lambda_bar_se", r.lambda_bar_se},
        {"mean_root_mise", r.mean_root_mise},
        {"mean_root_mise_se", r.mean_root_mise_se},
        {"lambda_histogram", hist},
    };
}

} // namespace ptvar
