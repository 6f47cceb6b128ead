// SPDX-License-Identifier: Apache-2.0
//
// InequalityReport: one verified inequality instance. lhs/rhs at full
// precision, the lhs split into named contributions, and a numerical error
// budget that widens the pass band. A report is flagged COUNTEREXAMPLE only
// when its inequality was asserted and the ratio falls below 1 - budget;
// that always signals an implementation bug, never a property of the data.
#pragma once

#include <cmath>
#include <map>
#include <string>

#include <json.hpp>

namespace ancurv {

// Shared correction constant ((1+b0)/e^{2 r0 b1 + b0})^{power}
inline double correction_factor(double b0, double b1, double r0, double power) {
    return std::pow((1.0 + b0) / std::exp(2.0 * r0 * b1 + b0), power);
}

enum class ReportStatus { Ok, Counterexample, TrivialRhs, EvaluationOnly };

inline const char* to_string(ReportStatus s) {
    switch (s) {
        case ReportStatus::Ok: return "OK";
        case ReportStatus::Counterexample: return "COUNTEREXAMPLE";
        case ReportStatus::TrivialRhs: return "TRIVIAL";
        case ReportStatus::EvaluationOnly: return "EVAL_ONLY";
    }
    return "?";
}

struct Tolerances {
    double quad = 1e-10;
    double ode = 1e-10;
    double theta = 1e-6;

    // propagated budget used by every ratio >= 1 assertion
    double error_budget() const { return 3.0 * (quad + ode + theta); }

    void validate() const {
        if (!(quad > 0.0 && ode > 0.0 && theta > 0.0))
            throw std::domain_error("tolerances must be positive");
    }
};

struct InequalityReport {
    std::string theorem;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double slack = 0.0;
    std::map<std::string, double> terms;
    double error_budget = 0.0;
    ReportStatus status = ReportStatus::Ok;
    nlohmann::ordered_json inputs;

    // asserted = the theorem's hypotheses are certified for these inputs
    void finalize(bool asserted) {
        ratio = lhs / rhs;
        slack = lhs - rhs;
        if (rhs <= 0.0)
            status = ReportStatus::TrivialRhs;
        else if (!asserted)
            status = ReportStatus::EvaluationOnly;
        else
            status = ratio >= 1.0 - error_budget ? ReportStatus::Ok : ReportStatus::Counterexample;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["theorem"] = theorem;
        j["lhs"] = lhs;
        j["rhs"] = rhs;
        j["ratio"] = ratio;
        j["slack"] = slack;
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        for (const auto& [k, v] : terms) t[k] = v;
        j["terms"] = t;
        j["error_budget"] = error_budget;
        j["status"] = to_string(status);
        j["inputs"] = inputs;
        return j;
    }
};

}  // namespace ancurv
