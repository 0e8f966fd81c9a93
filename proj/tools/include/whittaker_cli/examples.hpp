#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "whittaker_cli/jobs.hpp"

namespace whittaker::cli {

// A worked curve or a synthetic sample.  Curves given by a polynomial list
// their branch points through approximate hints, one per label; equal hints
// share a cluster and are filled in root order.
struct Fixture {
    std::string name;
    std::string description;
    std::string field;
    int precision = 20;
    std::string chart;                          // chart for the fb-inverse step, if any
    std::vector<mpz_class> polynomial;          // constant term first
    int degree = 0;                             // formal degree (6 or 8)
    std::optional<std::int64_t> factor_prime;   // report the factorization mod this prime
    std::optional<std::string> requested_field; // field named by the source, checked for roots
    std::vector<std::pair<std::string, std::string>> hints;
    std::vector<std::string> branch_coords;     // branch tuple given directly
    std::optional<std::string> fallback_field;  // retried when a square root is missing
    std::optional<int> catalog_config;          // synthetic genus-3 configuration number
    std::uint64_t seed = 1;
    int target = 10;
};

const std::vector<Fixture>& example_registry();
const Fixture& example(const std::string& name);  // throws DomainError("unknown_example")

// Branch points of a polynomial fixture, labelled by the hints.
std::vector<LabeledPoint> fixture_branch_points(const Fixture& fx, const Field& f);
// Branch points moved into the chart's normal form.
BranchTuple fixture_branch_tuple(const Fixture& fx, const Field& f);

Json run_example(const Fixture& fx, const JobOptions& opt, std::string* text = nullptr);

}  // namespace whittaker::cli
