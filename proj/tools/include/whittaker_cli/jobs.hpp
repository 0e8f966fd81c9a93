#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "whittaker/errors.hpp"
#include "whittaker/redtree.hpp"
#include "whittaker/theta.hpp"

namespace whittaker::cli {

using Json = nlohmann::ordered_json;

struct JobOptions {
    std::optional<std::string> field;
    std::optional<int> precision;
    std::optional<int> length;
    bool pretty = false;
};

struct JobResult {
    Json report;
    std::string text;  // human-readable rendering for --pretty
};

const std::vector<std::string>& command_names();

// Runs one job; module errors propagate as whittaker::Error.
JobResult run_job(const std::string& command, const Json& input, const JobOptions& opt);

// Field named by the options or the job; throws when neither names one.
Field job_field(const Json& input, const JobOptions& opt);

ProjPoint parse_point(const Json& v, const Field& f);
std::vector<LabeledPoint> parse_points(const Json& v, const Field& f);
std::vector<FixedPair> parse_pairs(const Json& v, const Field& f);
Coords parse_coords(const Json& v, const Field& f);

Json to_json(const ProjPoint& p);
Json to_json(const FieldElement& x);
Json to_json(const Rational& r);
Json to_json(const ChartTuple& t);
Json to_json(const FbSheet& s);
Json tree_json(const ReductionTree& t);
Json configuration_json(const ReductionTree& t, const Configuration& c);

// ASCII drawing of a tree with markings, vertex types and edge parities.
std::string render_tree(const ReductionTree& t, const std::optional<Configuration>& c = std::nullopt);

Json error_json(const Error& e);
Json parse_error_json(const std::string& text, std::size_t byte, const std::string& message);

}  // namespace whittaker::cli
