#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "whittaker_cli/jobs.hpp"

using whittaker::cli::Json;

namespace {

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const Json& j, bool pretty) {
    std::cout << (pretty ? j.dump(2) : j.dump()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Computations with Whittaker groups over p-adic fields"};
    app.require_subcommand(1);

    whittaker::cli::JobOptions opt;
    std::string field;
    int precision = 0;
    int length = 0;
    std::string input_path;
    app.add_flag("--pretty", opt.pretty, "Human-readable output with ASCII trees");
    app.add_option("--field", field, "Field descriptor p[,u][,ram]");
    app.add_option("--precision", precision, "Relative precision in p-adic digits")->check(CLI::Range(2, 2000));
    app.add_option("--length", length, "Truncation length override")->check(CLI::Range(1, 64));
    app.add_option("--input", input_path, "Read the job from a file instead of stdin");

    std::string example_name;
    for (const auto& name : whittaker::cli::command_names()) {
        auto* sub = app.add_subcommand(name, "Run a " + name + " job");
        sub->fallthrough();
        if (name == "example") sub->add_option("name", example_name, "Fixture name, or \"list\"");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (!field.empty()) opt.field = field;
    if (precision > 0) opt.precision = precision;
    if (length > 0) opt.length = length;
    const std::string command = app.get_subcommands().front()->get_name();

    std::string text;
    if (command == "example" && !example_name.empty()) {
        text = Json(example_name).dump();
    } else if (!input_path.empty()) {
        std::ifstream in(input_path);
        if (!in) {
            emit({{"error", {{"class", "domain"}, {"code", "unreadable_input"}, {"message", input_path}}}}, opt.pretty);
            return 2;
        }
        text = read_all(in);
    } else {
        text = read_all(std::cin);
    }

    Json input;
    try {
        input = Json::parse(text);
    } catch (const Json::parse_error& e) {
        emit(whittaker::cli::parse_error_json(text, e.byte, e.what()), opt.pretty);
        return 2;
    }

    try {
        const auto result = whittaker::cli::run_job(command, input, opt);
        if (opt.pretty && !result.text.empty()) std::cout << result.text;
        emit(result.report, opt.pretty);
        return 0;
    } catch (const whittaker::Error& e) {
        emit(whittaker::cli::error_json(e), opt.pretty);
        return static_cast<int>(e.error_class());
    }
}
