#include "tourney/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tourney/errors.hpp"

namespace tourney {

using nlohmann::json;

OutcomeModel parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model file: JSON parse error: ") + e.what());
    }

    OutcomeModel model;
    try {
        model.id = j.value("id", "model");
        model.denominator = j.at("denominator").get<int>();
        for (const auto& entry : j.at("support")) {
            if (!entry.is_array() || entry.size() != 2)
                throw ConfigError("model file: each support entry must be [numerator, weight]");
            SupportPoint p;
            p.numerator = entry[0].get<int>();
            p.weight = entry[1].get<double>();
            model.support.push_back(p);
        }
        if (j.contains("support_exact")) {
            const auto& ex = j.at("support_exact");
            if (ex.size() != model.support.size())
                throw ConfigError("model file: support_exact size must match support");
            for (std::size_t i = 0; i < model.support.size(); ++i) {
                const auto& entry = ex[i];
                if (!entry.is_array() || entry.size() != 2 || !entry[1].is_array() ||
                    entry[1].size() != 2)
                    throw ConfigError(
                        "model file: each support_exact entry must be [numerator, [num, den]]");
                if (entry[0].get<int>() != model.support[i].numerator)
                    throw ConfigError("model file: support_exact numerators must match support");
                model.support[i].weight_exact =
                    Rational64{entry[1][0].get<std::int64_t>(), entry[1][1].get<std::int64_t>()};
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }

    auto v = validate(model);
    if (!v.ok()) throw DomainError("model file: invalid model: " + v.summary());
    return model;
}

OutcomeModel load_model(const std::string& path_or_name) {
    if (path_or_name == "classical") return classical_model();
    if (path_or_name == "chess") return chess_model();
    std::ifstream in(path_or_name);
    if (!in) throw ConfigError("model file: cannot open " + path_or_name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

}  // namespace tourney
