#include "kiosk/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void read_number(const json& obj, std::string_view key, const std::string& path, double& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) throw ConfigError(join(path, key), "must be a number");
    out = it->get<double>();
}

void read_unsigned(const json& obj, std::string_view key, std::uint64_t& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_unsigned()) throw ConfigError(std::string(key), "must be a non-negative integer");
    out = it->get<std::uint64_t>();
}

AxisRange read_axis(const json& obj, std::string_view key, const std::string& path, AxisRange axis) {
    auto it = obj.find(key);
    if (it == obj.end()) return axis;
    const std::string p = join(path, key);
    require_object(*it, p, {"start", "stop", "step"});
    read_number(*it, "start", p, axis.start);
    read_number(*it, "stop", p, axis.stop);
    read_number(*it, "step", p, axis.step);
    return axis;
}

json axis_to_json(const AxisRange& axis) {
    return json{{"start", axis.start}, {"stop", axis.stop}, {"step", axis.step}};
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "", {"law", "rule", "accounting", "catalog", "grid", "customers_per_cell", "master_seed"});

    RunConfig cfg;
    if (auto it = root.find("law"); it != root.end()) {
        require_object(*it, "law", {"slope", "intercept"});
        read_number(*it, "slope", "law", cfg.model.law.slope);
        read_number(*it, "intercept", "law", cfg.model.law.intercept);
    }
    if (auto it = root.find("rule"); it != root.end()) {
        auto rule = it->is_string() ? parse_rule(it->get<std::string>()) : std::nullopt;
        if (!rule) throw ConfigError("rule", "must be \"multiplicative\" or \"additive\"");
        cfg.model.rule = *rule;
    }
    if (auto it = root.find("accounting"); it != root.end()) {
        auto acc = it->is_string() ? parse_accounting(it->get<std::string>()) : std::nullopt;
        if (!acc) {
            throw ConfigError("accounting",
                              "must be \"discount_all_display_buyers\" or \"discount_incremental_only\"");
        }
        cfg.model.accounting = *acc;
    }
    if (auto it = root.find("catalog"); it != root.end()) {
        if (!it->is_array()) throw ConfigError("catalog", "must be an array of categories");
        std::vector<Category> categories;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = "catalog[" + std::to_string(i) + "]";
            const json& c = (*it)[i];
            require_object(c, p, {"name", "weight", "mean", "std"});
            Category cat;
            cat.name = "category " + std::to_string(i);
            if (auto n = c.find("name"); n != c.end()) {
                if (!n->is_string()) throw ConfigError(p + ".name", "must be a string");
                cat.name = n->get<std::string>();
            }
            if (!c.contains("mean")) throw ConfigError(p + ".mean", "is required");
            if (!c.contains("std")) throw ConfigError(p + ".std", "is required");
            read_number(c, "weight", p, cat.weight);
            read_number(c, "mean", p, cat.price_mean);
            read_number(c, "std", p, cat.price_std);
            categories.push_back(std::move(cat));
        }
        cfg.model.catalog = CategoryCatalog(std::move(categories));
    }
    if (auto it = root.find("grid"); it != root.end()) {
        require_object(*it, "grid", {"u", "pi", "d", "margins"});
        cfg.grid.u = read_axis(*it, "u", "grid", cfg.grid.u);
        cfg.grid.pi = read_axis(*it, "pi", "grid", cfg.grid.pi);
        cfg.grid.d = read_axis(*it, "d", "grid", cfg.grid.d);
        if (auto m = it->find("margins"); m != it->end()) {
            if (!m->is_array()) throw ConfigError("grid.margins", "must be an array of numbers");
            cfg.grid.margins.clear();
            for (std::size_t i = 0; i < m->size(); ++i) {
                if (!(*m)[i].is_number()) {
                    throw ConfigError("grid.margins[" + std::to_string(i) + "]", "must be a number");
                }
                cfg.grid.margins.push_back((*m)[i].get<double>());
            }
        }
    }
    read_unsigned(root, "customers_per_cell", cfg.model.customers_per_cell);
    read_unsigned(root, "master_seed", cfg.model.master_seed);

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& config, int indent) {
    const auto& model = config.model;
    json catalog = json::array();
    for (const auto& c : model.catalog.categories()) {
        catalog.push_back({{"name", c.name}, {"weight", c.weight}, {"mean", c.price_mean}, {"std", c.price_std}});
    }
    json j{
        {"law", {{"slope", model.law.slope}, {"intercept", model.law.intercept}}},
        {"rule", to_string(model.rule)},
        {"accounting", to_string(model.accounting)},
        {"catalog", catalog},
        {"grid",
         {{"u", axis_to_json(config.grid.u)},
          {"pi", axis_to_json(config.grid.pi)},
          {"d", axis_to_json(config.grid.d)},
          {"margins", config.grid.margins}}},
        {"customers_per_cell", model.customers_per_cell},
        {"master_seed", model.master_seed},
    };
    return j.dump(indent);
}

}  // namespace kiosk
