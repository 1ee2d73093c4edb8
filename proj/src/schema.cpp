#include "rpgkit/schema.hpp"

namespace rpgkit {

namespace {

using nlohmann::json;

const char* type_name(const json& v) {
    switch (v.type()) {
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::null: return "null";
        default: return "number";
    }
}

class Validator {
public:
    Validator(const json& root, std::vector<FormatViolation>& out) : root_(root), out_(out) {}

    void validate(const json& schema, const json& inst, const std::string& path) {
        const json& s = resolve(schema);

        if (auto it = s.find("type"); it != s.end()) {
            const std::string& want = it->get_ref<const std::string&>();
            if (!type_matches(want, inst)) {
                add(path, "expected " + want + ", got " + type_name(inst));
                return;  // further keywords assume the right shape
            }
        }

        if (auto it = s.find("enum"); it != s.end()) {
            bool hit = false;
            for (const auto& option : *it)
                if (option == inst) { hit = true; break; }
            if (!hit) add(path, "value is not one of the allowed values");
        }

        if (inst.is_object()) {
            if (auto it = s.find("required"); it != s.end()) {
                for (const auto& key : *it) {
                    const std::string& k = key.get_ref<const std::string&>();
                    if (!inst.contains(k)) add(path + "/" + k, "required property is missing");
                }
            }
            const json* props = nullptr;
            if (auto it = s.find("properties"); it != s.end()) props = &*it;
            for (auto it = inst.begin(); it != inst.end(); ++it) {
                const json* sub = nullptr;
                if (props) {
                    if (auto p = props->find(it.key()); p != props->end()) sub = &*p;
                }
                if (sub) {
                    validate(*sub, it.value(), path + "/" + it.key());
                } else if (s.value("additionalProperties", json(true)) == json(false)) {
                    add(path + "/" + it.key(), "unexpected additional property");
                }
            }
        }

        if (inst.is_array()) {
            if (auto it = s.find("minItems"); it != s.end()) {
                if (inst.size() < it->get<size_t>())
                    add(path, "array needs at least " + std::to_string(it->get<size_t>()) +
                                  " items, got " + std::to_string(inst.size()));
            }
            if (auto it = s.find("items"); it != s.end()) {
                for (size_t i = 0; i < inst.size(); ++i)
                    validate(*it, inst[i], path + "/" + std::to_string(i));
            }
            if (auto it = s.find("contains"); it != s.end()) {
                bool any = false;
                for (const auto& item : inst) {
                    if (matches(*it, item)) { any = true; break; }
                }
                if (!any) add(path, "no array item matches the contains schema");
            }
        }
    }

private:
    bool matches(const json& schema, const json& inst) {
        std::vector<FormatViolation> scratch;
        Validator probe(root_, scratch);
        probe.validate(schema, inst, "");
        return scratch.empty();
    }

    const json& resolve(const json& schema) const {
        const json* s = &schema;
        while (s->is_object() && s->contains("$ref")) {
            const std::string& ref = (*s)["$ref"].get_ref<const std::string&>();
            const std::string prefix = "#/$defs/";
            if (ref.rfind(prefix, 0) != 0)
                throw std::runtime_error("unsupported $ref: " + ref);
            s = &root_.at("$defs").at(ref.substr(prefix.size()));
        }
        return *s;
    }

    static bool type_matches(const std::string& want, const json& v) {
        if (want == "object") return v.is_object();
        if (want == "array") return v.is_array();
        if (want == "string") return v.is_string();
        if (want == "number") return v.is_number();
        if (want == "boolean") return v.is_boolean();
        if (want == "null") return v.is_null();
        return false;
    }

    void add(const std::string& path, std::string message) {
        out_.push_back({path, std::move(message)});
    }

    const json& root_;
    std::vector<FormatViolation>& out_;
};

}  // namespace

std::vector<FormatViolation> schema_validate(const nlohmann::json& schema,
                                             const nlohmann::json& instance) {
    std::vector<FormatViolation> out;
    Validator v(schema, out);
    v.validate(schema, instance, "");
    return out;
}

}  // namespace rpgkit
