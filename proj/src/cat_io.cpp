#include "darrl/cat_io.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace darrl {

using nlohmann::json;

namespace {

const char* kind_name(VarKind kind) { return kind == VarKind::integer ? "integer" : "real"; }

VarKind parse_kind(const std::string& s) {
    if (s == "integer") return VarKind::integer;
    if (s == "real") return VarKind::real;
    throw std::invalid_argument("unknown variable kind '" + s + "'");
}

}  // namespace

std::string serialize_cat(const Cat& cat) {
    json doc;
    doc["format"] = "darrl-cat";
    doc["version"] = 1;
    doc["min_real_width"] = cat.limits().min_real_width;
    json specs = json::array();
    for (const auto& spec : cat.specs()) {
        specs.push_back({{"name", spec.name}, {"kind", kind_name(spec.kind)}, {"lo", spec.lo}, {"hi", spec.hi}});
    }
    doc["specs"] = std::move(specs);
    json nodes = json::array();
    for (const auto& node : cat.nodes()) {
        json intervals = json::array();
        for (const auto& iv : node.abstraction) {
            intervals.push_back({iv.lo, iv.hi});
        }
        json entry;
        entry["id"] = node.id;
        entry["intervals"] = std::move(intervals);
        entry["parent"] = node.parent ? json(*node.parent) : json(nullptr);
        entry["split_var"] = node.split_var ? json(*node.split_var) : json(nullptr);
        entry["split_factor"] = node.split_factor ? json(*node.split_factor) : json(nullptr);
        nodes.push_back(std::move(entry));
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

Cat deserialize_cat(const std::string& document) {
    try {
        const json doc = json::parse(document);
        if (doc.at("format").get<std::string>() != "darrl-cat" || doc.at("version").get<int>() != 1) {
            throw std::invalid_argument("not a version-1 tree document");
        }
        std::vector<VariableSpec> specs;
        for (const auto& s : doc.at("specs")) {
            specs.push_back({s.at("name").get<std::string>(), parse_kind(s.at("kind").get<std::string>()),
                             s.at("lo").get<double>(), s.at("hi").get<double>()});
        }
        if (specs.empty()) {
            throw std::invalid_argument("tree document has no variables");
        }
        SplitLimits limits{doc.value("min_real_width", 1.0)};
        std::vector<CatNode> nodes;
        for (const auto& n : doc.at("nodes")) {
            CatNode node;
            node.id = n.at("id").get<NodeId>();
            const auto& intervals = n.at("intervals");
            if (intervals.size() != specs.size()) {
                throw std::invalid_argument("node " + std::to_string(node.id) + " has wrong dimensionality");
            }
            for (std::size_t i = 0; i < specs.size(); ++i) {
                const double lo = intervals.at(i).at(0).get<double>();
                const double hi = intervals.at(i).at(1).get<double>();
                node.abstraction.push_back(specs[i].kind == VarKind::integer
                                               ? Interval::integer(lo, hi)
                                               : Interval::real(lo, hi, hi == specs[i].hi));
            }
            if (!n.at("parent").is_null()) node.parent = n.at("parent").get<NodeId>();
            if (!n.at("split_var").is_null()) node.split_var = n.at("split_var").get<std::size_t>();
            if (!n.at("split_factor").is_null()) node.split_factor = n.at("split_factor").get<int>();
            nodes.push_back(std::move(node));
        }
        return Cat::from_nodes(std::move(specs), limits, std::move(nodes));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed tree document: ") + e.what());
    }
}

std::string cat_to_dot(const Cat& cat) {
    std::ostringstream os;
    os << "digraph cat {\n";
    os << "  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& node : cat.nodes()) {
        os << "  n" << node.id << " [label=\"" << to_string(node.abstraction) << "\"";
        if (node.is_leaf()) {
            os << ", style=filled, fillcolor=\"lightblue\"";
        }
        os << "];\n";
    }
    for (const auto& node : cat.nodes()) {
        for (NodeId c : node.children) {
            os << "  n" << node.id << " -> n" << c << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string export_cat_dot(const std::string& document) { return cat_to_dot(deserialize_cat(document)); }

}  // namespace darrl
