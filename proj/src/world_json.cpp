#include <stdexcept>

#include "respact/household.hpp"

namespace respact::env {

namespace {

const char* temperature_name(Temperature t) {
    switch (t) {
        case Temperature::Normal: return "normal";
        case Temperature::Hot: return "hot";
        case Temperature::Cold: return "cold";
    }
    return "normal";
}

Temperature temperature_from(const std::string& s) {
    if (s == "normal") return Temperature::Normal;
    if (s == "hot") return Temperature::Hot;
    if (s == "cold") return Temperature::Cold;
    throw FormatError("unknown temperature '" + s + "'");
}

EntityRef entity_from(const Json& j) {
    EntityRef id{j.at("class").get<std::string>(), j.at("index").get<int>()};
    if (!grammar::parse_entity(id.str()) || grammar::parse_entity(id.str())->class_name != id.class_name)
        throw FormatError("bad entity '" + id.str() + "'");
    return id;
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

Json to_json(const WorldState& s) {
    Json recs = Json::array();
    for (const auto& [name, r] : s.receptacles)
        recs.push_back({{"name", name},
                        {"class", r.id.class_name},
                        {"index", r.id.index},
                        {"openable", r.openable},
                        {"open", r.is_open}});
    Json objs = Json::array();
    for (const auto& [name, o] : s.objects)
        objs.push_back({{"name", name},
                        {"class", o.id.class_name},
                        {"index", o.id.index},
                        {"location", o.location},
                        {"temperature", temperature_name(o.temperature)},
                        {"cleanliness", o.cleanliness == Cleanliness::Clean ? "clean" : "dirty"},
                        {"lamp_on", o.lamp_on}});
    Json j{{"agent_at", s.agent_at}, {"receptacles", recs}, {"objects", objs}};
    j["inventory"] = s.inventory ? Json(*s.inventory) : Json(nullptr);
    return j;
}

WorldState world_from_json(const Json& j) {
    return guarded([&] {
        WorldState s;
        for (const Json& r : j.at("receptacles")) {
            EntityRef id = entity_from(r);
            const bool openable = is_openable_class(id.class_name);
            if (r.contains("openable") && r["openable"].get<bool>() != openable)
                throw FormatError("openable flag of " + id.str() + " disagrees with its class");
            s.receptacles[id.str()] = Receptacle{id, openable, r.value("open", !openable)};
        }
        for (const Json& o : j.at("objects")) {
            ObjectState obj{entity_from(o), o.at("location").get<std::string>()};
            obj.temperature = temperature_from(o.value("temperature", std::string("normal")));
            const std::string clean = o.value("cleanliness", std::string("dirty"));
            if (clean != "clean" && clean != "dirty") throw FormatError("unknown cleanliness '" + clean + "'");
            obj.cleanliness = clean == "clean" ? Cleanliness::Clean : Cleanliness::Dirty;
            obj.lamp_on = o.value("lamp_on", false);
            s.objects[obj.id.str()] = obj;
        }
        s.agent_at = j.value("agent_at", std::string(kStart));
        if (j.contains("inventory") && !j["inventory"].is_null()) s.inventory = j["inventory"].get<std::string>();
        try {
            s.check_invariants();
        } catch (const std::logic_error& e) {
            throw FormatError(e.what());
        }
        return s;
    });
}

Json to_json(const LayoutSpec& layout) {
    Json recs = Json::array();
    for (const ReceptacleSpec& r : layout.receptacles) recs.push_back({{"class", r.class_name}, {"count", r.count}});
    Json spawns = Json::array();
    for (const SpawnEntry& e : layout.spawns)
        spawns.push_back({{"object", e.object_class},
                          {"receptacles", e.receptacle_classes},
                          {"probability", e.probability},
                          {"max_count", e.max_count}});
    Json tasks = Json::array();
    for (const TaskTemplate& t : layout.tasks)
        tasks.push_back({{"type", to_string(t.type)}, {"object", t.object_class}, {"target", t.target_class}});
    return Json{{"name", layout.name},         {"receptacles", recs},
                {"spawns", spawns},            {"tasks", tasks},
                {"min_objects", layout.min_objects}, {"max_objects", layout.max_objects}};
}

LayoutSpec layout_from_json(const Json& j) {
    return guarded([&] {
        LayoutSpec l;
        l.name = j.at("name").get<std::string>();
        for (const Json& r : j.at("receptacles"))
            l.receptacles.push_back({r.at("class").get<std::string>(), r.at("count").get<int>()});
        for (const Json& e : j.at("spawns"))
            l.spawns.push_back({e.at("object").get<std::string>(), e.at("receptacles").get<std::vector<std::string>>(),
                                e.at("probability").get<double>(), e.at("max_count").get<int>()});
        for (const Json& t : j.value("tasks", Json::array())) {
            const auto type = task_type_from_string(t.at("type").get<std::string>());
            if (!type) throw FormatError("unknown task type in layout");
            l.tasks.push_back({*type, t.at("object").get<std::string>(), t.at("target").get<std::string>()});
        }
        l.min_objects = j.value("min_objects", 8);
        l.max_objects = j.value("max_objects", 15);
        if (l.min_objects < 0 || l.max_objects < l.min_objects) throw FormatError("bad object count range");
        return l;
    });
}

}  // namespace respact::env
