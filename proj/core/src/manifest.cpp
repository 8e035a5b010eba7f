#include "strideflex/manifest.hpp"

#include "strideflex/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace strideflex {
namespace {

using nlohmann::json;

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return j.at(key).get<T>();
}

std::string required_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ValidationError(where + ": missing string field '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

ManifestSprint parse_sprint(const json& j, const std::filesystem::path& base_dir, const std::string& where) {
    ManifestSprint s;
    s.subject_id = required_string(j, "subject_id", where);
    s.sprint_id = required_string(j, "sprint_id", where);
    s.fps = field_or(j, "fps", 100.0);
    s.image_width = field_or(j, "image_width", 1920.0);
    s.image_height = field_or(j, "image_height", 1080.0);
    s.notes = field_or(j, "notes", std::string());
    if (!(s.fps > 0.0) || !(s.image_width > 0.0) || !(s.image_height > 0.0)) {
        throw ValidationError(where + ": fps, image_width and image_height must be positive");
    }
    auto add_source = [&](const json& src, const std::string& w) {
        ManifestSource ms;
        ms.source = required_string(src, "source", w);
        ms.csv = base_dir / required_string(src, "csv", w);
        ms.ground_truth = field_or(src, "ground_truth", ms.source == "manual");
        s.sources.push_back(std::move(ms));
    };
    if (j.contains("sources")) {
        const json& arr = j.at("sources");
        if (!arr.is_array()) {
            throw ValidationError(where + ": 'sources' must be an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            add_source(arr[i], where + ".sources[" + std::to_string(i) + "]");
        }
    } else {
        add_source(j, where);
    }
    return s;
}

} // namespace

CaptureMeta ManifestSprint::meta_for(const ManifestSource& src) const {
    return CaptureMeta{fps, src.source, subject_id, sprint_id, image_width, image_height, notes};
}

const ManifestSource* ManifestSprint::find(const std::string& source) const {
    const auto it = std::find_if(sources.begin(), sources.end(),
                                 [&](const ManifestSource& s) { return s.source == source; });
    return it == sources.end() ? nullptr : &*it;
}

std::vector<std::string> Manifest::source_names() const {
    std::vector<std::string> names;
    for (const auto& sp : sprints) {
        for (const auto& src : sp.sources) {
            if (std::find(names.begin(), names.end(), src.source) == names.end()) {
                names.push_back(src.source);
            }
        }
    }
    return names;
}

std::optional<std::string> Manifest::ground_truth_source() const {
    for (const auto& sp : sprints) {
        for (const auto& src : sp.sources) {
            if (src.ground_truth) {
                return src.source;
            }
        }
    }
    return std::nullopt;
}

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    Manifest m;
    try {
        if (root.contains("sprints")) {
            const json& arr = root.at("sprints");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                m.sprints.push_back(parse_sprint(arr[i], base_dir, "sprints[" + std::to_string(i) + "]"));
            }
        } else {
            m.sprints.push_back(parse_sprint(root, base_dir, "manifest"));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest field has wrong type: ") + e.what());
    }
    if (m.sprints.empty()) {
        throw ValidationError("manifest lists no sprints");
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_json(const Manifest& m, const std::filesystem::path& base_dir) {
    json root;
    root["sprints"] = json::array();
    for (const auto& sp : m.sprints) {
        json js{{"subject_id", sp.subject_id}, {"sprint_id", sp.sprint_id},     {"fps", sp.fps},
                {"image_width", sp.image_width}, {"image_height", sp.image_height}, {"notes", sp.notes}};
        js["sources"] = json::array();
        for (const auto& src : sp.sources) {
            std::filesystem::path rel = src.csv;
            if (!base_dir.empty()) {
                rel = src.csv.lexically_relative(base_dir);
                if (rel.empty()) {
                    rel = src.csv;
                }
            }
            js["sources"].push_back(
                {{"source", src.source}, {"csv", rel.generic_string()}, {"ground_truth", src.ground_truth}});
        }
        root["sprints"].push_back(js);
    }
    return root.dump(2);
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write manifest " + path.string());
    }
    out << manifest_to_json(m, path.parent_path()) << '\n';
}

} // namespace strideflex
